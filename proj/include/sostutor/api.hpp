#pragma once

// HTTP/JSON facade over TutoringService: auth, user and task controllers.
// Routing is transport independent (ApiService::handle); mount() wires it
// into a cpp-httplib server.

#include <httplib.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sostutor/error.hpp"
#include "sostutor/json_io.hpp"
#include "sostutor/personality.hpp"
#include "sostutor/tutoring_service.hpp"

namespace sostutor::api {

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string authorization;
  std::string body;
};

struct Response {
  int status = 200;
  json body;
};

// userId -> secret, read from a JSON object file.
class Credentials {
 public:
  Credentials() = default;
  explicit Credentials(std::map<std::string, std::string> secrets) : secrets_(std::move(secrets)) {}

  static Credentials load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot read credentials file " + path.string());
    try {
      return Credentials(json::parse(in).get<std::map<std::string, std::string>>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::validation, "credentials file must map userId to secret: " +
                                             std::string(e.what()));
    }
  }

  bool verify(const std::string& user_id, const std::string& secret) const {
    auto it = secrets_.find(user_id);
    return it != secrets_.end() && it->second == secret;
  }

 private:
  std::map<std::string, std::string> secrets_;
};

struct IssuedToken {
  std::string token;
  ProfileId user_id;
  Timestamp expires_at;
};

class TokenStore {
 public:
  TokenStore(tasks::Clock& clock, std::chrono::milliseconds lifetime)
      : clock_(clock), lifetime_(lifetime), rng_(std::random_device{}()) {}

  IssuedToken issue(const ProfileId& user_id) {
    std::lock_guard lock(mu_);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string token;
    for (int i = 0; i < 4; ++i) {
      std::uint64_t word = rng_();
      for (int n = 0; n < 16; ++n, word >>= 4) token.push_back(kHex[word & 0xF]);
    }
    IssuedToken issued{token, user_id, clock_.now() + lifetime_};
    tokens_[token] = issued;
    return issued;
  }

  std::optional<ProfileId> authenticate(const std::string& token) {
    std::lock_guard lock(mu_);
    auto it = tokens_.find(token);
    if (it == tokens_.end()) return std::nullopt;
    if (clock_.now() >= it->second.expires_at) {
      tokens_.erase(it);
      return std::nullopt;
    }
    return it->second.user_id;
  }

 private:
  tasks::Clock& clock_;
  std::chrono::milliseconds lifetime_;
  std::mutex mu_;
  std::mt19937_64 rng_;
  std::map<std::string, IssuedToken> tokens_;
};

inline int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::validation:
    case ErrorCode::invalid_argument: return 422;
    case ErrorCode::not_found: return 404;
    case ErrorCode::forbidden: return 403;
    case ErrorCode::invalid_transition:
    case ErrorCode::conflict: return 409;
    case ErrorCode::unauthorized: return 401;
    case ErrorCode::integrity:
    case ErrorCode::io: return 500;
  }
  return 500;
}

inline json candidate_view(const recommender::ScoredCandidate& c) {
  json j = c;
  j["compatibilityLevel"] =
      personality::to_string(personality::compatibility_level(c.personality_score));
  return j;
}

inline json task_view(const tasks::TutoringTask& t) {
  json j = t;
  json recs = json::array();
  json ids = json::array();
  for (const auto& c : t.recommended) {
    recs.push_back(candidate_view(c));
    ids.push_back(c.candidate_id);
  }
  j["recommended"] = std::move(recs);
  j["recommendedIds"] = std::move(ids);
  return j;
}

class ApiService {
 public:
  ApiService(TutoringService& service, Credentials credentials, tasks::Clock& clock,
             std::chrono::milliseconds token_lifetime = std::chrono::hours{24})
      : service_(service), credentials_(std::move(credentials)), tokens_(clock, token_lifetime) {}

  Response handle(const Request& req) {
    try {
      return route(req);
    } catch (const ValidationError& e) {
      return {422, {{"error", "validation"}, {"message", e.what()}, {"violations", e.violations()}}};
    } catch (const Error& e) {
      return error(status_for(e.code()), to_string(e.code()), e.what());
    } catch (const json::exception& e) {
      return error(400, "bad-request", e.what());
    }
  }

  void mount(httplib::Server& server) {
    auto bridge = [this](const httplib::Request& in, httplib::Response& out) {
      Request req{in.method, in.path, {}, in.get_header_value("Authorization"), in.body};
      for (const auto& [k, v] : in.params) req.query[k] = v;
      const Response r = handle(req);
      out.status = r.status;
      out.set_content(r.body.dump(), "application/json");
    };
    server.Get(".*", bridge);
    server.Post(".*", bridge);
    server.Put(".*", bridge);
  }

 private:
  static Response error(int status, std::string_view code, std::string_view message) {
    return {status, {{"error", code}, {"message", message}}};
  }

  static std::vector<std::string> split(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < path.size()) {
      if (path[i] == '/') {
        ++i;
        continue;
      }
      auto j = path.find('/', i);
      if (j == std::string_view::npos) j = path.size();
      parts.emplace_back(path.substr(i, j - i));
      i = j;
    }
    return parts;
  }

  static json parse_body(const Request& req) {
    if (req.body.empty()) return json::object();
    json j = json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::validation, "body must be a JSON object");
    return j;
  }

  ProfileId authenticate(const Request& req) {
    constexpr std::string_view kBearer = "Bearer ";
    std::string_view h = req.authorization;
    if (h.substr(0, kBearer.size()) != kBearer)
      throw Error(ErrorCode::unauthorized, "missing bearer token");
    auto user = tokens_.authenticate(std::string(h.substr(kBearer.size())));
    if (!user) throw Error(ErrorCode::unauthorized, "unknown or expired token");
    return *user;
  }

  static void require_owner(const ProfileId& caller, const ProfileId& target) {
    if (caller != target) throw Error(ErrorCode::forbidden, "only the profile owner may do this");
  }

  Response route(const Request& req) {
    const auto p = split(req.path);
    const std::string& m = req.method;

    if (m == "POST" && p == std::vector<std::string>{"auth", "login"}) return login(req);

    if (p.empty() || (p[0] != "users" && p[0] != "tasks"))
      return error(404, "not-found", "no route " + req.path);

    // Authentication precedes any body parsing or domain access.
    const ProfileId caller = authenticate(req);

    if (p[0] == "users") {
      if (p.size() == 1 && m == "POST") {
        auto profile = parse_body(req).get<StudentProfile>();
        if (profile.id.empty()) profile.id = caller;
        require_owner(caller, profile.id);
        return {201, service_.create_profile(profile)};
      }
      if (p.size() == 2 && m == "GET") return {200, service_.get_profile(p[1])};
      if (p.size() == 2 && m == "PUT") {
        require_owner(caller, p[1]);
        auto profile = parse_body(req).get<StudentProfile>();
        if (profile.id.empty()) profile.id = p[1];
        if (profile.id != p[1])
          throw Error(ErrorCode::validation, "body id does not match path id");
        return {200, service_.update_profile(profile)};
      }
      if (p.size() == 3 && p[2] == "questionnaire" && m == "POST") {
        require_owner(caller, p[1]);
        const json body = parse_body(req);
        const auto& answers = json_detail::member(body, "answers");
        if (!answers.is_array()) throw Error(ErrorCode::validation, "answers must be an array");
        std::vector<int> values;
        for (const auto& a : answers) {
          if (!a.is_number_integer())
            throw Error(ErrorCode::validation, "answers must be integers");
          values.push_back(a.get<int>());
        }
        return {200, service_.submit_questionnaire(p[1], values)};
      }
      if (p.size() == 3 && p[2] == "notifications" && m == "GET") {
        require_owner(caller, p[1]);
        auto it = req.query.find("unreadOnly");
        const bool unread = it != req.query.end() && (it->second == "true" || it->second == "1");
        return {200, service_.list_notifications(p[1], unread)};
      }
      if (p.size() == 5 && p[2] == "notifications" && p[4] == "read" && m == "POST") {
        require_owner(caller, p[1]);
        return {200, service_.mark_read(p[1], p[3])};
      }
    } else {
      if (p.size() == 1 && m == "POST") {
        const json body = parse_body(req);
        const auto pref = json_detail::member(body, "preference").get<PersonalityPreference>();
        const auto subject = json_detail::string_or(body, "subject");
        if (subject.empty()) throw Error(ErrorCode::validation, "subject must be non-empty");
        auto task = service_.create_task(caller, subject, pref,
                                         json_detail::string_or(body, "description"));
        return {201, task_view(task)};
      }
      if (p.size() == 2 && m == "GET") return {200, task_view(service_.get_task(p[1]))};
      if (p.size() == 3 && p[2] == "transactions" && m == "POST") {
        const json body = parse_body(req);
        const auto actor = json_detail::string_or(body, "actorId", caller);
        if (actor != caller) throw Error(ErrorCode::forbidden, "actor must be the token owner");
        const auto kind = json_detail::member(body, "kind").get<tasks::TransactionKind>();
        auto attributes = body.value("attributes", std::map<std::string, std::string>{});
        return {200, task_view(service_.apply(p[1], caller, kind, std::move(attributes)))};
      }
      if (p.size() == 3 && p[2] == "recommendations" && m == "GET") {
        const auto task = service_.get_task(p[1]);
        json recs = json::array();
        for (const auto& c : task.recommended) recs.push_back(candidate_view(c));
        return {200, {{"taskId", task.id}, {"recommendations", recs}}};
      }
    }
    return error(404, "not-found", "no route " + m + " " + req.path);
  }

  Response login(const Request& req) {
    const json body = parse_body(req);
    const auto user = json_detail::string_or(body, "userId");
    const auto secret = json_detail::string_or(body, "secret");
    if (!credentials_.verify(user, secret)) return error(401, "unauthorized", "bad credentials");
    const auto t = tokens_.issue(user);
    return {200, {{"token", t.token}, {"userId", t.user_id}, {"expiresAt", format_timestamp(t.expires_at)}}};
  }

  TutoringService& service_;
  Credentials credentials_;
  TokenStore tokens_;
};

}  // namespace sostutor::api
