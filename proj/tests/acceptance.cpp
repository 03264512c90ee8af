// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "sostutor/api.hpp"
#include "sostutor/geo.hpp"
#include "sostutor/recommender.hpp"
#include "sostutor/simulator.hpp"
#include "sostutor/store.hpp"
#include "sostutor/tutoring_service.hpp"
#include "support/oracles.hpp"
#include "support/scenarios.hpp"

using namespace sostutor;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& criterion) {
  Outcome o;
  try {
    o = criterion();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %s : %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

recommender::RecommendationQuery query_for(const std::vector<StudentProfile>& pop, std::size_t requester,
                                           const SubjectId& subject, PersonalityPreference pref) {
  recommender::RecommendationQuery q;
  q.requester = pop[requester];
  q.subject = subject;
  q.preference = pref;
  for (std::size_t i = 0; i < pop.size(); ++i)
    if (i != requester) q.candidate_pool.push_back(pop[i]);
  return q;
}

std::size_t near_count(const recommender::RecommendationQuery& q, bool strictly_better_only) {
  const double own = q.requester.competence_in(q.subject);
  std::size_t n = 0;
  for (const auto& c : q.candidate_pool) {
    if (geo::distance_meters(q.requester.location, c.location) > geo::kNearLimitM) continue;
    if (strictly_better_only && !(c.competence_in(q.subject) > own)) continue;
    ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------

Outcome five_recommendations() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<std::size_t> size(10, 80);
  std::size_t populations = 0, short_lists = 0, attempts = 0;
  while (populations < 1000) {
    ++attempts;
    sim::GeneratorSpec spec;
    spec.count = size(rng);
    const auto pop = sim::generate_population(spec, rng());
    const std::size_t requester = rng() % pop.size();
    const auto pref = static_cast<PersonalityPreference>(rng() % 3);
    const auto q = query_for(pop, requester, spec.subjects[rng() % spec.subjects.size()], pref);
    if (near_count(q, false) < 5) continue;
    ++populations;
    if (recommender::recommend(q).size() != 5) ++short_lists;
  }
  const double secs = seconds_since(start);
  return {short_lists == 0 && secs < 10.0,
          fmt("%zu populations (%zu drawn), %zu lists not of length 5, %.2fs (limit 10s)", populations,
              attempts, short_lists, secs)};
}

Outcome hard_constraints() {
  std::mt19937_64 rng(2002);
  std::uniform_int_distribution<std::size_t> size(20, 120);
  std::size_t checked = 0, violations = 0, entries = 0;
  for (int i = 0; i < 3000; ++i) {
    sim::GeneratorSpec spec;
    spec.count = size(rng);
    const auto pop = sim::generate_population(spec, rng());
    const auto q = query_for(pop, rng() % pop.size(), "calculus",
                             static_cast<PersonalityPreference>(rng() % 3));
    if (near_count(q, true) < 5) continue;
    const auto list = recommender::recommend(q);
    if (std::any_of(list.begin(), list.end(), [](const auto& c) { return c.diversified; })) continue;
    ++checked;
    const double own = q.requester.competence_in(q.subject);
    for (const auto& c : list) {
      ++entries;
      if (!(c.competence > own) || c.distance_m > geo::kNearLimitM) ++violations;
    }
  }
  return {violations == 0 && checked > 0,
          fmt("%zu qualifying instances, %zu entries, %zu violations (tolerance 0)", checked, entries,
              violations)};
}

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(3003);
  std::size_t mismatches = 0, diversified = 0, total_entries = 0;
  for (int i = 0; i < 500; ++i) {
    auto in = oracle::random_instance(rng, 200);
    const auto got = recommender::recommend({in.requester, in.subject, in.preference, in.pool});
    const auto want = oracle::brute_force_recommend(in.requester, in.subject, in.preference, in.pool);
    bool same = got.size() == want.size();
    for (std::size_t k = 0; same && k < got.size(); ++k)
      same = got[k].candidate_id == want[k].id && got[k].diversified == want[k].diversified;
    if (!same) ++mismatches;
    total_entries += got.size();
    for (const auto& c : got) diversified += c.diversified;
  }
  const double secs = seconds_since(start);
  return {mismatches == 0 && secs < 60.0,
          fmt("500 instances, %zu mismatches, %zu entries (%zu diversified), %.2fs (limit 60s)", mismatches,
              total_entries, diversified, secs)};
}

Outcome preference_separation() {
  std::mt19937_64 rng(4004);
  int wins = 0;
  for (int pair = 0; pair < 100; ++pair) {
    sim::GeneratorSpec spec;
    spec.count = 60;
    const auto pop = sim::generate_population(spec, rng());
    const std::size_t requester = rng() % pop.size();
    auto mean_similarity = [&](PersonalityPreference pref) {
      const auto list = recommender::recommend(query_for(pop, requester, "calculus", pref));
      double s = 0.0;
      for (const auto& c : list) s += personality::similarity(pop[requester].traits, [&] {
        for (const auto& p : pop)
          if (p.id == c.candidate_id) return p.traits;
        return TraitVector{};
      }());
      return list.empty() ? 0.0 : s / static_cast<double>(list.size());
    };
    if (mean_similarity(PersonalityPreference::similar) > mean_similarity(PersonalityPreference::different))
      ++wins;
  }
  return {wins >= 95, fmt("similar beat different in %d of 100 paired runs (need >= 95)", wins)};
}

Outcome haversine_accuracy() {
  // WGS84 geodesic distances (Karney's algorithm, GeographicLib).
  struct Pair {
    const char* name;
    GeoPoint a, b;
    double geodesic_m;
  };
  const Pair pairs[] = {
      {"Asuncion-Encarnacion", {-25.2637, -57.5759}, {-27.3306, -55.8667}, 285601.818},
      {"Asuncion-Buenos Aires", {-25.2637, -57.5759}, {-34.6037, -58.3816}, 1038268.423},
      {"London-Paris", {51.5074, -0.1278}, {48.8566, 2.3522}, 343923.120},
  };
  std::string detail;
  bool ok = true;
  for (const auto& p : pairs) {
    const double d = geo::distance_meters(p.a, p.b);
    const double rel = std::abs(d - p.geodesic_m) / p.geodesic_m;
    ok = ok && rel < 0.005;
    detail += fmt("%s %.3f%%; ", p.name, rel * 100.0);
  }
  const bool boundary = geo::classify_proximity(500.0) == geo::ProximityClass::near &&
                        geo::classify_proximity(std::nextafter(500.0, 1e9)) == geo::ProximityClass::far &&
                        geo::classify_proximity(std::nextafter(500.0, 0.0)) == geo::ProximityClass::near;
  detail += boundary ? "500.0 m near, next double far" : "boundary classification wrong";
  return {ok && boundary, detail + " (limit 0.5%)"};
}

Outcome state_machine_safety() {
  std::mt19937_64 rng(6006);
  const std::vector<std::string> actors = {"req", "t0", "t1", "t2", "t3", "t4", "outsider"};
  std::size_t accepted = 0, rejected = 0, invariant_failures = 0, trace_failures = 0, replay_failures = 0,
              mutation_failures = 0;
  for (int seq = 0; seq < 10000; ++seq) {
    store::EventLog log;
    tasks::ManualClock clock;
    TutoringService svc(log, clock);
    for (std::size_t i = 0; i < actors.size(); ++i) {
      StudentProfile p;
      p.id = actors[i];
      p.gender = i % 2 ? Gender::male : Gender::female;
      p.location = {-25.3206 + 0.0003 * double(i % 3), -57.6358};
      p.competences["calculus"] = i == 0 ? 0.1 : (i == 6 ? 0.0 : 0.2 + 0.1 * double(i));
      svc.create_profile(p);
    }
    const std::size_t n_tasks = 1 + rng() % 2;
    std::vector<std::string> task_ids;
    for (std::size_t t = 0; t < n_tasks; ++t)
      task_ids.push_back(svc.create_task("req", "calculus", PersonalityPreference::similar, "").id);

    const int steps = 1 + int(rng() % 20);
    for (int s = 0; s < steps; ++s) {
      const auto& task_id = task_ids[rng() % task_ids.size()];
      const auto kind = static_cast<tasks::TransactionKind>(1 + rng() % 4);
      const auto& actor = actors[rng() % actors.size()];
      std::map<std::string, std::string> attrs;
      if (kind == tasks::TransactionKind::best_response) attrs["chosenTutorId"] = actors[rng() % actors.size()];
      const auto before = svc.get_task(task_id);
      const auto log_before = log.last_seq();
      try {
        svc.apply(task_id, actor, kind, attrs);
        ++accepted;
      } catch (const Error&) {
        ++rejected;
        if (svc.get_task(task_id) != before || log.last_seq() != log_before) ++mutation_failures;
      }
      if (!tasks::check_invariants(svc.get_task(task_id)).empty()) ++invariant_failures;
    }
    for (const auto& id : task_ids) {
      const auto t = svc.get_task(id);
      for (std::size_t k = 0; k < t.history.size(); ++k) {
        if (t.history[k].kind != tasks::TransactionKind::best_response) continue;
        const auto& chosen = t.history[k].attributes.at("chosenTutorId");
        const bool preceded = std::any_of(t.history.begin(), t.history.begin() + long(k), [&](const auto& x) {
          return x.kind == tasks::TransactionKind::volunteer && x.actor_id == chosen;
        });
        if (!preceded) ++trace_failures;
      }
    }
    std::vector<store::EventRecord> decoded;
    for (const auto& r : log.snapshot()) decoded.push_back(store::decode(store::encode(r), r.global_seq));
    if (store::canonical(store::replay(decoded)) != store::canonical(svc.snapshot())) ++replay_failures;
  }
  const bool ok = invariant_failures == 0 && trace_failures == 0 && replay_failures == 0 && mutation_failures == 0;
  return {ok, fmt("10000 sequences, %zu accepted / %zu rejected txns; invariant %zu, trace %zu, "
                  "rejected-mutation %zu, replay %zu failures",
                  accepted, rejected, invariant_failures, trace_failures, mutation_failures, replay_failures)};
}

Outcome api_controller_sequence() {
  store::EventLog log;
  tasks::SystemClock clock;
  TutoringService svc(log, clock);
  std::map<std::string, std::string> secrets = {{"req", "s-req"}};
  for (int i = 0; i < 5; ++i) secrets["t" + std::to_string(i)] = "s-t" + std::to_string(i);
  api::ApiService service(svc, api::Credentials(secrets), clock);

  httplib::Server server;
  service.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);

  std::vector<std::string> failed;
  int calls = 0;
  auto expect = [&](const std::string& step, const httplib::Result& res, int status) -> json {
    ++calls;
    if (!res || res->status != status) {
      failed.push_back(step + " (got " + (res ? std::to_string(res->status) : std::string("no response")) + ")");
      return json();
    }
    return json::parse(res->body.empty() ? "null" : res->body);
  };
  auto headers = [](const std::string& token) { return httplib::Headers{{"Authorization", "Bearer " + token}}; };
  const std::string ct = "application/json";

  // Auth controller
  expect("login with bad secret", client.Post("/auth/login", json{{"userId", "req"}, {"secret", "x"}}.dump(), ct), 401);
  std::map<std::string, std::string> tokens;
  for (const auto& [user, secret] : secrets) {
    auto j = expect("login " + user, client.Post("/auth/login", json{{"userId", user}, {"secret", secret}}.dump(), ct), 200);
    if (j.is_object()) tokens[user] = j.at("token");
  }
  if (tokens.size() != secrets.size()) failed.push_back("missing tokens");

  // User controller
  expect("create profile without token", client.Post("/users", json{{"location", {{"latitudeDeg", 0}, {"longitudeDeg", 0}}}}.dump(), ct), 401);
  int i = 0;
  for (const auto& [user, token] : tokens) {
    json body = {{"id", user},
                 {"displayName", user},
                 {"gender", i % 2 ? "male" : "female"},
                 {"location", {{"latitudeDeg", -25.3206 + 0.0002 * i}, {"longitudeDeg", -57.6358}}},
                 {"competences", {{"calculus", user == "req" ? 0.2 : 0.5 + 0.08 * i}}}};
    expect("create profile " + user, client.Post("/users", headers(token), body.dump(), ct), 201);
    expect("questionnaire " + user,
           client.Post("/users/" + user + "/questionnaire", headers(token),
                       json{{"answers", {1 + i % 5, 3, 4, 2, 5 - i % 5, 3, 2, 4, 3, 3}}}.dump(), ct),
           200);
    ++i;
  }
  expect("read profile", client.Get("/users/t1", headers(tokens["req"])), 200);
  json bad = {{"location", {{"latitudeDeg", 91}, {"longitudeDeg", 0}}}};
  expect("invalid update", client.Put("/users/req", headers(tokens["req"]), bad.dump(), ct), 422);
  expect("foreign update", client.Put("/users/t1", headers(tokens["req"]), bad.dump(), ct), 403);
  expect("missing profile", client.Get("/users/ghost", headers(tokens["req"])), 404);

  // Task controller
  auto task = expect("create task", client.Post("/tasks", headers(tokens["req"]),
                                                json{{"subject", "calculus"}, {"preference", "similar"},
                                                     {"description", "integrals before the exam"}}.dump(), ct),
                     201);
  std::string task_id = task.is_object() ? task.at("id").get<std::string>() : "task-1";
  if (!task.is_object() || task.at("recommendedIds").size() != 5) failed.push_back("five recommended ids");
  const std::string tx = "/tasks/" + task_id + "/transactions";
  expect("bestResponse before volunteer",
         client.Post(tx, headers(tokens["req"]), json{{"kind", "bestResponse"}, {"attributes", {{"chosenTutorId", "t0"}}}}.dump(), ct),
         409);
  expect("tutor inbox", client.Get("/users/t2/notifications", headers(tokens["t2"])), 200);
  expect("volunteer t2", client.Post(tx, headers(tokens["t2"]), json{{"kind", "volunteer"}}.dump(), ct), 200);
  expect("decline t3", client.Post(tx, headers(tokens["t3"]), json{{"kind", "decline"}}.dump(), ct), 200);
  expect("recommendations", client.Get("/tasks/" + task_id + "/recommendations", headers(tokens["req"])), 200);
  expect("requester inbox", client.Get("/users/req/notifications?unreadOnly=true", headers(tokens["req"])), 200);
  auto done = expect("bestResponse",
                     client.Post(tx, headers(tokens["req"]),
                                 json{{"kind", "bestResponse"}, {"attributes", {{"chosenTutorId", "t2"}}}}.dump(), ct),
                     200);
  if (!done.is_object() || done.at("state") != "completed") failed.push_back("task completed");
  expect("read task", client.Get("/tasks/" + task_id, headers(tokens["t2"])), 200);
  expect("volunteer after completion", client.Post(tx, headers(tokens["t4"]), json{{"kind", "volunteer"}}.dump(), ct), 409);
  expect("unknown task", client.Get("/tasks/task-999", headers(tokens["req"])), 404);

  server.stop();
  th.join();
  std::string detail = fmt("%d HTTP calls, %zu unexpected statuses", calls, failed.size());
  for (const auto& f : failed) detail += "; " + f;
  return {failed.empty(), detail};
}

Outcome simulator_determinism() {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("sostutor-acceptance-" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  const auto file = dir / "scenario.json";
  {
    std::ofstream out(file);
    out << sim::to_json_value(sim::make_scenario(43, 2023)).dump(2);
  }
  auto run_file = [&] {
    std::ifstream in(file);
    return sim::report_text(sim::run_scenario(sim::parse_scenario(json::parse(in))));
  };
  const auto a = run_file();
  const auto b = run_file();
  std::filesystem::remove_all(dir);
  const auto constructed = sim::run_scenario(scenarios::all_eligible()).metrics.competence_satisfaction;
  const bool ok = a == b && constructed && *constructed == 1.0;
  return {ok, fmt("reports %s (%zu bytes); all-eligible competenceSatisfaction = %s",
                  a == b ? "byte-identical" : "DIFFER", a.size(),
                  constructed ? fmt("%.4f", *constructed).c_str() : "n/a")};
}

}  // namespace

int main() {
  report("five-recommendation contract", five_recommendations);
  report("hard-constraint suite", hard_constraints);
  report("oracle equivalence", oracle_equivalence);
  report("preference separation", preference_separation);
  report("haversine accuracy", haversine_accuracy);
  report("state-machine safety", state_machine_safety);
  report("API controller sequence", api_controller_sequence);
  report("simulator determinism", simulator_determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
