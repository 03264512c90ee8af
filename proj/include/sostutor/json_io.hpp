#pragma once

// JSON forms of the domain values. Field names are camelCase on the wire.
// Decoding failures surface as Error(validation).

#include <nlohmann/json.hpp>

#include "sostutor/error.hpp"
#include "sostutor/model.hpp"
#include "sostutor/personality.hpp"
#include "sostutor/recommender.hpp"
#include "sostutor/task_engine.hpp"

namespace sostutor {

using json = nlohmann::json;

namespace json_detail {

template <typename T, typename Parse>
T parse_enum(const json& j, const char* what, Parse parse) {
  if (!j.is_string()) throw Error(ErrorCode::validation, std::string(what) + " must be a string");
  auto v = parse(j.get<std::string>());
  if (!v) throw Error(ErrorCode::validation, "unknown " + std::string(what) + ": " + j.get<std::string>());
  return *v;
}

inline double number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number())
    throw Error(ErrorCode::validation, std::string(key) + " must be a number");
  return it->get<double>();
}

inline std::string string_or(const json& j, const char* key, std::string fallback = {}) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_string()) throw Error(ErrorCode::validation, std::string(key) + " must be a string");
  return it->get<std::string>();
}

inline const json& member(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::validation, std::string("missing field ") + key);
  return *it;
}

}  // namespace json_detail

inline void to_json(json& j, Gender g) { j = to_string(g); }
inline void from_json(const json& j, Gender& g) {
  g = json_detail::parse_enum<Gender>(j, "gender", parse_gender);
}

inline void to_json(json& j, PersonalityPreference p) { j = to_string(p); }
inline void from_json(const json& j, PersonalityPreference& p) {
  p = json_detail::parse_enum<PersonalityPreference>(j, "preference", parse_preference);
}

inline void to_json(json& j, const GeoPoint& p) {
  j = {{"latitudeDeg", p.latitude_deg}, {"longitudeDeg", p.longitude_deg}};
}
inline void from_json(const json& j, GeoPoint& p) {
  if (!j.is_object()) throw Error(ErrorCode::validation, "location must be an object");
  p.latitude_deg = json_detail::number(j, "latitudeDeg");
  p.longitude_deg = json_detail::number(j, "longitudeDeg");
}

inline void to_json(json& j, const TraitVector& t) {
  j = json::object();
  const auto v = t.as_array();
  const auto names = TraitVector::names();
  for (std::size_t k = 0; k < v.size(); ++k) j[std::string(names[k])] = v[k];
}
inline void from_json(const json& j, TraitVector& t) {
  if (!j.is_object()) throw Error(ErrorCode::validation, "traits must be an object");
  std::array<double, TraitVector::kTraitCount> v{};
  const auto names = TraitVector::names();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = json_detail::number(j, std::string(names[k]).c_str());
  t = TraitVector::from_array(v);
}

inline void to_json(json& j, const StudentProfile& p) {
  j = {{"id", p.id},
       {"displayName", p.display_name},
       {"gender", p.gender},
       {"location", p.location},
       {"traits", p.traits},
       {"competences", p.competences}};
}
inline void from_json(const json& j, StudentProfile& p) {
  if (!j.is_object()) throw Error(ErrorCode::validation, "profile must be an object");
  p.id = json_detail::string_or(j, "id");
  p.display_name = json_detail::string_or(j, "displayName");
  p.gender = j.contains("gender") ? j.at("gender").get<Gender>() : Gender::undisclosed;
  p.location = json_detail::member(j, "location").get<GeoPoint>();
  p.traits = j.contains("traits") ? j.at("traits").get<TraitVector>() : TraitVector{};
  p.competences.clear();
  if (j.contains("competences")) {
    const auto& c = j.at("competences");
    if (!c.is_object()) throw Error(ErrorCode::validation, "competences must be an object");
    for (auto it = c.begin(); it != c.end(); ++it) {
      if (!it->is_number()) throw Error(ErrorCode::validation, "competence levels must be numbers");
      p.competences[it.key()] = it->get<double>();
    }
  }
}

inline void to_json(json& j, const Violation& v) { j = {{"field", v.field}, {"message", v.message}}; }

namespace recommender {

inline void to_json(json& j, const ScoredCandidate& s) {
  j = {{"candidateId", s.candidate_id},
       {"tier", s.tier},
       {"competence", s.competence},
       {"distanceM", s.distance_m},
       {"similarity", s.similarity},
       {"personalityScore", s.personality_score},
       {"gender", s.gender},
       {"diversified", s.diversified}};
}
inline void from_json(const json& j, ScoredCandidate& s) {
  s.candidate_id = json_detail::string_or(j, "candidateId");
  s.tier = json_detail::member(j, "tier").get<int>();
  s.competence = json_detail::number(j, "competence");
  s.distance_m = json_detail::number(j, "distanceM");
  s.similarity = json_detail::number(j, "similarity");
  s.personality_score = json_detail::number(j, "personalityScore");
  s.gender = json_detail::member(j, "gender").get<Gender>();
  s.diversified = json_detail::member(j, "diversified").get<bool>();
}

}  // namespace recommender

namespace tasks {

inline void to_json(json& j, TaskState s) { j = to_string(s); }
inline void from_json(const json& j, TaskState& s) {
  s = json_detail::parse_enum<TaskState>(j, "task state", parse_task_state);
}
inline void to_json(json& j, TransactionKind k) { j = to_string(k); }
inline void from_json(const json& j, TransactionKind& k) {
  k = json_detail::parse_enum<TransactionKind>(j, "transaction kind", parse_transaction_kind);
}
inline void to_json(json& j, NotificationKind k) { j = to_string(k); }
inline void from_json(const json& j, NotificationKind& k) {
  k = json_detail::parse_enum<NotificationKind>(j, "notification kind", parse_notification_kind);
}
inline void to_json(json& j, ResponseKind r) { j = to_string(r); }
inline void from_json(const json& j, ResponseKind& r) {
  const auto s = j.get<std::string>();
  if (s == "volunteered") r = ResponseKind::volunteered;
  else if (s == "declined") r = ResponseKind::declined;
  else throw Error(ErrorCode::validation, "unknown response: " + s);
}

inline void to_json(json& j, const TaskTransaction& t) {
  j = {{"seq", t.seq},
       {"taskId", t.task_id},
       {"actorId", t.actor_id},
       {"kind", t.kind},
       {"attributes", t.attributes},
       {"at", format_timestamp(t.at)}};
}
inline void from_json(const json& j, TaskTransaction& t) {
  t.seq = json_detail::member(j, "seq").get<std::uint64_t>();
  t.task_id = json_detail::string_or(j, "taskId");
  t.actor_id = json_detail::string_or(j, "actorId");
  t.kind = json_detail::member(j, "kind").get<TransactionKind>();
  t.attributes = j.value("attributes", std::map<std::string, std::string>{});
  t.at = parse_timestamp(json_detail::member(j, "at").get<std::string>());
}

inline void to_json(json& j, const Notification& n) {
  j = {{"id", n.id},
       {"recipientId", n.recipient_id},
       {"taskId", n.task_id},
       {"kind", n.kind},
       {"at", format_timestamp(n.at)},
       {"read", n.read}};
}
inline void from_json(const json& j, Notification& n) {
  n.id = json_detail::string_or(j, "id");
  n.recipient_id = json_detail::string_or(j, "recipientId");
  n.task_id = json_detail::string_or(j, "taskId");
  n.kind = json_detail::member(j, "kind").get<NotificationKind>();
  n.at = parse_timestamp(json_detail::member(j, "at").get<std::string>());
  n.read = json_detail::member(j, "read").get<bool>();
}

inline void to_json(json& j, const TutoringTask& t) {
  j = {{"id", t.id},
       {"requesterId", t.requester_id},
       {"subject", t.subject},
       {"preference", t.preference},
       {"description", t.description},
       {"createdAt", format_timestamp(t.created_at)},
       {"state", t.state},
       {"recommended", t.recommended},
       {"responses", t.responses},
       {"selectedTutorId", t.selected_tutor_id ? json(*t.selected_tutor_id) : json(nullptr)},
       {"history", t.history}};
}
inline void from_json(const json& j, TutoringTask& t) {
  t.id = json_detail::string_or(j, "id");
  t.requester_id = json_detail::string_or(j, "requesterId");
  t.subject = json_detail::string_or(j, "subject");
  t.preference = json_detail::member(j, "preference").get<PersonalityPreference>();
  t.description = json_detail::string_or(j, "description");
  t.created_at = parse_timestamp(json_detail::member(j, "createdAt").get<std::string>());
  t.state = json_detail::member(j, "state").get<TaskState>();
  t.recommended = json_detail::member(j, "recommended").get<recommender::RecommendationList>();
  t.responses = j.value("responses", std::map<ProfileId, ResponseKind>{});
  const auto& sel = j.contains("selectedTutorId") ? j.at("selectedTutorId") : json(nullptr);
  t.selected_tutor_id = sel.is_null() ? std::nullopt : std::optional<ProfileId>(sel.get<std::string>());
  t.history = j.value("history", std::vector<TaskTransaction>{});
}

}  // namespace tasks

}  // namespace sostutor
