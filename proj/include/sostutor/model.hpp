#pragma once

// Shared domain types for student profiles and their validation.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sostutor/error.hpp"

namespace sostutor {

using ProfileId = std::string;
using SubjectId = std::string;
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

enum class Gender { female, male, nonbinary, undisclosed };

enum class PersonalityPreference { similar, different, indifferent };

struct GeoPoint {
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

// Big Five scores, each normalized to [0,1]. Emotional stability is stored
// with higher meaning more stable.
struct TraitVector {
  static constexpr std::size_t kTraitCount = 5;

  double extraversion = 0.5;
  double agreeableness = 0.5;
  double conscientiousness = 0.5;
  double emotional_stability = 0.5;
  double openness = 0.5;

  std::array<double, kTraitCount> as_array() const {
    return {extraversion, agreeableness, conscientiousness, emotional_stability, openness};
  }

  static TraitVector from_array(const std::array<double, kTraitCount>& v) {
    return {v[0], v[1], v[2], v[3], v[4]};
  }

  static constexpr std::array<std::string_view, kTraitCount> names() {
    return {"extraversion", "agreeableness", "conscientiousness", "emotionalStability",
            "openness"};
  }

  friend bool operator==(const TraitVector&, const TraitVector&) = default;
};

struct StudentProfile {
  ProfileId id;
  std::string display_name;
  Gender gender = Gender::undisclosed;
  GeoPoint location;
  TraitVector traits;
  std::map<SubjectId, double> competences;

  // Missing subjects count as level 0.
  double competence_in(const SubjectId& subject) const {
    auto it = competences.find(subject);
    return it == competences.end() ? 0.0 : it->second;
  }

  friend bool operator==(const StudentProfile&, const StudentProfile&) = default;
};

struct Violation {
  std::string field;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

// Carries the full violation list of a rejected value.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : Error(ErrorCode::validation, summarize(violations)), violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  static std::string summarize(const std::vector<Violation>& v) {
    std::string out = "invalid profile";
    for (const auto& x : v) out += "; " + x.field + ": " + x.message;
    return out;
  }

  std::vector<Violation> violations_;
};

inline bool in_unit_interval(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

inline bool valid_geo_point(const GeoPoint& p) {
  return std::isfinite(p.latitude_deg) && std::isfinite(p.longitude_deg) &&
         p.latitude_deg >= -90.0 && p.latitude_deg <= 90.0 && p.longitude_deg >= -180.0 &&
         p.longitude_deg <= 180.0;
}

inline bool valid_traits(const TraitVector& t) {
  for (double v : t.as_array()) {
    if (!in_unit_interval(v)) return false;
  }
  return true;
}

// Uniqueness of ids is enforced by the profile store, not here.
inline std::vector<Violation> validate_profile(const StudentProfile& profile) {
  std::vector<Violation> out;
  if (profile.id.empty()) out.push_back({"id", "id must be non-empty"});

  const auto& p = profile.location;
  if (!std::isfinite(p.latitude_deg) || p.latitude_deg < -90.0 || p.latitude_deg > 90.0)
    out.push_back({"location.latitudeDeg", "latitude out of range"});
  if (!std::isfinite(p.longitude_deg) || p.longitude_deg < -180.0 || p.longitude_deg > 180.0)
    out.push_back({"location.longitudeDeg", "longitude out of range"});

  const auto values = profile.traits.as_array();
  const auto names = TraitVector::names();
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!in_unit_interval(values[k]))
      out.push_back({"traits." + std::string(names[k]), "trait out of [0,1]"});
  }

  for (const auto& [subject, level] : profile.competences) {
    if (subject.empty()) out.push_back({"competences", "subject id must be non-empty"});
    if (!in_unit_interval(level))
      out.push_back({"competences." + subject, "competence out of [0,1]"});
  }
  return out;
}

// ---- enum text forms (used by every serialized surface) ----

inline const char* to_string(Gender g) {
  switch (g) {
    case Gender::female: return "female";
    case Gender::male: return "male";
    case Gender::nonbinary: return "nonbinary";
    case Gender::undisclosed: return "undisclosed";
  }
  return "undisclosed";
}

inline std::optional<Gender> parse_gender(std::string_view s) {
  if (s == "female") return Gender::female;
  if (s == "male") return Gender::male;
  if (s == "nonbinary") return Gender::nonbinary;
  if (s == "undisclosed") return Gender::undisclosed;
  return std::nullopt;
}

inline const char* to_string(PersonalityPreference p) {
  switch (p) {
    case PersonalityPreference::similar: return "similar";
    case PersonalityPreference::different: return "different";
    case PersonalityPreference::indifferent: return "indifferent";
  }
  return "indifferent";
}

inline std::optional<PersonalityPreference> parse_preference(std::string_view s) {
  if (s == "similar") return PersonalityPreference::similar;
  if (s == "different") return PersonalityPreference::different;
  if (s == "indifferent") return PersonalityPreference::indifferent;
  return std::nullopt;
}

// ---- timestamps: ISO-8601 UTC with millisecond precision ----

inline std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), int(hms.hours().count()),
                int(hms.minutes().count()), int(hms.seconds().count()),
                int(hms.subseconds().count()));
  return buf;
}

inline Timestamp parse_timestamp(const std::string& s) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, ms = 0;
  char z = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3d%c", &y, &mo, &d, &h, &mi, &sec, &ms,
                  &z) != 8 ||
      z != 'Z') {
    throw Error(ErrorCode::validation, "malformed timestamp: " + s);
  }
  const year_month_day ymd{year{y}, month{unsigned(mo)}, day{unsigned(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 59)
    throw Error(ErrorCode::validation, "malformed timestamp: " + s);
  return Timestamp{sys_days{ymd}.time_since_epoch() + hours{h} + minutes{mi} + seconds{sec} +
                   milliseconds{ms}};
}

}  // namespace sostutor
