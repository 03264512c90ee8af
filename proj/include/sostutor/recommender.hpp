#pragma once

// Tutor recommendation: competence/proximity tiers, personality ranking
// inside a tier, and a single gender-diversification swap.

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "sostutor/error.hpp"
#include "sostutor/geo.hpp"
#include "sostutor/model.hpp"
#include "sostutor/personality.hpp"

namespace sostutor::recommender {

inline constexpr std::size_t kListSize = 5;

struct RecommendationQuery {
  StudentProfile requester;
  SubjectId subject;
  PersonalityPreference preference = PersonalityPreference::indifferent;
  std::vector<StudentProfile> candidate_pool;
};

struct ScoredCandidate {
  ProfileId candidate_id;
  // 1: strictly better and near; 2: equal and near; 3: below and near.
  // A diversified entry is far and strictly better; it carries tier 1.
  int tier = 3;
  double competence = 0.0;
  double distance_m = 0.0;
  double similarity = 0.0;
  double personality_score = 0.0;
  Gender gender = Gender::undisclosed;
  bool diversified = false;

  friend bool operator==(const ScoredCandidate&, const ScoredCandidate&) = default;
};

using RecommendationList = std::vector<ScoredCandidate>;

// nullopt means excluded: far candidates only enter through diversification.
inline std::optional<int> assign_tier(double requester_level, double candidate_level,
                                      geo::ProximityClass prox) {
  if (prox == geo::ProximityClass::far) return std::nullopt;
  if (candidate_level > requester_level) return 1;
  if (candidate_level == requester_level) return 2;
  return 3;
}

namespace detail {

inline ScoredCandidate score(const RecommendationQuery& q, const StudentProfile& c) {
  ScoredCandidate s;
  s.candidate_id = c.id;
  s.competence = c.competence_in(q.subject);
  s.distance_m = geo::distance_meters(q.requester.location, c.location);
  s.similarity = personality::similarity(q.requester.traits, c.traits);
  s.personality_score = personality::preference_score(q.preference, s.similarity);
  s.gender = c.gender;
  const double own = q.requester.competence_in(q.subject);
  s.tier = assign_tier(own, s.competence, geo::classify_proximity(s.distance_m)).value_or(0);
  return s;
}

// Ordering inside a tier (and among diversification targets).
inline bool better_within_tier(const ScoredCandidate& a, const ScoredCandidate& b) {
  if (a.personality_score != b.personality_score) return a.personality_score > b.personality_score;
  if (a.competence != b.competence) return a.competence > b.competence;
  if (a.distance_m != b.distance_m) return a.distance_m < b.distance_m;
  return a.candidate_id < b.candidate_id;
}

}  // namespace detail

// Total order of a ranked list: tier, then personality score, competence,
// distance and finally id.
inline bool ranks_before(const ScoredCandidate& a, const ScoredCandidate& b) {
  if (a.tier != b.tier) return a.tier < b.tier;
  return detail::better_within_tier(a, b);
}

inline void validate_query(const RecommendationQuery& q) {
  if (q.subject.empty()) throw Error(ErrorCode::invalid_argument, "subject must be non-empty");
  std::set<std::string_view> seen;
  for (const auto& c : q.candidate_pool) {
    if (c.id == q.requester.id)
      throw Error(ErrorCode::invalid_argument, "requester present in candidate pool");
    if (!seen.insert(c.id).second)
      throw Error(ErrorCode::invalid_argument, "duplicate candidate id: " + c.id);
  }
}

// Near candidates only, lowest tier first, at most kListSize entries.
inline RecommendationList rank_candidates(const RecommendationQuery& q) {
  validate_query(q);
  RecommendationList near;
  near.reserve(q.candidate_pool.size());
  for (const auto& c : q.candidate_pool) {
    auto s = detail::score(q, c);
    if (s.tier != 0) near.push_back(std::move(s));
  }
  const auto keep = std::min(near.size(), kListSize);
  std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(keep), near.end(),
                    ranks_before);
  near.resize(keep);
  return near;
}

inline bool single_declared_gender(const RecommendationList& list) {
  if (list.size() < 2) return false;
  const Gender g = list.front().gender;
  if (g == Gender::undisclosed) return false;
  return std::all_of(list.begin(), list.end(),
                     [g](const ScoredCandidate& s) { return s.gender == g; });
}

// Swaps the last entry of a single-gender list for the best far, strictly
// better candidate of another declared gender. At most one swap.
inline RecommendationList apply_gender_diversification(RecommendationList prelim,
                                                       const RecommendationQuery& q) {
  if (!single_declared_gender(prelim)) return prelim;
  const Gender listed = prelim.front().gender;
  const double own = q.requester.competence_in(q.subject);

  std::optional<ScoredCandidate> best;
  for (const auto& c : q.candidate_pool) {
    if (c.gender == listed || c.gender == Gender::undisclosed) continue;
    if (!(c.competence_in(q.subject) > own)) continue;
    auto s = detail::score(q, c);
    if (geo::classify_proximity(s.distance_m) != geo::ProximityClass::far) continue;
    if (!best || detail::better_within_tier(s, *best)) best = std::move(s);
  }
  if (!best) return prelim;
  best->tier = 1;
  best->diversified = true;
  prelim.back() = std::move(*best);
  return prelim;
}

inline RecommendationList recommend(const RecommendationQuery& q) {
  return apply_gender_diversification(rank_candidates(q), q);
}

}  // namespace sostutor::recommender
