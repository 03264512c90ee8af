#pragma once

// Big Five short-form scoring and personality matching scores.

#include <cmath>
#include <span>
#include <string>

#include "sostutor/error.hpp"
#include "sostutor/model.hpp"

namespace sostutor::personality {

// Ten Likert answers, two per trait in TraitVector order. Item 2k-1 is
// direct-keyed and item 2k reverse-keyed (1-based numbering).
inline constexpr std::size_t kQuestionnaireItems = 10;
inline constexpr int kLikertMin = 1;
inline constexpr int kLikertMax = 5;

enum class CompatibilityLevel { low, medium, high };

inline const char* to_string(CompatibilityLevel level) {
  switch (level) {
    case CompatibilityLevel::low: return "low";
    case CompatibilityLevel::medium: return "medium";
    case CompatibilityLevel::high: return "high";
  }
  return "low";
}

inline TraitVector score_questionnaire(std::span<const int> answers) {
  if (answers.size() != kQuestionnaireItems) {
    throw Error(ErrorCode::validation, "questionnaire needs exactly 10 answers, got " +
                                           std::to_string(answers.size()));
  }
  for (std::size_t i = 0; i < answers.size(); ++i) {
    if (answers[i] < kLikertMin || answers[i] > kLikertMax) {
      throw Error(ErrorCode::validation,
                  "answer " + std::to_string(i + 1) + " out of range [1,5]");
    }
  }
  std::array<double, TraitVector::kTraitCount> traits{};
  for (std::size_t k = 0; k < traits.size(); ++k) {
    const int direct = answers[2 * k];
    const int reversed = (kLikertMax + 1) - answers[2 * k + 1];
    traits[k] = ((direct + reversed) / 2.0 - 1.0) / 4.0;
  }
  return TraitVector::from_array(traits);
}

// 1 minus the mean absolute per-trait difference.
inline double similarity(const TraitVector& a, const TraitVector& b) {
  const auto x = a.as_array();
  const auto y = b.as_array();
  double l1 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) l1 += std::abs(x[k] - y[k]);
  return 1.0 - l1 / static_cast<double>(x.size());
}

inline double preference_score(PersonalityPreference pref, double sim) {
  switch (pref) {
    case PersonalityPreference::similar: return sim;
    case PersonalityPreference::different: return 1.0 - sim;
    case PersonalityPreference::indifferent: return 0.5;
  }
  return 0.5;
}

inline constexpr double kMediumFrom = 0.34;
inline constexpr double kHighFrom = 0.67;

inline CompatibilityLevel compatibility_level(double score) {
  if (score >= kHighFrom) return CompatibilityLevel::high;
  if (score >= kMediumFrom) return CompatibilityLevel::medium;
  return CompatibilityLevel::low;
}

}  // namespace sostutor::personality
