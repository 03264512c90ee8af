#pragma once

// Desk-scale harness for the recommendation process: seeded synthetic
// populations, scripted requests and match-quality metrics.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sostutor/error.hpp"
#include "sostutor/geo.hpp"
#include "sostutor/json_io.hpp"
#include "sostutor/model.hpp"
#include "sostutor/personality.hpp"
#include "sostutor/recommender.hpp"

namespace sostutor::sim {

struct BoundingBox {
  double min_lat = -25.3240;
  double max_lat = -25.3170;
  double min_lon = -57.6400;
  double max_lon = -57.6320;
};

struct GeneratorSpec {
  std::size_t count = 0;
  std::map<Gender, double> gender_mix = {{Gender::female, 0.45},
                                         {Gender::male, 0.45},
                                         {Gender::nonbinary, 0.05},
                                         {Gender::undisclosed, 0.05}};
  BoundingBox box;
  std::vector<SubjectId> subjects = {"calculus", "programming", "physics"};
};

struct ScenarioRequest {
  ProfileId requester_id;
  SubjectId subject;
  PersonalityPreference preference = PersonalityPreference::indifferent;
};

struct Scenario {
  std::uint64_t seed = 0;
  // Exactly one population source: a generator or an explicit list.
  std::optional<GeneratorSpec> generator;
  std::vector<StudentProfile> profiles;
  std::vector<ScenarioRequest> requests;
};

inline void validate(const GeneratorSpec& spec) {
  double total = 0.0;
  for (const auto& [g, w] : spec.gender_mix) {
    if (!std::isfinite(w) || w < 0.0)
      throw Error(ErrorCode::validation, std::string("negative weight for gender ") + to_string(g));
    total += w;
  }
  if (spec.count > 0 && !(total > 0.0))
    throw Error(ErrorCode::validation, "gender mix must have positive total weight");
  const auto& b = spec.box;
  if (!valid_geo_point({b.min_lat, b.min_lon}) || !valid_geo_point({b.max_lat, b.max_lon}) ||
      b.min_lat > b.max_lat || b.min_lon > b.max_lon)
    throw Error(ErrorCode::validation, "bounding box out of range or inverted");
  for (const auto& s : spec.subjects)
    if (s.empty()) throw Error(ErrorCode::validation, "subject ids must be non-empty");
}

// Independent uniform traits, competences and coordinates; deterministic per seed.
inline std::vector<StudentProfile> generate_population(const GeneratorSpec& spec,
                                                       std::uint64_t seed) {
  validate(spec);
  std::mt19937_64 rng(seed);
  std::vector<Gender> genders;
  std::vector<double> weights;
  for (const auto& [g, w] : spec.gender_mix) {
    genders.push_back(g);
    weights.push_back(w);
  }
  std::discrete_distribution<std::size_t> pick_gender(weights.begin(), weights.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> lat(spec.box.min_lat, spec.box.max_lat);
  std::uniform_real_distribution<double> lon(spec.box.min_lon, spec.box.max_lon);

  std::vector<StudentProfile> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    StudentProfile p;
    p.id = "student-" + std::to_string(i + 1);
    p.display_name = "Student " + std::to_string(i + 1);
    p.gender = genders[pick_gender(rng)];
    p.location.latitude_deg = lat(rng);
    p.location.longitude_deg = lon(rng);
    std::array<double, TraitVector::kTraitCount> t{};
    for (auto& v : t) v = unit(rng);
    p.traits = TraitVector::from_array(t);
    for (const auto& s : spec.subjects) p.competences[s] = unit(rng);
    out.push_back(std::move(p));
  }
  return out;
}

inline std::vector<StudentProfile> population_of(const Scenario& s) {
  return s.generator ? generate_population(*s.generator, s.seed) : s.profiles;
}

// One request per generated profile, cycling subjects and preferences.
inline Scenario make_scenario(std::size_t count, std::uint64_t seed, bool explicit_profiles = false) {
  Scenario s;
  s.seed = seed;
  GeneratorSpec spec;
  spec.count = count;
  constexpr PersonalityPreference kCycle[] = {PersonalityPreference::similar,
                                              PersonalityPreference::different,
                                              PersonalityPreference::indifferent};
  for (std::size_t i = 0; i < count; ++i) {
    s.requests.push_back({"student-" + std::to_string(i + 1), spec.subjects[i % spec.subjects.size()],
                          kCycle[i % 3]});
  }
  if (explicit_profiles) s.profiles = generate_population(spec, seed);
  else s.generator = spec;
  return s;
}

// ---- scenario file form ----

inline json to_json_value(const Scenario& s) {
  json pop;
  if (s.generator) {
    const auto& g = *s.generator;
    json mix = json::object();
    for (const auto& [gender, w] : g.gender_mix) mix[to_string(gender)] = w;
    pop["generator"] = {{"count", g.count},
                        {"genderMix", mix},
                        {"boundingBox",
                         {{"minLat", g.box.min_lat},
                          {"maxLat", g.box.max_lat},
                          {"minLon", g.box.min_lon},
                          {"maxLon", g.box.max_lon}}},
                        {"subjects", g.subjects}};
  } else {
    pop["profiles"] = s.profiles;
  }
  json reqs = json::array();
  for (const auto& r : s.requests)
    reqs.push_back({{"requesterId", r.requester_id}, {"subject", r.subject}, {"preference", r.preference}});
  return {{"seed", s.seed}, {"population", pop}, {"requests", reqs}};
}

inline Scenario parse_scenario(const json& j) {
  try {
    Scenario s;
    if (!j.is_object() || !j.contains("seed") || !j.at("seed").is_number_integer())
      throw Error(ErrorCode::validation, "scenario needs an integer seed");
    s.seed = j.at("seed").get<std::uint64_t>();
    const auto& pop = json_detail::member(j, "population");
    if (pop.contains("generator") == pop.contains("profiles"))
      throw Error(ErrorCode::validation, "population needs exactly one of generator or profiles");
    if (pop.contains("generator")) {
      const auto& g = pop.at("generator");
      GeneratorSpec spec;
      spec.count = json_detail::member(g, "count").get<std::size_t>();
      if (g.contains("genderMix")) {
        spec.gender_mix.clear();
        for (auto it = g.at("genderMix").begin(); it != g.at("genderMix").end(); ++it) {
          auto gender = parse_gender(it.key());
          if (!gender) throw Error(ErrorCode::validation, "unknown gender " + it.key());
          spec.gender_mix[*gender] = it->get<double>();
        }
      }
      if (g.contains("boundingBox")) {
        const auto& b = g.at("boundingBox");
        spec.box = {json_detail::number(b, "minLat"), json_detail::number(b, "maxLat"),
                    json_detail::number(b, "minLon"), json_detail::number(b, "maxLon")};
      }
      if (g.contains("subjects")) spec.subjects = g.at("subjects").get<std::vector<SubjectId>>();
      validate(spec);
      s.generator = spec;
    } else {
      s.profiles = pop.at("profiles").get<std::vector<StudentProfile>>();
      std::set<ProfileId> ids;
      for (const auto& p : s.profiles) {
        auto v = validate_profile(p);
        if (!v.empty()) throw ValidationError(std::move(v));
        if (!ids.insert(p.id).second)
          throw Error(ErrorCode::validation, "duplicate profile id " + p.id);
      }
    }
    for (const auto& r : json_detail::member(j, "requests")) {
      s.requests.push_back({json_detail::string_or(r, "requesterId"),
                            json_detail::string_or(r, "subject"),
                            json_detail::member(r, "preference").get<PersonalityPreference>()});
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::validation, std::string("malformed scenario: ") + e.what());
  }
}

// ---- evaluation ----

struct RequestResult {
  std::size_t index = 0;
  ScenarioRequest request;
  double requester_competence = 0.0;
  std::size_t tier1_available = 0;
  recommender::RecommendationList recommendations;
};

struct Metrics {
  // nullopt when the metric's denominator is empty.
  std::optional<double> competence_satisfaction;
  std::size_t competence_eligible_requests = 0;
  std::optional<double> proximity_compliance;
  std::map<PersonalityPreference, std::optional<double>> mean_preference_score;
  std::map<PersonalityPreference, std::optional<double>> mean_similarity;
  std::optional<double> gender_mix_rate;
  std::optional<double> diversification_rate;
};

struct EvaluationReport {
  std::uint64_t seed = 0;
  std::vector<RequestResult> results;
  Metrics metrics;
};

namespace detail {

struct Ratio {
  double num = 0.0;
  double den = 0.0;
  void add(double n, double d = 1.0) {
    num += n;
    den += d;
  }
  std::optional<double> value() const {
    return den > 0.0 ? std::optional<double>(num / den) : std::nullopt;
  }
};

inline Metrics compute_metrics(const std::vector<RequestResult>& results) {
  Ratio competence, proximity, mixed, diversified;
  std::map<PersonalityPreference, Ratio> pref_score, pref_sim;
  Metrics m;
  for (const auto& r : results) {
    const bool eligible = r.tier1_available >= recommender::kListSize;
    if (eligible) ++m.competence_eligible_requests;
    std::set<Gender> genders;
    bool has_diversified = false;
    for (const auto& c : r.recommendations) {
      if (eligible) competence.add(c.competence > r.requester_competence ? 1.0 : 0.0);
      if (!c.diversified) proximity.add(c.distance_m <= geo::kNearLimitM ? 1.0 : 0.0);
      if (c.gender != Gender::undisclosed) genders.insert(c.gender);
      has_diversified = has_diversified || c.diversified;
      pref_score[r.request.preference].add(c.personality_score);
      pref_sim[r.request.preference].add(c.similarity);
    }
    mixed.add(genders.size() >= 2 ? 1.0 : 0.0);
    diversified.add(has_diversified ? 1.0 : 0.0);
  }
  m.competence_satisfaction = competence.value();
  m.proximity_compliance = proximity.value();
  m.gender_mix_rate = mixed.value();
  m.diversification_rate = diversified.value();
  for (auto pref : {PersonalityPreference::similar, PersonalityPreference::different,
                    PersonalityPreference::indifferent}) {
    m.mean_preference_score[pref] = pref_score[pref].value();
    m.mean_similarity[pref] = pref_sim[pref].value();
  }
  return m;
}

inline RequestResult evaluate_request(const std::vector<StudentProfile>& population,
                                      const std::map<ProfileId, std::size_t>& by_id,
                                      const ScenarioRequest& req, std::size_t index) {
  recommender::RecommendationQuery q;
  q.requester = population[by_id.at(req.requester_id)];
  q.subject = req.subject;
  q.preference = req.preference;
  q.candidate_pool.reserve(population.size());
  RequestResult out;
  out.index = index;
  out.request = req;
  out.requester_competence = q.requester.competence_in(req.subject);
  for (const auto& p : population) {
    if (p.id == req.requester_id) continue;
    if (p.competence_in(req.subject) > out.requester_competence &&
        geo::classify_proximity(geo::distance_meters(q.requester.location, p.location)) ==
            geo::ProximityClass::near)
      ++out.tier1_available;
    q.candidate_pool.push_back(p);
  }
  out.recommendations = recommender::recommend(q);
  return out;
}

}  // namespace detail

// Requests are independent; `threads` > 1 evaluates them concurrently
// without changing the result.
inline EvaluationReport run_scenario(const Scenario& scenario,
                                     const std::vector<StudentProfile>& population,
                                     unsigned threads = 1) {
  std::map<ProfileId, std::size_t> by_id;
  for (std::size_t i = 0; i < population.size(); ++i) by_id[population[i].id] = i;
  for (std::size_t i = 0; i < scenario.requests.size(); ++i) {
    const auto& r = scenario.requests[i];
    if (!by_id.count(r.requester_id))
      throw Error(ErrorCode::validation, "request " + std::to_string(i) + ": unknown requester " +
                                             r.requester_id);
    if (r.subject.empty())
      throw Error(ErrorCode::validation, "request " + std::to_string(i) + ": empty subject");
  }

  EvaluationReport report;
  report.seed = scenario.seed;
  report.results.resize(scenario.requests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenario.requests.size(); i = next++)
      report.results[i] = detail::evaluate_request(population, by_id, scenario.requests[i], i);
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  report.metrics = detail::compute_metrics(report.results);
  return report;
}

inline EvaluationReport run_scenario(const Scenario& scenario, unsigned threads = 1) {
  return run_scenario(scenario, population_of(scenario), threads);
}

inline json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

inline json to_json_value(const Metrics& m) {
  json pref = json::object();
  json sim = json::object();
  for (const auto& [k, v] : m.mean_preference_score) pref[to_string(k)] = optional_number(v);
  for (const auto& [k, v] : m.mean_similarity) sim[to_string(k)] = optional_number(v);
  return {{"competenceSatisfaction", optional_number(m.competence_satisfaction)},
          {"competenceEligibleRequests", m.competence_eligible_requests},
          {"proximityCompliance", optional_number(m.proximity_compliance)},
          {"meanPreferenceScore", pref},
          {"meanSimilarity", sim},
          {"genderMixRate", optional_number(m.gender_mix_rate)},
          {"diversificationRate", optional_number(m.diversification_rate)}};
}

inline json to_json_value(const EvaluationReport& r) {
  json reqs = json::array();
  for (const auto& res : r.results) {
    json recs = json::array();
    for (const auto& c : res.recommendations) {
      json cj = c;
      cj["compatibilityLevel"] =
          personality::to_string(personality::compatibility_level(c.personality_score));
      recs.push_back(std::move(cj));
    }
    reqs.push_back({{"index", res.index},
                    {"requesterId", res.request.requester_id},
                    {"subject", res.request.subject},
                    {"preference", res.request.preference},
                    {"requesterCompetence", res.requester_competence},
                    {"tier1Available", res.tier1_available},
                    {"recommendations", recs}});
  }
  return {{"seed", r.seed},
          {"requestCount", r.results.size()},
          {"metrics", to_json_value(r.metrics)},
          {"requests", reqs}};
}

inline std::string report_text(const EvaluationReport& r) { return to_json_value(r).dump(2) + "\n"; }

inline std::string format_metric(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

inline std::string summary_table(const Metrics& m, std::size_t requests) {
  std::ostringstream out;
  auto row = [&](const std::string& name, const std::string& value) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-34s %s\n", name.c_str(), value.c_str());
    out << buf;
  };
  row("requests", std::to_string(requests));
  row("competenceSatisfaction", format_metric(m.competence_satisfaction) + "  (" +
                                    std::to_string(m.competence_eligible_requests) +
                                    " eligible requests)");
  row("proximityCompliance", format_metric(m.proximity_compliance));
  for (const auto& [k, v] : m.mean_preference_score)
    row(std::string("meanPreferenceScore[") + to_string(k) + "]", format_metric(v));
  for (const auto& [k, v] : m.mean_similarity)
    row(std::string("meanSimilarity[") + to_string(k) + "]", format_metric(v));
  row("genderMixRate", format_metric(m.gender_mix_rate));
  row("diversificationRate", format_metric(m.diversification_rate));
  return out.str();
}

// ---- repeated trials ----

struct MetricSummary {
  std::string name;
  std::size_t samples = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

// splitmix64 step; trial k runs with derive_seed(seed, k).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (trial + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Trials regenerate the population from derived seeds; an explicit
// population is identical in every trial.
inline std::vector<MetricSummary> evaluate_trials(const Scenario& scenario, std::size_t trials,
                                                  unsigned threads = 1) {
  if (trials == 0) throw Error(ErrorCode::validation, "trials must be positive");
  std::map<std::string, std::vector<double>> samples;
  std::vector<std::string> order;
  auto record = [&](const std::string& name, const std::optional<double>& v) {
    if (!samples.count(name)) order.push_back(name);
    auto& s = samples[name];
    if (v) s.push_back(*v);
  };
  for (std::size_t k = 0; k < trials; ++k) {
    Scenario trial = scenario;
    trial.seed = derive_seed(scenario.seed, k);
    const auto m = run_scenario(trial, threads).metrics;
    record("competenceSatisfaction", m.competence_satisfaction);
    record("proximityCompliance", m.proximity_compliance);
    for (const auto& [p, v] : m.mean_preference_score)
      record(std::string("meanPreferenceScore[") + to_string(p) + "]", v);
    for (const auto& [p, v] : m.mean_similarity)
      record(std::string("meanSimilarity[") + to_string(p) + "]", v);
    record("genderMixRate", m.gender_mix_rate);
    record("diversificationRate", m.diversification_rate);
  }
  std::vector<MetricSummary> out;
  for (const auto& name : order) {
    const auto& s = samples[name];
    MetricSummary ms{name, s.size(), 0.0, 0.0};
    if (!s.empty()) {
      // Shifted by the first sample so identical samples give exactly zero spread.
      const double n = static_cast<double>(s.size());
      double sum = 0.0, sq = 0.0;
      for (double v : s) {
        sum += v - s.front();
        sq += (v - s.front()) * (v - s.front());
      }
      ms.mean = s.front() + sum / n;
      if (s.size() > 1) ms.stddev = std::sqrt(std::max(0.0, (sq - sum * sum / n) / (n - 1.0)));
    }
    out.push_back(ms);
  }
  return out;
}

inline json to_json_value(const std::vector<MetricSummary>& summaries, std::size_t trials) {
  json metrics = json::object();
  for (const auto& s : summaries)
    metrics[s.name] = {{"samples", s.samples}, {"mean", s.mean}, {"stddev", s.stddev}};
  return {{"trials", trials}, {"metrics", metrics}};
}

inline std::string summary_table(const std::vector<MetricSummary>& summaries) {
  std::ostringstream out;
  for (const auto& s : summaries) {
    char buf[128];
    if (s.samples == 0)
      std::snprintf(buf, sizeof buf, "%-34s n/a\n", s.name.c_str());
    else
      std::snprintf(buf, sizeof buf, "%-34s %.4f ± %.4f  (n=%zu)\n", s.name.c_str(), s.mean,
                    s.stddev, s.samples);
    out << buf;
  }
  return out.str();
}

}  // namespace sostutor::sim
