#pragma once

#include <cpes/cp/symptom_table.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cpes::cp {

enum class Answer { no, yes };

// symptom id -> answer
using AnswerSet = std::map<std::string, Answer, std::less<>>;

// Ordered by severity.
enum class Band { none, mild, moderate, severe };

inline const char* to_string(Band b) {
  switch (b) {
    case Band::none: return "none";
    case Band::mild: return "mild";
    case Band::moderate: return "moderate";
    case Band::severe: return "severe";
  }
  return "?";
}

// "Symptoms show that you have mild Cerebral Palsy."
inline std::string band_sentence(Band b) {
  const char* word = b == Band::none ? "no" : to_string(b);
  return std::string("Symptoms show that you have ") + word + " Cerebral Palsy.";
}

// Percent boundaries. none: p < mild; mild: mild <= p < moderate;
// moderate: moderate <= p <= severe; severe: p > severe.
struct BandThresholds {
  std::int64_t mild = 16;
  std::int64_t moderate = 39;
  std::int64_t severe = 66;

  bool valid() const { return 0 < mild && mild < moderate && moderate < severe && severe <= 100; }
  bool operator==(const BandThresholds&) const = default;
};

class ScoreError : public Error {
 public:
  using Error::Error;
};

enum class Missing { error, assume_no };

struct Contribution {
  std::string id;
  std::int64_t weight;
  bool operator==(const Contribution&) const = default;
};

struct DiagnosisResult {
  std::int64_t raw_score = 0;
  std::int64_t max_score = 0;
  double percentage = 0.0;
  Band band = Band::none;
  std::vector<Contribution> contributions;  // yes answers, table order
};

// Expands absent ids to `no` under Missing::assume_no; rejects unknown ids
// always and absent ids under Missing::error.
inline AnswerSet complete_answers(const SymptomTable& table, const AnswerSet& answers,
                                  Missing policy = Missing::error) {
  for (const auto& [id, a] : answers)
    if (!table.find(id)) throw ScoreError("unknown symptom id '" + id + "'");
  AnswerSet out = answers;
  std::vector<std::string> missing;
  for (const auto& s : table.symptoms()) {
    if (out.count(s.id)) continue;
    if (policy == Missing::assume_no) out[s.id] = Answer::no;
    else missing.push_back(s.id);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ScoreError("no answer for: " + list);
  }
  return out;
}

inline std::int64_t raw_score(const SymptomTable& table, const AnswerSet& answers,
                              Missing policy = Missing::error) {
  AnswerSet full = complete_answers(table, answers, policy);
  std::int64_t sum = 0;
  for (const auto& s : table.symptoms())
    if (full.find(s.id)->second == Answer::yes) sum += s.weight;
  return sum;
}

inline double percentage_score(std::int64_t raw, std::int64_t max) {
  if (max <= 0) throw ScoreError("maximum score must be positive");
  if (raw < 0 || raw > max) throw ScoreError("raw score out of range");
  return 100.0 * static_cast<double>(raw) / static_cast<double>(max);
}

// Compares 100*raw against threshold*max so boundaries are exact.
inline Band classify(std::int64_t raw, std::int64_t max, const BandThresholds& t = {}) {
  if (max <= 0) throw ScoreError("maximum score must be positive");
  if (raw < 0 || raw > max) throw ScoreError("raw score out of range");
  const std::int64_t scaled = 100 * raw;
  if (scaled < t.mild * max) return Band::none;
  if (scaled < t.moderate * max) return Band::mild;
  if (scaled <= t.severe * max) return Band::moderate;
  return Band::severe;
}

inline DiagnosisResult diagnose(const SymptomTable& table, const AnswerSet& answers,
                                const BandThresholds& t = {}, Missing policy = Missing::error) {
  AnswerSet full = complete_answers(table, answers, policy);
  DiagnosisResult r;
  r.max_score = table.max_score();
  for (const auto& s : table.symptoms()) {
    if (full.find(s.id)->second == Answer::yes) {
      r.raw_score += s.weight;
      r.contributions.push_back({s.id, s.weight});
    }
  }
  r.percentage = percentage_score(r.raw_score, r.max_score);
  r.band = classify(r.raw_score, r.max_score, t);
  return r;
}

inline nlohmann::json to_json(const DiagnosisResult& r) {
  nlohmann::json contributions = nlohmann::json::array();
  for (const auto& c : r.contributions) contributions.push_back({{"id", c.id}, {"weight", c.weight}});
  return {{"raw_score", r.raw_score},
          {"max_score", r.max_score},
          {"percentage", r.percentage},
          {"band", to_string(r.band)},
          {"contributions", std::move(contributions)}};
}

}  // namespace cpes::cp
