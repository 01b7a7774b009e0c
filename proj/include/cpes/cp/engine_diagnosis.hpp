#pragma once

#include <cpes/cp/ruleset.hpp>
#include <cpes/engine/session.hpp>

#include <memory>
#include <optional>

namespace cpes::cp {

struct EngineDiagnosis {
  std::int64_t raw_score = 0;  // final value of ?*weightage*
  std::optional<Band> band;    // from the printed sentence, if exactly one was printed
  std::string output;
  std::size_t firings = 0;
};

inline std::shared_ptr<const engine::RuleBase> compile_ruleset(const SymptomTable& table,
                                                               const BandThresholds& t = {}) {
  auto program = dsl::parse_program(generate_ruleset(table, t));
  return engine::compile(program);
}

// Scores an answer set by running the generated rules: one answer fact per
// answered symptom in table order, then the diagnosis trigger.
inline EngineDiagnosis run_engine_diagnosis(std::shared_ptr<const engine::RuleBase> rules,
                                            const SymptomTable& table, const AnswerSet& answers) {
  engine::Session session(std::move(rules));
  dsl::Program facts = dsl::parse_program(answer_facts(table, answers));
  for (const auto& c : facts) session.assert_fact(std::get<dsl::FactLiteral>(c.node));

  EngineDiagnosis d;
  d.firings = session.run();
  d.output = session.take_output();
  Value g = session.get_global(kWeightageGlobal);
  d.raw_score = std::get<std::int64_t>(g);
  int printed = 0;
  for (Band b : {Band::none, Band::mild, Band::moderate, Band::severe}) {
    if (d.output.find(band_sentence(b)) != std::string::npos) {
      d.band = b;
      ++printed;
    }
  }
  if (printed != 1) d.band.reset();
  return d;
}

}  // namespace cpes::cp
