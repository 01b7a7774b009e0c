#pragma once

#include <cpes/cp/scoring.hpp>
#include <cpes/dsl/printer.hpp>

#include <string>

namespace cpes::cp {

inline constexpr const char* kWeightageGlobal = "weightage";
inline constexpr const char* kDiagnosisRule = "diagnosis";
// Fires after every symptom rule so the band is printed from the final total.
inline constexpr std::int64_t kDiagnosisSalience = -10;

namespace detail {

inline dsl::Expr lit(std::int64_t v) { return {Value{v}}; }
inline dsl::Expr weightage() { return {dsl::Global{kWeightageGlobal}}; }

inline dsl::Condition cmp(dsl::CompareOp op, dsl::Expr lhs, dsl::Expr rhs) {
  return {dsl::Comparison{op, std::move(lhs), std::move(rhs)}};
}

inline dsl::ActionSpec print_band(Band b) {
  return {dsl::PrintAction{{dsl::Expr{Value{band_sentence(b)}}}, true}};
}

}  // namespace detail

// One `answer` template, the weightage global, a rule per symptom that adds
// its weight on a yes answer, and a diagnosis rule triggered by
// `(result diagnosis-rule)`. Band tests compare 100*weightage against
// threshold*max in integers, so they agree exactly with classify().
inline dsl::Program generate_program(const SymptomTable& table, const BandThresholds& t = {}) {
  using namespace dsl;
  Program p;
  p.push_back({TemplateDef{"answer", {{"ident", std::nullopt}, {"text", std::nullopt}}}});
  p.push_back({GlobalDef{kWeightageGlobal, Value{std::int64_t{0}}}});

  for (const auto& s : table.symptoms()) {
    PatternSpec pat;
    pat.name = "answer";
    pat.shape = FactShape::templated;
    pat.slots = {{"ident", Value{Symbol{s.id}}}, {"text", Value{Symbol{"yes"}}}};
    Expr sum{Arith{ArithOp::add, {detail::weightage(), detail::lit(s.weight)}}};
    RuleDef r{s.id, 0, {pat}, {{BindAction{kWeightageGlobal, std::move(sum)}}}};
    p.push_back({std::move(r)});
  }

  const std::int64_t max = table.max_score();
  auto scaled = [] { return Expr{Arith{ArithOp::mul, {detail::lit(100), detail::weightage()}}}; };
  auto at = [&](std::int64_t pct) { return detail::lit(pct * max); };

  PatternSpec trigger;
  trigger.address = "p";
  trigger.name = "result";
  trigger.fields = {Value{Symbol{"diagnosis-rule"}}};

  RuleDef diag{kDiagnosisRule, kDiagnosisSalience, {trigger}, {}};
  diag.rhs.push_back({PrintAction{{detail::weightage()}, true}});
  diag.rhs.push_back({IfAction{detail::cmp(CompareOp::lt, scaled(), at(t.mild)), {detail::print_band(Band::none)}, std::nullopt}});
  diag.rhs.push_back({IfAction{
      {Conjunction{{detail::cmp(CompareOp::ge, scaled(), at(t.mild)), detail::cmp(CompareOp::lt, scaled(), at(t.moderate))}}},
      {detail::print_band(Band::mild)},
      std::nullopt}});
  diag.rhs.push_back({IfAction{
      {Conjunction{{detail::cmp(CompareOp::ge, scaled(), at(t.moderate)), detail::cmp(CompareOp::le, scaled(), at(t.severe))}}},
      {detail::print_band(Band::moderate)},
      std::nullopt}});
  diag.rhs.push_back({IfAction{detail::cmp(CompareOp::gt, scaled(), at(t.severe)), {detail::print_band(Band::severe)}, std::nullopt}});
  p.push_back({std::move(diag)});
  return p;
}

inline std::string generate_ruleset(const SymptomTable& table, const BandThresholds& t = {}) {
  std::string header = "; Generated rule set: " + std::to_string(table.size()) + " symptoms, maximum score " +
                       std::to_string(table.max_score()) + ".\n\n";
  return header + dsl::pretty_print(generate_program(table, t));
}

// Facts that feed an answer set into the generated rules, trigger last.
inline std::string answer_facts(const SymptomTable& table, const AnswerSet& answers) {
  std::string out;
  for (const auto& s : table.symptoms()) {
    auto it = answers.find(s.id);
    if (it == answers.end()) continue;
    out += "(answer (ident " + s.id + ") (text " + (it->second == Answer::yes ? "yes" : "no") + "))\n";
  }
  out += "(result diagnosis-rule)\n";
  return out;
}

}  // namespace cpes::cp
