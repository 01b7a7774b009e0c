#pragma once

// Subcommand bodies for the `cpes` tool. They take their streams as
// arguments so tests can drive them without a process boundary.

#include <cpes/cp/answers.hpp>
#include <cpes/cp/bundled_table.hpp>
#include <cpes/cp/ruleset.hpp>
#include <cpes/engine/session.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace cpes::cli {

enum ExitCode : int { kOk = 0, kProcessingError = 1, kInputError = 2 };

inline constexpr const char* kDisclaimer =
    "Note: this questionnaire is a decision aid, not a medical diagnosis. Consult a qualified clinician.";

struct CliConfig {
  std::optional<std::string> table_path;  // bundled table when empty
  std::optional<std::string> rules_path;
  std::optional<std::string> facts_path;
  std::optional<std::string> answers_path;
  std::optional<std::string> output_path;
  bool interactive = false;
  bool assume_no = false;
  bool trace = false;
  bool explain = false;
  bool json = false;
  cp::BandThresholds thresholds;
};

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

namespace detail {

inline std::optional<std::string> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline std::string percent(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", p);
  return buf;
}

// Returns the table, or prints the problem and returns nothing.
inline std::optional<cp::SymptomTable> load_table(const CliConfig& cfg, std::ostream& err) {
  if (!cfg.table_path) return cp::bundled_table();
  auto text = read_file(*cfg.table_path);
  if (!text) {
    err << "error: cannot read symptom table '" << *cfg.table_path << "'\n";
    return std::nullopt;
  }
  try {
    return cp::load_symptom_table(*text);
  } catch (const cp::InputError& e) {
    for (const auto& d : e.diagnostics()) err << *cfg.table_path << ":" << d.line << ": " << d.message << "\n";
    return std::nullopt;
  }
}

inline std::optional<cp::AnswerSet> ask(const cp::SymptomTable& table, const Streams& io) {
  cp::AnswerSet answers;
  const std::size_t n = table.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = table[i];
    while (true) {
      io.out << "[" << (i + 1) << "/" << n << "] " << s.question << " (yes/no): " << std::flush;
      std::string line;
      if (!std::getline(io.in, line)) {
        io.out << "\n";
        return std::nullopt;
      }
      if (auto a = cp::parse_yes_no(line)) {
        answers[s.id] = *a;
        break;
      }
      io.out << "Please answer yes or no.\n";
    }
  }
  return answers;
}

inline void explain(const cp::DiagnosisResult& r, const cp::SymptomTable& table, std::ostream& out) {
  out << "\nContributing symptoms:\n";
  if (r.contributions.empty()) out << "  (none)\n";
  std::size_t width = 5;  // "total"
  for (const auto& c : r.contributions) width = std::max(width, c.id.size());
  auto pad = [&](const std::string& s) { return s + std::string(width - s.size(), ' '); };
  for (const auto& c : r.contributions) {
    const cp::Symptom* s = table.find(c.id);
    out << "  " << pad(c.id) << "  +" << c.weight << "  " << (s ? s->question : "") << "\n";
  }
  out << "  " << pad("total") << "  " << r.raw_score << " of " << r.max_score << "\n";
}

}  // namespace detail

// Asks the questionnaire (or reads an answers file) and reports the band.
inline int cmd_diagnose(const CliConfig& cfg, const Streams& io) {
  if (cfg.interactive == cfg.answers_path.has_value()) {
    io.err << "error: diagnose needs exactly one of --interactive or --answers\n";
    return kInputError;
  }
  if (!cfg.thresholds.valid()) {
    io.err << "error: thresholds must satisfy 0 < mild < moderate < severe <= 100\n";
    return kInputError;
  }
  auto table = detail::load_table(cfg, io.err);
  if (!table) return kInputError;

  (cfg.json ? io.err : io.out) << kDisclaimer << "\n";

  cp::AnswerSet answers;
  if (cfg.interactive) {
    auto a = detail::ask(*table, io);
    if (!a) {
      io.err << "error: input ended before every question was answered\n";
      return kInputError;
    }
    answers = std::move(*a);
  } else {
    auto text = detail::read_file(*cfg.answers_path);
    if (!text) {
      io.err << "error: cannot read answers file '" << *cfg.answers_path << "'\n";
      return kInputError;
    }
    try {
      answers = cp::parse_answers(*text, *table);
    } catch (const cp::InputError& e) {
      for (const auto& d : e.diagnostics()) io.err << *cfg.answers_path << ":" << d.line << ": " << d.message << "\n";
      return kInputError;
    }
  }

  cp::DiagnosisResult r;
  try {
    r = cp::diagnose(*table, answers, cfg.thresholds, cfg.assume_no ? cp::Missing::assume_no : cp::Missing::error);
  } catch (const cp::ScoreError& e) {
    io.err << "error: " << e.what() << (cfg.assume_no ? "" : " (use --assume-no to treat them as no)") << "\n";
    return kInputError;
  }

  if (cfg.json) {
    io.out << cp::to_json(r).dump(2) << "\n";
    return kOk;
  }
  io.out << cp::band_sentence(r.band) << "\n";
  io.out << "Weightage score: " << detail::percent(r.percentage) << "% (" << r.raw_score << " of " << r.max_score
         << ")\n";
  if (cfg.explain) detail::explain(r, *table, io.out);
  return kOk;
}

// Compiles a rule file, asserts its facts and then the facts file's, and runs
// to quiescence.
inline int cmd_run(const CliConfig& cfg, const Streams& io) {
  if (!cfg.rules_path) {
    io.err << "error: run needs a rules file\n";
    return kInputError;
  }
  auto load = [&](const std::string& path) -> std::optional<dsl::Program> {
    auto text = detail::read_file(path);
    if (!text) {
      io.err << "error: cannot read '" << path << "'\n";
      return std::nullopt;
    }
    try {
      return dsl::parse_program(*text);
    } catch (const SyntaxError& e) {
      io.err << path << ":" << e.what() << "\n";
      return std::nullopt;
    }
  };

  auto program = load(*cfg.rules_path);
  if (!program) return kProcessingError;
  dsl::Program facts;
  if (cfg.facts_path) {
    auto f = load(*cfg.facts_path);
    if (!f) return kProcessingError;
    for (const auto& c : *f) {
      if (!std::holds_alternative<dsl::FactLiteral>(c.node)) {
        io.err << *cfg.facts_path << ":" << c.pos.line << ":" << c.pos.column << ": facts file may only contain facts\n";
        return kProcessingError;
      }
    }
    facts = std::move(*f);
  }

  std::shared_ptr<const engine::RuleBase> rules;
  try {
    rules = engine::compile(*program);
  } catch (const CompileError& e) {
    io.err << *cfg.rules_path << ":" << e.what() << "\n";
    return kProcessingError;
  }

  engine::Session session(rules);
  int status = kOk;
  try {
    for (const auto& f : rules->initial_facts()) session.assert_fact(f);
    for (const auto& c : facts) {
      try {
        session.assert_fact(std::get<dsl::FactLiteral>(c.node));
      } catch (const UsageError& e) {
        io.err << *cfg.facts_path << ":" << c.pos.line << ":" << c.pos.column << ": " << e.what() << "\n";
        return kProcessingError;
      }
    }
    session.run();
  } catch (const Error& e) {
    io.err << "error: " << e.what() << "\n";
    status = kProcessingError;
  }
  io.out << session.take_output();
  if (cfg.trace)
    for (const auto& ev : session.trace()) io.err << engine::format_trace_line(ev) << "\n";
  return status;
}

inline int cmd_gen_rules(const CliConfig& cfg, const Streams& io) {
  if (!cfg.thresholds.valid()) {
    io.err << "error: thresholds must satisfy 0 < mild < moderate < severe <= 100\n";
    return kInputError;
  }
  auto table = detail::load_table(cfg, io.err);
  if (!table) return kInputError;
  std::string text = cp::generate_ruleset(*table, cfg.thresholds);
  if (!cfg.output_path) {
    io.out << text;
    return kOk;
  }
  std::ofstream f(*cfg.output_path, std::ios::binary);
  if (!f || !(f << text) || !f.flush()) {
    io.err << "error: cannot write '" << *cfg.output_path << "'\n";
    return kProcessingError;
  }
  return kOk;
}

}  // namespace cpes::cli
