#include <cpes/cli/commands.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <vector>

int main(int argc, char** argv) {
  using namespace cpes::cli;

  CLI::App app{"Rule-based Cerebral Palsy questionnaire and production-rule engine"};
  app.require_subcommand(1);

  CliConfig cfg;
  std::vector<std::int64_t> thresholds;

  auto* diagnose = app.add_subcommand("diagnose", "Score a yes/no questionnaire");
  diagnose->add_option("--table", cfg.table_path, "Symptom table file (id|question|weight)");
  diagnose->add_flag("-i,--interactive", cfg.interactive, "Ask each question on the terminal");
  diagnose->add_option("-a,--answers", cfg.answers_path, "Answers file (id: yes|no per line)");
  diagnose->add_flag("--assume-no", cfg.assume_no, "Treat symptoms missing from the answers file as no");
  diagnose->add_flag("--explain", cfg.explain, "List the symptoms that contributed to the score");
  diagnose->add_flag("--json", cfg.json, "Print a JSON report");
  diagnose->add_option("--thresholds", thresholds, "Band boundaries in percent: mild moderate severe")
      ->expected(3)
      ->delimiter(',');

  auto* run = app.add_subcommand("run", "Run a rule file against a facts file");
  run->add_option("rules", cfg.rules_path, "Rule file")->required();
  run->add_option("facts", cfg.facts_path, "Facts file, asserted in order");
  run->add_flag("--trace", cfg.trace, "Write trace events to stderr");

  auto* gen = app.add_subcommand("gen-rules", "Compile a symptom table into a rule file");
  gen->add_option("--table", cfg.table_path, "Symptom table file (id|question|weight)");
  gen->add_option("-o,--output", cfg.output_path, "Destination file (default: stdout)");
  gen->add_option("--thresholds", thresholds, "Band boundaries in percent: mild moderate severe")
      ->expected(3)
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  if (!thresholds.empty()) cfg.thresholds = {thresholds[0], thresholds[1], thresholds[2]};

  Streams io{std::cin, std::cout, std::cerr};
  if (diagnose->parsed()) return cmd_diagnose(cfg, io);
  if (run->parsed()) return cmd_run(cfg, io);
  return cmd_gen_rules(cfg, io);
}
