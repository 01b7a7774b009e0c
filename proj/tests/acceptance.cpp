// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// if any gated criterion fails.

#include <cpes/cp/bundled_table.hpp>
#include <cpes/cp/engine_diagnosis.hpp>
#include <cpes/dsl/printer.hpp>
#include <cpes/oracle/naive_matcher.hpp>

#include "support/generators.hpp"

#include <array>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

namespace {

using namespace cpes;
using engine::Fact;
using engine::FactId;

// Published weight column, transcribed by hand independently of
// data/cerebral_palsy.table.
constexpr std::array<std::int64_t, 20> kReferenceWeights = {5, 5, 5, 1, 1, 1, 3, 2, 2, 5, 1, 1, 5, 1, 1, 2, 1, 2, 2, 5};

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  require(bool(in), "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Bands from the resolved rule: none 0-8, mild 9-19, moderate 20-33, severe 34-51.
cp::Band expected_band(std::int64_t raw) {
  if (raw <= 8) return cp::Band::none;
  if (raw <= 19) return cp::Band::mild;
  if (raw <= 33) return cp::Band::moderate;
  return cp::Band::severe;
}

cp::AnswerSet answers_from_mask(const cp::SymptomTable& table, std::uint32_t mask) {
  cp::AnswerSet a;
  for (std::size_t i = 0; i < table.size(); ++i) a[table[i].id] = (mask >> i) & 1u ? cp::Answer::yes : cp::Answer::no;
  return a;
}

void criterion_1() {
  const auto& table = cp::bundled_table();
  require(table.size() == kReferenceWeights.size(), "table has " + std::to_string(table.size()) + " rows");
  for (std::size_t i = 0; i < table.size(); ++i)
    require(table[i].weight == kReferenceWeights[i], "weight mismatch at row " + std::to_string(i + 1));
  require(table.max_score() == 51, "max_score " + std::to_string(table.max_score()));
}

void criterion_2() {
  for (std::int64_t raw = 0; raw <= 51; ++raw)
    require(cp::classify(raw, 51) == expected_band(raw), "raw " + std::to_string(raw));
}

void criterion_3() {
  const auto& table = cp::bundled_table();
  constexpr std::uint32_t kSets = 1u << 20;
  std::vector<std::int64_t> raw(kSets);
  for (std::uint32_t mask = 0; mask < kSets; ++mask) {
    std::int64_t fold = 0;
    for (std::size_t i = 0; i < kReferenceWeights.size(); ++i)
      if ((mask >> i) & 1u) fold += kReferenceWeights[i];
    raw[mask] = cp::raw_score(table, answers_from_mask(table, mask));
    require(raw[mask] == fold, "fold mismatch at mask " + std::to_string(mask));
  }
  for (std::uint32_t mask = 0; mask < kSets; ++mask) {
    cp::Band b = cp::classify(raw[mask], table.max_score());
    require(b == expected_band(raw[mask]), "partition at mask " + std::to_string(mask));
    for (std::uint32_t bit = 0; bit < 20; ++bit) {
      std::uint32_t more = mask | (1u << bit);
      if (more == mask) continue;
      require(raw[more] >= raw[mask], "raw not monotone at mask " + std::to_string(mask));
      require(cp::classify(raw[more], table.max_score()) >= b, "band not monotone at mask " + std::to_string(mask));
    }
  }
}

void criterion_4() {
  const auto& table = cp::bundled_table();
  auto rules = cp::compile_ruleset(table);
  std::vector<std::uint32_t> masks = {0u, (1u << 20) - 1};
  for (std::uint32_t i = 0; i < 20; ++i) masks.push_back(1u << i);
  testing::Rng rng(20240601);
  std::uniform_int_distribution<std::uint32_t> dist(0, (1u << 20) - 1);
  for (int i = 0; i < 10000; ++i) masks.push_back(dist(rng));

  for (std::uint32_t mask : masks) {
    auto answers = answers_from_mask(table, mask);
    auto direct = cp::diagnose(table, answers);
    auto eng = cp::run_engine_diagnosis(rules, table, answers);
    require(eng.raw_score == direct.raw_score, "weightage differs at mask " + std::to_string(mask));
    require(eng.band == direct.band, "band differs at mask " + std::to_string(mask));
  }
}

std::vector<dsl::RuleDef> rules_of(const dsl::Program& p) {
  std::vector<dsl::RuleDef> out;
  for (const auto& c : p)
    if (auto* r = std::get_if<dsl::RuleDef>(&c.node)) out.push_back(*r);
  return out;
}

void criterion_5() {
  std::size_t joined = 0;  // activations over two or more facts
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    testing::Rng rng(1'000'000 + seed);
    auto inst = testing::random_match_instance(rng);
    auto rules = rules_of(inst.program);
    engine::Session s(engine::compile(inst.program));
    std::size_t ops = 1 + testing::pick(rng, 30);
    for (std::size_t op = 0; op < ops; ++op) {
      auto live = s.facts();
      if (!live.empty() && testing::chance(rng, 0.3)) s.retract_fact(live[testing::pick(rng, live.size())]->id);
      else s.assert_fact(testing::pick_from(rng, inst.candidates));

      std::multiset<std::pair<std::string, std::vector<FactId>>> got;
      std::set<std::pair<std::string, std::vector<FactId>>> want;
      for (const auto& a : s.agenda()) {
        got.insert({a.rule, a.facts});
        if (a.facts.size() > 1) ++joined;
      }
      std::vector<Fact> facts;
      for (const Fact* f : s.facts()) facts.push_back(*f);
      for (const auto& m : oracle::match_all(rules, facts)) want.insert({m.rule, m.facts});
      require(std::equal(got.begin(), got.end(), want.begin(), want.end()),
              "agenda differs at seed " + std::to_string(seed) + " op " + std::to_string(op));
    }
  }
  require(joined > 1000, "instances rarely exercise joins");
}

std::int64_t weight_added_by(const std::string& file, const std::string& symptom) {
  auto program = dsl::parse_program(slurp(std::string(CPES_SAMPLES_DIR) + file));
  engine::Session s(engine::compile(program));
  s.assert_fact("(answer (ident " + symptom + ") (text no))");
  s.run();
  require(s.get_global("weightage") == Value{std::int64_t{0}}, file + " fired on a 'no' answer");
  s.assert_fact("(answer (ident " + symptom + ") (text yes))");
  s.run();
  return std::get<std::int64_t>(s.get_global("weightage"));
}

void criterion_6() {
  require(weight_added_by("/corpus/spastic.rules", "spasticity") == 5, "spastic rule does not add 5");
  require(weight_added_by("/corpus/abnormal_sensation.rules", "abnormal-sensation") == 1,
          "abnormal-sensation rule does not add 1");

  auto rules = engine::compile(dsl::parse_program(slurp(CPES_SAMPLES_DIR "/corpus/diagnosis.rules")));
  for (std::int64_t raw = 0; raw <= 51; ++raw) {
    engine::Session s(rules);
    s.set_global("weightage", Value{raw});
    s.assert_fact("(result diagnosis-rule)");
    s.run();
    std::string want = std::to_string(raw) + "\n" + cp::band_sentence(cp::classify(raw, 51)) + "\n";
    require(s.take_output() == want, "diagnosis output differs at raw " + std::to_string(raw));
  }
}

void criterion_8() {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    testing::ProgramGenerator gen(5'000 + seed);
    dsl::Program p = gen.program(1 + seed % 10);
    dsl::Program back = dsl::parse_program(dsl::pretty_print(p));
    require(back == p, "round trip differs at seed " + std::to_string(seed));
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "table fidelity", criterion_1},
      {2, "band boundaries", criterion_2},
      {3, "exhaustive scorer sweep", criterion_3},
      {4, "engine/direct equivalence", criterion_4},
      {5, "differential matching", criterion_5},
      {6, "corpus fidelity", criterion_6},
      {8, "round-trip property", criterion_8},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (c.id == 8)
      std::cout << "criterion 7: NOTE accuracy claim not reproducible (no published cases); covered by 2-4\n";
    auto start = std::chrono::steady_clock::now();
    std::string status = "PASS";
    std::string detail;
    try {
      c.check();
    } catch (const Failure& f) {
      status = "FAIL";
      detail = f.what;
    } catch (const std::exception& e) {
      status = "FAIL";
      detail = std::string("exception: ") + e.what();
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << c.id << ": " << status << " " << c.name << " (" << ms << " ms)";
    if (!detail.empty()) std::cout << ": " << detail;
    std::cout << "\n";
    if (status == "FAIL") ++failed;
  }
  return failed == 0 ? 0 : 1;
}
