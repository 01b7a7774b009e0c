#pragma once

#include <cpes/dsl/parser.hpp>
#include <cpes/engine/rule_base.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cpes::engine {

// A partial match: one fact per pattern matched so far plus the values of the
// variables bound by those patterns, indexed by CompiledRule::value_vars.
struct Token {
  std::vector<FactId> facts;
  std::vector<Value> bindings;

  bool contains(FactId id) const {
    for (FactId f : facts)
      if (f == id) return true;
    return false;
  }
};

struct Activation {
  std::size_t rule;
  Token token;
  std::int64_t salience;
  FactId recency;  // largest fact id in the token
  std::uint64_t sequence;
};

struct AgendaEntry {
  std::string rule;
  std::vector<FactId> facts;
  bool operator==(const AgendaEntry&) const = default;
  auto operator<=>(const AgendaEntry&) const = default;
};

enum class TraceKind {
  fact_asserted,
  fact_retracted,
  activation_added,
  activation_removed,
  rule_fired,
  global_changed,
  output_emitted,
};

inline const char* to_string(TraceKind k) {
  switch (k) {
    case TraceKind::fact_asserted: return "fact-asserted";
    case TraceKind::fact_retracted: return "fact-retracted";
    case TraceKind::activation_added: return "activation-added";
    case TraceKind::activation_removed: return "activation-removed";
    case TraceKind::rule_fired: return "rule-fired";
    case TraceKind::global_changed: return "global-changed";
    case TraceKind::output_emitted: return "output-emitted";
  }
  return "?";
}

struct TraceEvent {
  std::uint64_t step;
  TraceKind kind;
  std::string details;  // single line, no tabs
  bool operator==(const TraceEvent&) const = default;
};

// `step<TAB>kind<TAB>details`
inline std::string format_trace_line(const TraceEvent& e) {
  return std::to_string(e.step) + "\t" + to_string(e.kind) + "\t" + e.details;
}

struct AssertResult {
  FactId id;        // the new fact, or the live fact with identical content
  bool duplicate;   // true when nothing was asserted
};

namespace detail {

struct ActivationOrder {
  bool operator()(const Activation& a, const Activation& b) const {
    if (a.salience != b.salience) return a.salience > b.salience;
    if (a.recency != b.recency) return a.recency > b.recency;
    return a.sequence > b.sequence;
  }
};

inline std::string fact_list(const std::vector<FactId>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ",";
    s += "f-" + std::to_string(ids[i]);
  }
  return s;
}

inline std::string escape_line(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\n') out += "\\n";
    else if (c == '\t') out += "\\t";
    else if (c == '\\') out += "\\\\";
    else out += c;
  }
  return out;
}

}  // namespace detail

// Working memory, agenda and global registers over a shared, immutable
// RuleBase. Single owner; not safe for concurrent mutation.
class Session {
 public:
  explicit Session(std::shared_ptr<const RuleBase> rules)
      : rb_(std::move(rules)),
        alpha_mem_(rb_->alpha_memories().size()),
        left_mem_(rb_->joins().size()) {
    for (const auto& g : rb_->globals()) globals_[g.name] = g.initial;
  }

  const RuleBase& rule_base() const { return *rb_; }

  // ---- working memory -----------------------------------------------------

  // Throws UsageError for an unknown template or slot, or a fact that still
  // contains variables.
  AssertResult assert_fact(const dsl::FactLiteral& literal) {
    std::vector<std::pair<std::string, Value>> slots;
    std::vector<Value> fields;
    auto value_of = [](const dsl::Term& t) -> Value {
      if (auto* v = std::get_if<Value>(&t)) return *v;
      throw UsageError("facts asserted from outside a rule must be ground");
    };
    for (const auto& s : literal.slots) slots.emplace_back(s.slot, value_of(s.value));
    for (const auto& f : literal.fields) fields.push_back(value_of(f));
    return insert(build_fact(literal.name, literal.shape, std::move(fields), std::move(slots)));
  }

  // Parses a single fact such as `(answer (ident spasticity) (text yes))`.
  AssertResult assert_fact(std::string_view source) {
    dsl::Program p = dsl::parse_program(source);
    if (p.size() != 1 || !std::holds_alternative<dsl::FactLiteral>(p[0].node))
      throw UsageError("expected exactly one fact, got '" + std::string(source) + "'");
    return assert_fact(std::get<dsl::FactLiteral>(p[0].node));
  }

  // Returns false if the id is not a live fact.
  bool retract_fact(FactId id) {
    auto it = facts_.find(id);
    if (it == facts_.end()) return false;
    Fact fact = std::move(it->second);
    facts_.erase(it);
    content_.erase(content_key(fact));
    record(TraceKind::fact_retracted, "f-" + std::to_string(id) + " " + to_source(fact));

    std::set<std::size_t> rules;
    for (std::size_t m : rb_->matching_memories(fact)) {
      auto& mem = alpha_mem_[m];
      auto pos = std::lower_bound(mem.begin(), mem.end(), id);
      if (pos != mem.end() && *pos == id) mem.erase(pos);
      for (std::size_t j : rb_->alpha_memories()[m].successors) rules.insert(rb_->joins()[j].rule);
    }
    for (std::size_t r : rules) {
      for (std::size_t j : rb_->rules()[r].joins) {
        auto& tokens = left_mem_[j];
        std::erase_if(tokens, [&](const Token& t) { return t.contains(id); });
      }
    }
    for (auto a = agenda_.begin(); a != agenda_.end();) {
      if (a->token.contains(id)) {
        record(TraceKind::activation_removed, describe(*a));
        a = agenda_.erase(a);
      } else {
        ++a;
      }
    }
    return true;
  }

  const Fact* find_fact(FactId id) const {
    auto it = facts_.find(id);
    return it == facts_.end() ? nullptr : &it->second;
  }

  std::vector<const Fact*> facts() const {
    std::vector<const Fact*> out;
    for (const auto& [id, f] : facts_) out.push_back(&f);
    return out;
  }

  // ---- agenda and firing --------------------------------------------------

  std::vector<AgendaEntry> agenda() const {
    std::vector<AgendaEntry> out;
    for (const auto& a : agenda_) out.push_back({rb_->rules()[a.rule].def.name, a.token.facts});
    return out;
  }

  // Fires activations in priority order until the agenda is empty or
  // `max_firings` is reached. Returns the number of rules fired.
  std::size_t run(std::optional<std::size_t> max_firings = std::nullopt) {
    std::size_t fired = 0;
    while (!agenda_.empty() && (!max_firings || fired < *max_firings)) {
      Activation act = agenda_.extract(agenda_.begin()).value();
      ++fired;
      ++firing_count_;
      record(TraceKind::rule_fired, describe(act));
      const CompiledRule& rule = rb_->rules()[act.rule];
      Frame frame{rule, act.token};
      execute(frame, rule.def.rhs);
    }
    return fired;
  }

  std::size_t firing_count() const { return firing_count_; }

  // ---- globals, output, trace ---------------------------------------------

  Value get_global(const std::string& name) const {
    auto it = globals_.find(name);
    if (it == globals_.end()) throw UsageError("undeclared global ?*" + name + "*");
    return it->second;
  }

  // Returns the previous value.
  Value set_global(const std::string& name, Value v) {
    auto it = globals_.find(name);
    if (it == globals_.end()) throw UsageError("undeclared global ?*" + name + "*");
    if (!is_number(v)) throw UsageError("global ?*" + name + "* only holds numbers");
    Value old = std::exchange(it->second, std::move(v));
    record(TraceKind::global_changed, "?*" + name + "* " + to_source(old) + " -> " + to_source(it->second));
    return old;
  }

  std::string take_output() { return std::exchange(output_, {}); }

  const std::vector<TraceEvent>& trace() const { return trace_; }

  // Total tokens held in beta memories; zero once working memory is empty.
  std::size_t beta_token_count() const {
    std::size_t n = 0;
    for (const auto& m : left_mem_) n += m.size();
    return n;
  }

 private:
  struct Frame {
    const CompiledRule& rule;
    const Token& token;
  };

  using ContentKey = std::tuple<std::string, bool, std::vector<Value>>;

  static ContentKey content_key(const Fact& f) { return {f.name, f.templated(), f.values}; }

  void record(TraceKind kind, std::string details) {
    trace_.push_back({++step_, kind, detail::escape_line(details)});
  }

  std::string describe(const Activation& a) const {
    return rb_->rules()[a.rule].def.name + " " + detail::fact_list(a.token.facts);
  }

  Fact build_fact(const std::string& name, dsl::FactShape shape, std::vector<Value> fields,
                  std::vector<std::pair<std::string, Value>> slots) const {
    Fact f;
    f.name = name;
    const TemplateInfo* t = rb_->find_template(name);
    if (shape == dsl::FactShape::templated && !t) throw UsageError("unknown template '" + name + "'");
    if (t) {
      if (shape == dsl::FactShape::ordered && !fields.empty())
        throw UsageError("template '" + name + "' must be asserted with slot syntax");
      f.slot_names = t->slot_names;
      f.values = t->defaults;
      for (auto& [slot, v] : slots) {
        auto idx = t->slot_index(slot);
        if (!idx) throw UsageError("template '" + name + "' has no slot '" + slot + "'");
        f.values[*idx] = std::move(v);
      }
    } else {
      f.values = std::move(fields);
    }
    return f;
  }

  AssertResult insert(Fact fact) {
    auto key = content_key(fact);
    if (auto it = content_.find(key); it != content_.end()) return {it->second, true};
    fact.id = next_id_++;
    FactId id = fact.id;
    content_.emplace(std::move(key), id);
    const Fact& stored = facts_.emplace(id, std::move(fact)).first->second;
    record(TraceKind::fact_asserted, "f-" + std::to_string(id) + " " + to_source(stored));

    // Each memory is filled and its successors activated before the next
    // memory sees the fact.
    for (std::size_t m : rb_->matching_memories(stored)) {
      alpha_mem_[m].push_back(id);
      for (std::size_t j : rb_->alpha_memories()[m].successors) right_activate(j, stored);
    }
    return {id, false};
  }

  std::optional<Token> join(const Token& left, const Fact& f, const net::JoinNode& j) const {
    Token t;
    t.facts = left.facts;
    t.facts.push_back(f.id);
    t.bindings = left.bindings;
    for (const auto& op : j.ops) {
      const Value& v = f.values[op.field];
      if (op.test) {
        if (!(t.bindings[op.var] == v)) return std::nullopt;
      } else {
        t.bindings.push_back(v);
      }
    }
    return t;
  }

  void right_activate(std::size_t j, const Fact& f) {
    const net::JoinNode& node = rb_->joins()[j];
    if (node.depth == 0) {
      if (auto t = join(Token{}, f, node)) emit(node, std::move(*t));
      return;
    }
    auto& tokens = left_mem_[j];
    for (std::size_t k = 0; k < tokens.size(); ++k)
      if (auto t = join(tokens[k], f, node)) emit(node, std::move(*t));
  }

  // Passes a token produced by join `from` to the next join or to the
  // production node.
  void emit(const net::JoinNode& from, Token t) {
    const CompiledRule& rule = rb_->rules()[from.rule];
    if (from.depth + 1 == rule.joins.size()) {
      FactId recency = *std::max_element(t.facts.begin(), t.facts.end());
      Activation a{from.rule, std::move(t), rule.def.salience, recency, next_sequence_++};
      record(TraceKind::activation_added, describe(a));
      agenda_.insert(std::move(a));
      return;
    }
    std::size_t next = rule.joins[from.depth + 1];
    const net::JoinNode& node = rb_->joins()[next];
    left_mem_[next].push_back(t);
    for (FactId id : alpha_mem_[node.alpha_memory])
      if (auto nt = join(t, facts_.at(id), node)) emit(node, std::move(*nt));
  }

  // ---- action interpreter -------------------------------------------------

  [[noreturn]] static void fail(const Frame& fr, const std::string& msg) {
    throw ActionError(fr.rule.def.name, msg);
  }

  Value variable(const Frame& fr, const std::string& name) const {
    return fr.token.bindings[fr.rule.value_vars.at(name)];
  }

  Value eval(const Frame& fr, const dsl::Expr& e) const {
    if (auto* v = std::get_if<Value>(&e.node)) return *v;
    if (auto* var = std::get_if<dsl::Variable>(&e.node)) return variable(fr, var->name);
    if (auto* g = std::get_if<dsl::Global>(&e.node)) return globals_.at(g->name);

    const auto& a = std::get<dsl::Arith>(e.node);
    std::vector<Value> args;
    for (const auto& arg : a.args) {
      args.push_back(eval(fr, arg));
      if (!is_number(args.back())) fail(fr, "arithmetic on non-numeric value " + to_source(args.back()));
    }
    if (args.size() == 1 && a.op == dsl::ArithOp::sub) return arith(fr, a.op, std::int64_t{0}, args[0]);
    if (args.size() == 1 && a.op == dsl::ArithOp::div) return arith(fr, a.op, std::int64_t{1}, args[0]);
    Value acc = args[0];
    for (std::size_t k = 1; k < args.size(); ++k) acc = arith(fr, a.op, acc, args[k]);
    return acc;
  }

  // Integers stay integers unless a division leaves a remainder or a float
  // is involved.
  static Value arith(const Frame& fr, dsl::ArithOp op, const Value& x, const Value& y) {
    auto* xi = std::get_if<std::int64_t>(&x);
    auto* yi = std::get_if<std::int64_t>(&y);
    if (op == dsl::ArithOp::div && as_double(y) == 0.0) fail(fr, "division by zero");
    if (xi && yi) {
      std::int64_t r{};
      bool overflow = false;
      switch (op) {
        case dsl::ArithOp::add: overflow = __builtin_add_overflow(*xi, *yi, &r); break;
        case dsl::ArithOp::sub: overflow = __builtin_sub_overflow(*xi, *yi, &r); break;
        case dsl::ArithOp::mul: overflow = __builtin_mul_overflow(*xi, *yi, &r); break;
        case dsl::ArithOp::div:
          if (*yi == -1 && *xi == std::numeric_limits<std::int64_t>::min()) {
            overflow = true;
          } else if (*xi % *yi == 0) {
            r = *xi / *yi;
          } else {
            return static_cast<double>(*xi) / static_cast<double>(*yi);
          }
          break;
      }
      if (overflow) fail(fr, "integer overflow");
      return r;
    }
    double a = as_double(x), b = as_double(y);
    switch (op) {
      case dsl::ArithOp::add: return a + b;
      case dsl::ArithOp::sub: return a - b;
      case dsl::ArithOp::mul: return a * b;
      case dsl::ArithOp::div: return a / b;
    }
    return 0.0;
  }

  bool test(const Frame& fr, const dsl::Condition& c) const {
    if (auto* conj = std::get_if<dsl::Conjunction>(&c.node)) {
      for (const auto& t : conj->terms)
        if (!test(fr, t)) return false;
      return true;
    }
    const auto& cmp = std::get<dsl::Comparison>(c.node);
    Value l = eval(fr, cmp.lhs), r = eval(fr, cmp.rhs);
    bool numeric = is_number(l) && is_number(r);
    if (cmp.op == dsl::CompareOp::eq || cmp.op == dsl::CompareOp::ne) {
      bool eq = numeric ? compare(l, r) == 0 : l == r;
      return cmp.op == dsl::CompareOp::eq ? eq : !eq;
    }
    if (!numeric) fail(fr, "ordering comparison on non-numeric value");
    int s = compare(l, r);
    switch (cmp.op) {
      case dsl::CompareOp::lt: return s < 0;
      case dsl::CompareOp::le: return s <= 0;
      case dsl::CompareOp::gt: return s > 0;
      case dsl::CompareOp::ge: return s >= 0;
      default: return false;
    }
  }

  static int compare(const Value& l, const Value& r) {
    auto* li = std::get_if<std::int64_t>(&l);
    auto* ri = std::get_if<std::int64_t>(&r);
    if (li && ri) return *li < *ri ? -1 : (*li > *ri ? 1 : 0);
    double a = as_double(l), b = as_double(r);
    return a < b ? -1 : (a > b ? 1 : 0);
  }

  Value term(const Frame& fr, const dsl::Term& t) const {
    if (auto* v = std::get_if<Value>(&t)) return *v;
    if (auto* var = std::get_if<dsl::Variable>(&t)) return variable(fr, var->name);
    return globals_.at(std::get<dsl::Global>(t).name);
  }

  void execute(const Frame& fr, const std::vector<dsl::ActionSpec>& actions) {
    for (const auto& a : actions) {
      std::visit(
          [&](const auto& act) {
            using T = std::decay_t<decltype(act)>;
            if constexpr (std::is_same_v<T, dsl::AssertAction>) {
              const auto& lit = act.fact;
              std::vector<Value> fields;
              std::vector<std::pair<std::string, Value>> slots;
              for (const auto& f : lit.fields) fields.push_back(term(fr, f));
              for (const auto& s : lit.slots) slots.emplace_back(s.slot, term(fr, s.value));
              try {
                insert(build_fact(lit.name, lit.shape, std::move(fields), std::move(slots)));
              } catch (const UsageError& e) {
                fail(fr, e.what());
              }
            } else if constexpr (std::is_same_v<T, dsl::RetractAction>) {
              FactId id = fr.token.facts[fr.rule.address_vars.at(act.variable)];
              if (!retract_fact(id)) fail(fr, "?" + act.variable + " (f-" + std::to_string(id) + ") is already retracted");
            } else if constexpr (std::is_same_v<T, dsl::BindAction>) {
              Value v = eval(fr, act.value);
              if (!is_number(v)) fail(fr, "global ?*" + act.global + "* only holds numbers");
              set_global(act.global, std::move(v));
            } else if constexpr (std::is_same_v<T, dsl::PrintAction>) {
              std::string text;
              for (const auto& e : act.items) text += to_display(eval(fr, e));
              if (act.newline) text += "\n";
              output_ += text;
              record(TraceKind::output_emitted, text);
            } else {
              if (test(fr, act.condition)) execute(fr, act.then_actions);
              else if (act.else_actions) execute(fr, *act.else_actions);
            }
          },
          a.node);
    }
  }

  std::shared_ptr<const RuleBase> rb_;
  std::map<FactId, Fact> facts_;
  std::map<ContentKey, FactId> content_;
  std::vector<std::vector<FactId>> alpha_mem_;  // ascending ids
  std::vector<std::vector<Token>> left_mem_;    // left input of each join; unused at depth 0
  std::set<Activation, detail::ActivationOrder> agenda_;
  std::map<std::string, Value> globals_;
  std::string output_;
  std::vector<TraceEvent> trace_;
  FactId next_id_ = 1;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t step_ = 0;
  std::size_t firing_count_ = 0;
};

}  // namespace cpes::engine
