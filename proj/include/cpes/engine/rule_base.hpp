#pragma once

#include <cpes/dsl/ast.hpp>
#include <cpes/engine/fact.hpp>
#include <cpes/error.hpp>

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace cpes::engine {

struct TemplateInfo {
  std::string name;
  SlotNames slot_names;
  std::vector<Value> defaults;  // `nil` where no default was declared

  std::optional<std::size_t> slot_index(std::string_view slot) const {
    for (std::size_t i = 0; i < slot_names->size(); ++i)
      if ((*slot_names)[i] == slot) return i;
    return std::nullopt;
  }
};

// The compiled network. Node and memory indices are shared between the
// immutable RuleBase and the per-session memories that hang off it.
namespace net {

// A node in the alpha discrimination tree. Children of the root test the
// fact's name, shape and arity; deeper nodes test one field against a
// constant. A node owns an alpha memory when some pattern ends there.
struct AlphaNode {
  bool is_type_test = false;
  std::string name;
  bool templated = false;
  std::size_t arity = 0;
  std::size_t field = 0;
  Value constant;
  std::vector<std::size_t> children;
  std::optional<std::size_t> memory;
};

// Successor joins are kept deepest-first so a fact that fills several
// patterns of one rule is not joined twice.
struct AlphaMemoryInfo {
  std::vector<std::size_t> successors;
};

// Either binds variable slot `var` to the field value or tests it against
// the existing binding.
struct JoinOp {
  std::size_t field;
  std::size_t var;
  bool test;
};

struct JoinNode {
  std::size_t rule;
  std::size_t depth;  // pattern index within the rule
  std::size_t alpha_memory;
  std::vector<JoinOp> ops;
};

}  // namespace net

struct CompiledRule {
  dsl::RuleDef def;
  std::vector<std::size_t> joins;  // one per pattern, in order
  std::map<std::string, std::size_t> value_vars;
  std::map<std::string, std::size_t> address_vars;  // -> pattern index
};

struct NetworkStats {
  std::size_t alpha_nodes = 0;  // excluding the root
  std::size_t alpha_memories = 0;
  std::size_t join_nodes = 0;
  std::size_t beta_memories = 0;
  std::size_t production_nodes = 0;
};

struct CompileOptions {
  // Reuse identical alpha test nodes across patterns. Turning it off builds
  // one private alpha chain per pattern; only useful for measuring sharing.
  bool share_alpha_nodes = true;
};

namespace detail {
class Compiler;
}

class RuleBase;
std::shared_ptr<const RuleBase> compile(std::span<const dsl::Construct>, CompileOptions = {});

class RuleBase {
 public:
  const std::vector<TemplateInfo>& templates() const { return templates_; }
  const std::vector<dsl::GlobalDef>& globals() const { return globals_; }
  const std::vector<CompiledRule>& rules() const { return rules_; }
  const std::vector<dsl::FactLiteral>& initial_facts() const { return facts_; }

  const TemplateInfo* find_template(std::string_view name) const {
    for (const auto& t : templates_)
      if (t.name == name) return &t;
    return nullptr;
  }

  const std::vector<net::AlphaNode>& alpha_nodes() const { return alpha_; }
  const std::vector<net::AlphaMemoryInfo>& alpha_memories() const { return alpha_memories_; }
  const std::vector<net::JoinNode>& joins() const { return joins_; }

  NetworkStats stats() const {
    NetworkStats s;
    s.alpha_nodes = alpha_.size() - 1;
    s.alpha_memories = alpha_memories_.size();
    s.join_nodes = joins_.size();
    s.beta_memories = static_cast<std::size_t>(
        std::count_if(joins_.begin(), joins_.end(), [](const net::JoinNode& j) { return j.depth > 0; }));
    s.production_nodes = rules_.size();
    return s;
  }

  // Alpha memories whose tests the fact passes, in tree order.
  std::vector<std::size_t> matching_memories(const Fact& f) const {
    std::vector<std::size_t> out;
    std::vector<std::size_t> stack;
    for (auto it = alpha_[0].children.rbegin(); it != alpha_[0].children.rend(); ++it) stack.push_back(*it);
    while (!stack.empty()) {
      const net::AlphaNode& n = alpha_[stack.back()];
      stack.pop_back();
      bool pass = n.is_type_test
                      ? (n.name == f.name && n.templated == f.templated() && n.arity == f.values.size())
                      : f.values[n.field] == n.constant;
      if (!pass) continue;
      if (n.memory) out.push_back(*n.memory);
      for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
    }
    return out;
  }

 private:
  friend class detail::Compiler;

  std::vector<TemplateInfo> templates_;
  std::vector<dsl::GlobalDef> globals_;
  std::vector<CompiledRule> rules_;
  std::vector<dsl::FactLiteral> facts_;
  std::vector<net::AlphaNode> alpha_{net::AlphaNode{}};  // [0] is the root
  std::vector<net::AlphaMemoryInfo> alpha_memories_;
  std::vector<net::JoinNode> joins_;
};

namespace detail {

// A pattern reduced to field indices.
struct ResolvedPattern {
  std::string name;
  bool templated = false;
  std::size_t arity = 0;
  std::vector<std::pair<std::size_t, dsl::Constraint>> fields;  // sorted by field
};

inline std::string where(const dsl::Construct& c) {
  return std::to_string(c.pos.line) + ":" + std::to_string(c.pos.column) + ": ";
}

class Compiler {
 public:
  Compiler(RuleBase& rb, CompileOptions opts) : rb_(rb), opts_(opts) {}

  void run(std::span<const dsl::Construct> constructs) {
    for (const auto& c : constructs) {
      pos_ = where(c);
      std::visit([&](const auto& node) { add(node); }, c.node);
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw CompileError(pos_ + msg); }

  void add(const dsl::TemplateDef& t) {
    if (rb_.find_template(t.name)) fail("duplicate template '" + t.name + "'");
    std::vector<std::string> names;
    TemplateInfo info;
    info.name = t.name;
    for (const auto& s : t.slots) {
      names.push_back(s.name);
      info.defaults.push_back(s.default_value.value_or(Symbol{"nil"}));
    }
    info.slot_names = std::make_shared<const std::vector<std::string>>(std::move(names));
    rb_.templates_.push_back(std::move(info));
  }

  void add(const dsl::GlobalDef& g) {
    if (declared_globals_.count(g.name)) fail("duplicate global ?*" + g.name + "*");
    if (!is_number(g.initial)) fail("global ?*" + g.name + "* must be numeric");
    declared_globals_.insert(g.name);
    rb_.globals_.push_back(g);
  }

  void add(const dsl::FactLiteral& f) {
    check_fact(f);
    rb_.facts_.push_back(f);
  }

  void add(const dsl::RuleDef& r) {
    for (const auto& existing : rb_.rules_)
      if (existing.def.name == r.name) fail("duplicate rule '" + r.name + "'");

    CompiledRule cr;
    cr.def = r;
    std::size_t rule_index = rb_.rules_.size();
    for (std::size_t d = 0; d < r.lhs.size(); ++d) {
      const dsl::PatternSpec& p = r.lhs[d];
      ResolvedPattern rp = resolve(p);
      if (p.address) cr.address_vars[*p.address] = d;

      net::JoinNode j{rule_index, d, alpha_memory_for(rp), {}};
      for (const auto& [field, c] : rp.fields) {
        if (auto* v = std::get_if<dsl::Variable>(&c)) {
          auto it = cr.value_vars.find(v->name);
          if (it != cr.value_vars.end()) {
            j.ops.push_back({field, it->second, true});
          } else {
            std::size_t idx = cr.value_vars.size();
            cr.value_vars[v->name] = idx;
            j.ops.push_back({field, idx, false});
          }
        }
      }
      std::size_t join_index = rb_.joins_.size();
      rb_.joins_.push_back(std::move(j));
      auto& succ = rb_.alpha_memories_[rb_.joins_.back().alpha_memory].successors;
      succ.insert(succ.begin(), join_index);
      cr.joins.push_back(join_index);
    }
    for (const auto& a : r.rhs) check_action(a);
    rb_.rules_.push_back(std::move(cr));
  }

  ResolvedPattern resolve(const dsl::PatternSpec& p) {
    ResolvedPattern rp;
    rp.name = p.name;
    const TemplateInfo* t = rb_.find_template(p.name);
    if (p.shape == dsl::FactShape::templated) {
      if (!t) fail("pattern names undeclared template '" + p.name + "'");
    } else if (t && !p.fields.empty()) {
      fail("template '" + p.name + "' must be matched with slot syntax");
    }
    if (t) {
      rp.templated = true;
      rp.arity = t->slot_names->size();
      for (const auto& sc : p.slots) {
        auto idx = t->slot_index(sc.slot);
        if (!idx) fail("template '" + p.name + "' has no slot '" + sc.slot + "'");
        rp.fields.emplace_back(*idx, sc.constraint);
      }
      std::stable_sort(rp.fields.begin(), rp.fields.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
    } else {
      rp.arity = p.fields.size();
      for (std::size_t i = 0; i < p.fields.size(); ++i) rp.fields.emplace_back(i, p.fields[i]);
    }
    return rp;
  }

  std::size_t child(std::size_t parent, net::AlphaNode node) {
    auto& nodes = rb_.alpha_;
    if (opts_.share_alpha_nodes) {
      for (std::size_t c : nodes[parent].children) {
        const auto& n = nodes[c];
        bool same = n.is_type_test == node.is_type_test &&
                    (n.is_type_test ? (n.name == node.name && n.templated == node.templated && n.arity == node.arity)
                                    : (n.field == node.field && n.constant == node.constant));
        if (same) return c;
      }
    }
    nodes.push_back(std::move(node));
    std::size_t idx = nodes.size() - 1;
    nodes[parent].children.push_back(idx);
    return idx;
  }

  std::size_t alpha_memory_for(const ResolvedPattern& rp) {
    net::AlphaNode type;
    type.is_type_test = true;
    type.name = rp.name;
    type.templated = rp.templated;
    type.arity = rp.arity;
    std::size_t at = child(0, std::move(type));
    for (const auto& [field, c] : rp.fields) {
      if (auto* v = std::get_if<Value>(&c)) {
        net::AlphaNode test;
        test.field = field;
        test.constant = *v;
        at = child(at, std::move(test));
      }
    }
    auto& node = rb_.alpha_[at];
    if (!node.memory) {
      node.memory = rb_.alpha_memories_.size();
      rb_.alpha_memories_.emplace_back();
    }
    return *node.memory;
  }

  void check_global(const std::string& name) {
    if (!declared_globals_.count(name)) fail("global ?*" + name + "* used before its defglobal");
  }

  void check_term(const dsl::Term& t) {
    if (auto* g = std::get_if<dsl::Global>(&t)) check_global(g->name);
  }

  void check_fact(const dsl::FactLiteral& f) {
    const TemplateInfo* t = rb_.find_template(f.name);
    if (f.shape == dsl::FactShape::templated) {
      if (!t) fail("fact names undeclared template '" + f.name + "'");
      for (const auto& s : f.slots) {
        if (!t->slot_index(s.slot)) fail("template '" + f.name + "' has no slot '" + s.slot + "'");
        check_term(s.value);
      }
    } else {
      if (t && !f.fields.empty()) fail("template '" + f.name + "' must be asserted with slot syntax");
      for (const auto& v : f.fields) check_term(v);
    }
  }

  void check_expr(const dsl::Expr& e) {
    if (auto* g = std::get_if<dsl::Global>(&e.node)) check_global(g->name);
    else if (auto* a = std::get_if<dsl::Arith>(&e.node))
      for (const auto& arg : a->args) check_expr(arg);
  }

  void check_condition(const dsl::Condition& c) {
    if (auto* cmp = std::get_if<dsl::Comparison>(&c.node)) {
      check_expr(cmp->lhs);
      check_expr(cmp->rhs);
    } else {
      for (const auto& t : std::get<dsl::Conjunction>(c.node).terms) check_condition(t);
    }
  }

  void check_action(const dsl::ActionSpec& a) {
    std::visit(
        [&](const auto& act) {
          using T = std::decay_t<decltype(act)>;
          if constexpr (std::is_same_v<T, dsl::AssertAction>) {
            check_fact(act.fact);
          } else if constexpr (std::is_same_v<T, dsl::BindAction>) {
            check_global(act.global);
            check_expr(act.value);
          } else if constexpr (std::is_same_v<T, dsl::PrintAction>) {
            for (const auto& e : act.items) check_expr(e);
          } else if constexpr (std::is_same_v<T, dsl::IfAction>) {
            check_condition(act.condition);
            for (const auto& s : act.then_actions) check_action(s);
            if (act.else_actions)
              for (const auto& s : *act.else_actions) check_action(s);
          }
        },
        a.node);
  }

  RuleBase& rb_;
  CompileOptions opts_;
  std::set<std::string> declared_globals_;
  std::string pos_;
};

}  // namespace detail

// Validates the constructs in order (templates and globals must be declared
// before a rule uses them) and builds the alpha/beta network.
inline std::shared_ptr<const RuleBase> compile(std::span<const dsl::Construct> constructs, CompileOptions opts) {
  auto rb = std::make_shared<RuleBase>();
  detail::Compiler(*rb, opts).run(constructs);
  return rb;
}

}  // namespace cpes::engine
