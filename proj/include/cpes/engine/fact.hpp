#pragma once

#include <cpes/value.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cpes::engine {

using FactId = std::uint64_t;

using SlotNames = std::shared_ptr<const std::vector<std::string>>;

// A working-memory element. Templated facts store their values in template
// slot order and share the template's slot-name list; ordered facts have no
// slot names.
struct Fact {
  FactId id = 0;
  std::string name;
  SlotNames slot_names;
  std::vector<Value> values;

  bool templated() const { return slot_names != nullptr; }

  std::optional<Value> slot(std::string_view slot) const {
    if (!slot_names) return std::nullopt;
    for (std::size_t i = 0; i < slot_names->size(); ++i)
      if ((*slot_names)[i] == slot) return values[i];
    return std::nullopt;
  }

  // Content key used for duplicate detection; ignores the id.
  bool same_content(const Fact& other) const {
    return name == other.name && templated() == other.templated() && values == other.values;
  }
};

inline std::string to_source(const Fact& f) {
  std::string s = "(" + f.name;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (f.templated()) s += " (" + (*f.slot_names)[i] + " " + to_source(f.values[i]) + ")";
    else s += " " + to_source(f.values[i]);
  }
  return s + ")";
}

}  // namespace cpes::engine
