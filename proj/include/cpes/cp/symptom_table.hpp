#pragma once

#include <cpes/error.hpp>

#include <cctype>
#include <charconv>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cpes::cp {

struct Symptom {
  std::string id;        // lowercase-hyphenated, starts with a letter
  std::string question;  // yes/no question shown to the user
  std::int64_t weight;   // >= 1
  bool operator==(const Symptom&) const = default;
};

class SymptomTable {
 public:
  SymptomTable() = default;
  explicit SymptomTable(std::vector<Symptom> symptoms) : symptoms_(std::move(symptoms)) {}

  const std::vector<Symptom>& symptoms() const { return symptoms_; }
  std::size_t size() const { return symptoms_.size(); }
  const Symptom& operator[](std::size_t i) const { return symptoms_[i]; }

  std::int64_t max_score() const {
    return std::accumulate(symptoms_.begin(), symptoms_.end(), std::int64_t{0},
                           [](std::int64_t s, const Symptom& x) { return s + x.weight; });
  }

  const Symptom* find(std::string_view id) const {
    for (const auto& s : symptoms_)
      if (s.id == id) return &s;
    return nullptr;
  }

 private:
  std::vector<Symptom> symptoms_;
};

struct LineDiagnostic {
  std::size_t line;
  std::string message;
};

// Carries every problem found in an input file, not just the first.
class InputError : public Error {
 public:
  explicit InputError(std::vector<LineDiagnostic> diags)
      : Error(render(diags)), diags_(std::move(diags)) {}

  const std::vector<LineDiagnostic>& diagnostics() const { return diags_; }

 private:
  static std::string render(const std::vector<LineDiagnostic>& d) {
    std::string s;
    for (const auto& x : d) {
      if (!s.empty()) s += "\n";
      s += "line " + std::to_string(x.line) + ": " + x.message;
    }
    return s;
  }

  std::vector<LineDiagnostic> diags_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool valid_id(std::string_view id) {
  if (id.empty() || !std::islower(static_cast<unsigned char>(id.front())) || id.back() == '-') return false;
  char prev = 0;
  for (char c : id) {
    bool ok = std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '-';
    if (!ok || (c == '-' && prev == '-')) return false;
    prev = c;
  }
  return true;
}

// Calls fn(line_number, content) for each non-blank, non-comment line.
template <typename Fn>
void for_each_line(std::string_view source, Fn&& fn) {
  std::size_t line = 0;
  while (!source.empty()) {
    ++line;
    auto nl = source.find('\n');
    std::string_view raw = source.substr(0, nl);
    source = nl == std::string_view::npos ? std::string_view{} : source.substr(nl + 1);
    std::string_view text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    fn(line, text);
  }
}

}  // namespace detail

// Reads `id|question|weight` lines. `#` starts a comment line.
inline SymptomTable load_symptom_table(std::string_view source) {
  std::vector<Symptom> out;
  std::vector<LineDiagnostic> errors;
  std::set<std::string, std::less<>> ids;

  detail::for_each_line(source, [&](std::size_t line, std::string_view text) {
    auto a = text.find('|');
    auto b = a == std::string_view::npos ? a : text.find('|', a + 1);
    if (b == std::string_view::npos || text.find('|', b + 1) != std::string_view::npos) {
      errors.push_back({line, "expected 'id|question|weight'"});
      return;
    }
    std::string_view id = detail::trim(text.substr(0, a));
    std::string_view question = detail::trim(text.substr(a + 1, b - a - 1));
    std::string_view weight_text = detail::trim(text.substr(b + 1));

    if (!detail::valid_id(id)) {
      errors.push_back({line, "invalid symptom id '" + std::string(id) + "'"});
      return;
    }
    if (!ids.insert(std::string(id)).second) {
      errors.push_back({line, "duplicate symptom id '" + std::string(id) + "'"});
      return;
    }
    if (question.empty()) {
      errors.push_back({line, "empty question for '" + std::string(id) + "'"});
      return;
    }
    std::int64_t w{};
    auto [p, ec] = std::from_chars(weight_text.data(), weight_text.data() + weight_text.size(), w);
    if (ec != std::errc{} || p != weight_text.data() + weight_text.size()) {
      errors.push_back({line, "weight '" + std::string(weight_text) + "' is not an integer"});
      return;
    }
    if (w < 1) {
      errors.push_back({line, "weight must be at least 1, got " + std::to_string(w)});
      return;
    }
    out.push_back({std::string(id), std::string(question), w});
  });

  if (errors.empty() && out.empty()) errors.push_back({0, "table has no symptoms"});
  if (!errors.empty()) throw InputError(std::move(errors));
  return SymptomTable(std::move(out));
}

}  // namespace cpes::cp
