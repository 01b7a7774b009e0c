#pragma once

#include <cpes/cp/scoring.hpp>

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>

namespace cpes::cp {

// "y", "yes", "n", "no" in any letter case.
inline std::optional<Answer> parse_yes_no(std::string_view text) {
  std::string s(detail::trim(text));
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "y" || s == "yes") return Answer::yes;
  if (s == "n" || s == "no") return Answer::no;
  return std::nullopt;
}

// Reads `symptom-id: yes|no` lines. Ids must exist in the table and appear
// at most once. Completeness is checked later by the scorer.
inline AnswerSet parse_answers(std::string_view source, const SymptomTable& table) {
  AnswerSet out;
  std::vector<LineDiagnostic> errors;
  detail::for_each_line(source, [&](std::size_t line, std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) {
      errors.push_back({line, "expected 'symptom-id: yes|no'"});
      return;
    }
    std::string id(detail::trim(text.substr(0, colon)));
    std::string_view value = detail::trim(text.substr(colon + 1));
    if (!table.find(id)) {
      errors.push_back({line, "unknown symptom id '" + id + "'"});
      return;
    }
    std::string lowered(value);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lowered != "yes" && lowered != "no") {
      errors.push_back({line, "answer must be yes or no, got '" + std::string(value) + "'"});
      return;
    }
    if (!out.emplace(id, lowered == "yes" ? Answer::yes : Answer::no).second)
      errors.push_back({line, "symptom '" + id + "' answered twice"});
  });
  if (!errors.empty()) throw InputError(std::move(errors));
  return out;
}

}  // namespace cpes::cp
