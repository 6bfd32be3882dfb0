#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <json.hpp>

#include "topdown/decision.hpp"

namespace topdown {

/// Result of the optional oracle pass of `check --verify`.
struct Verification {
  std::size_t bound = 0;
  /// Set when the answer is false.
  std::optional<bool> witness_confirmed;
  /// Set when the answer is true: no disagreement with the associated
  /// top-down automaton up to `bound` nodes.
  std::optional<bool> bounded_equal;
  std::optional<std::string> first_disagreement;

  bool ok() const { return witness_confirmed.value_or(true) && bounded_equal.value_or(true); }
};

/// JSON report with fields `answer`, `witness`, `stats`, `notes` and, when
/// given, `verification`. Deterministic for a fixed decision.
nlohmann::ordered_json explain(const Decision& decision, const std::optional<Verification>& verification = std::nullopt);

/// Human-readable report.
std::string render_text(const Decision& decision, const std::optional<Verification>& verification = std::nullopt);

}  // namespace topdown
