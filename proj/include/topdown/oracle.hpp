#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "topdown/automata.hpp"
#include "topdown/decision.hpp"
#include "topdown/trees.hpp"

namespace topdown {

/// base ∈ L with base|node = symbol(original), base[node ← symbol(alternative)] ∈ L,
/// but exchanged = base[node ← symbol(original with position := alternative[position])] ∉ L.
struct ExchangeViolation {
  Tree base;
  NodeAddress node;
  std::string symbol;
  std::vector<Tree> original;
  std::vector<Tree> alternative;
  /// 1-based.
  std::uint32_t position;
  Tree exchanged;
};

struct SearchLimits {
  std::size_t max_trees = kDefaultEnumerationCap;
  /// Upper bound on the number of membership tests.
  std::size_t max_checks = 500'000'000;
};

/// Exhaustive search for a violation of the subtree exchange property among
/// trees of at most `max_tree_size` nodes: every member t, every node u of t
/// with a symbol of arity >= 2, every alternative child tuple keeping
/// t[u ← f(alternative)] within the bound, every position. Returns the first
/// violation in canonical order. Missing transitions count as rejection.
std::optional<ExchangeViolation> exchange_violation_search(const Dba& automaton, std::size_t max_tree_size,
                                                           const SearchLimits& limits = {});

/// Rechecks a violation's structure and all three memberships directly.
bool confirm_violation(const Dba& automaton, const ExchangeViolation& violation);

/// The exchange violation a conflict witness stands for.
ExchangeViolation as_exchange_violation(const ConflictWitness& witness);

/// First tree (size, then canonical order) of at most `max_tree_size` nodes on
/// which the two automata disagree.
std::optional<Tree> bounded_language_equal(const Dba& bottom_up, const Dta& top_down, std::size_t max_tree_size,
                                           const SearchLimits& limits = {});

/// First tree of at most `max_tree_size` nodes in L(bottom_up) ∖ L(top_down).
std::optional<Tree> bounded_subset(const Dba& bottom_up, const Dta& top_down, std::size_t max_tree_size,
                                   const SearchLimits& limits = {});

/// SplitMix64: portable seeded 64-bit generator.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 bits of precision.
  double next_unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, bound); `bound` must be positive.
  std::uint64_t next_below(std::uint64_t bound) noexcept { return next() % bound; }

 private:
  std::uint64_t state_;
};

/// Parameters of the random automaton generator.
struct GenSpec {
  std::uint64_t seed = 0;
  std::size_t states = 3;
  std::vector<std::pair<std::string, int>> symbols{{"a", 0}, {"b", 0}, {"f", 2}, {"g", 1}};
  double density = 0.7;
  double final_probability = 0.5;

  /// Throws std::invalid_argument on an out-of-range field or a missing
  /// nullary symbol.
  void validate() const;
  RankedAlphabet alphabet() const;
};

/// Parses `f/2,a/0`. Throws std::invalid_argument.
std::vector<std::pair<std::string, int>> parse_symbol_list(const std::string& text);

/// Random DBA over states s0..s(n-1), deterministic in `spec`. For each
/// symbol (alphabetical) and argument tuple (lexicographic by state index) a
/// transition is drawn with probability `density` to a uniform target; then
/// each state is made final with probability `final_probability`. The result
/// is reduced.
Dba random_dba(const GenSpec& spec);

/// Outcome of cross-checking the decision procedure on one automaton.
struct DifferentialResult {
  bool answer = false;
  /// Exchange search found a violation within the bound.
  bool oracle_violation = false;
  /// answer == false and the witness is a confirmed exchange violation.
  bool witness_confirmed = false;
  /// answer == true and L(A) equals L(associated DTA) within the bound.
  bool bounded_equal = false;
  /// L(A) ⊆ L(associated DTA) within the bound.
  bool subset_holds = false;
  std::vector<std::string> discrepancies;
};

DifferentialResult differential_check(const Dba& automaton, std::size_t bound);

}  // namespace topdown
