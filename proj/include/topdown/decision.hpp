#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "topdown/automata.hpp"
#include "topdown/trees.hpp"

namespace topdown {

/// (q, q', q'') in that order.
struct Triple {
  StateId first;
  StateId second;
  StateId third;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Triple produced by two explicit `symbol` transitions and the tuple that
/// mixes them at `position` (1-based): δ(left) = q, δ(right) = q',
/// δ(left[position := right[position]]) = q''.
struct SeedOrigin {
  SymbolId symbol;
  StateTuple left;
  StateTuple right;
  std::uint32_t position;
};

/// Triple obtained from `parent` by the one-symbol context
/// symbol(sides[0..], x at position, ..). `sides[position-1]` holds the
/// parent's first component.
struct StepOrigin {
  std::size_t parent;
  SymbolId symbol;
  std::uint32_t position;
  StateTuple sides;
};

struct TripleRecord {
  Triple triple;
  std::variant<SeedOrigin, StepOrigin> origin;
};

/// Insertion-ordered set of triples; the first record for a triple wins.
class TripleSet {
 public:
  TripleSet() = default;
  /// Uses a dense |Q|^3 index when that is small enough.
  explicit TripleSet(std::size_t states);

  bool insert(TripleRecord record);
  bool contains(const Triple& triple) const { return find(triple).has_value(); }
  std::optional<std::size_t> find(const Triple& triple) const;

  std::size_t size() const noexcept { return records_.size(); }
  const TripleRecord& operator[](std::size_t i) const { return records_[i]; }
  const std::vector<TripleRecord>& records() const noexcept { return records_; }

 private:
  static std::uint64_t key(const Triple& t) {
    return (std::uint64_t{t.first} << 42) ^ (std::uint64_t{t.second} << 21) ^ std::uint64_t{t.third};
  }

  static constexpr std::uint32_t kAbsent = 0xffffffffu;

  std::size_t states_ = 0;
  std::vector<std::uint32_t> dense_;
  std::vector<TripleRecord> records_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

/// Seed triples of a reduced, trap-enabled automaton: every ordered pair of
/// explicit transitions on a symbol of arity >= 2 and every position. Triples
/// whose third component equals the first or the second are dropped.
TripleSet seed_triples(const Dba& automaton);

struct ClosureOptions {
  /// 0 selects |Q|^3.
  std::size_t max_triples = 0;
  /// Return as soon as a triple in F×F×(Q∖F) is stored. The stored records
  /// are then a prefix of the full closure's.
  bool stop_at_conflict = false;
};

/// Least superset of `seeds` closed under one-symbol contexts, computed with
/// a FIFO worklist. Triples with the trap as first or second component, or
/// with the third equal to the first or second, are not stored. Throws
/// ResourceLimitError past `max_triples`.
TripleSet close_triples(const Dba& automaton, TripleSet seeds, const ClosureOptions& options = {});

/// One link of the provenance chain, rendered with state and symbol names.
struct TrailStep {
  std::array<std::string, 3> states;
  /// "seed" or "step".
  std::string kind;
  std::string symbol;
  std::uint32_t position;
  /// seed: left tuple; step: side states (with the hole position marked "x").
  std::vector<std::string> left;
  /// seed: right tuple; step: empty.
  std::vector<std::string> right;
};

/// Concrete evidence that the language violates the subtree exchange
/// property: accepted_left = c[f(left)], accepted_right = c[f(right)] are
/// accepted while violating = c[f(left with position := right[position])]
/// is rejected.
struct ConflictWitness {
  std::array<std::string, 3> triple;
  /// From the seed to the conflicting triple.
  std::vector<TrailStep> trail;
  Context context;
  std::string symbol;
  std::uint32_t position;
  std::vector<Tree> left_trees;
  std::vector<Tree> right_trees;
  Tree accepted_left;
  Tree accepted_right;
  Tree violating_tree;
};

struct DecisionStats {
  std::size_t input_states = 0;
  std::size_t reachable_states = 0;
  std::size_t transitions = 0;
  std::size_t automaton_size = 0;
  std::size_t seed_triples = 0;
  std::size_t closed_triples = 0;
};

struct DecisionOptions {
  ClosureOptions closure;
  /// Compute all of T even after a conflict is found (only affects the
  /// triple counts in the stats).
  bool full_closure = false;
};

struct Decision {
  bool answer;
  std::optional<ConflictWitness> witness;
  DecisionStats stats;
  std::vector<std::string> notes;
  /// The reduced and completed automaton the decision was made on.
  Dba prepared;
};

/// reduce -> complete -> seed -> close -> check for T ∩ F×F×(Q∖F).
Decision is_top_down_deterministic(const Dba& automaton, const DecisionOptions& options = {});

/// The conflict witness, if any (same pipeline).
std::optional<ConflictWitness> find_conflict(const Dba& automaton, const DecisionOptions& options = {});

/// Subset-state top-down automaton built from the final states.
struct AssociatedDta {
  Dta dta;
  /// States of `base` forming each DTA state, in ascending id order.
  std::vector<StateTuple> subsets;
  /// The reduced automaton the construction ran on.
  Dba base;
};

/// Default cap on the number of subset states.
inline constexpr std::size_t kDefaultSubsetCap = 1'000'000;

/// Builds the associated top-down automaton of reduce(automaton) on the fly,
/// from the final states. Entries whose components would all be empty are
/// omitted, so the empty set is never a state (except as the initial state
/// when there are no final states). Throws ResourceLimitError when more than
/// min(2^|Q|, max_states) subset states are needed.
AssociatedDta associated_dta(const Dba& automaton, std::size_t max_states = kDefaultSubsetCap);

/// `{q,p}` with members in declaration order.
std::string subset_name(const Dba& base, const StateTuple& subset);

}  // namespace topdown
