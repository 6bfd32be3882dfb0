#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "topdown/trees.hpp"

namespace topdown {

using StateId = std::uint32_t;
using SymbolId = std::uint32_t;
using StateTuple = std::vector<StateId>;

/// Explicit bottom-up transition `symbol(args) -> target`.
struct Transition {
  SymbolId symbol;
  StateTuple args;
  StateId target;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Occurrence of a state as argument `position` (0-based) of a transition.
struct Occurrence {
  std::uint32_t transition;
  std::uint32_t position;
};

namespace detail {
class TransitionIndex;
}

/// Deterministic bottom-up tree automaton.
///
/// States are dense integers in declaration order. Symbols are numbered in
/// the alphabet's (ascending name) order. When a trap state is enabled it is
/// never final and never appears in an explicit transition: every missing
/// lookup, and every lookup with the trap among its arguments, yields it.
/// Instances are immutable; build them with Dba::Builder.
class Dba {
 public:
  class Builder;

  const RankedAlphabet& alphabet() const noexcept { return alphabet_; }

  std::size_t symbol_count() const noexcept { return symbol_names_.size(); }
  const std::string& symbol_name(SymbolId symbol) const { return symbol_names_.at(symbol); }
  std::size_t symbol_arity(SymbolId symbol) const { return symbol_arities_.at(symbol); }
  std::optional<SymbolId> find_symbol(std::string_view name) const;

  /// Includes the trap state, if any.
  std::size_t state_count() const noexcept { return state_names_.size(); }
  std::span<const std::string> state_names() const noexcept { return state_names_; }
  const std::string& state_name(StateId state) const { return state_names_.at(state); }
  std::optional<StateId> find_state(std::string_view name) const;

  bool is_final(StateId state) const { return finals_.at(state); }
  std::vector<StateId> finals() const;
  std::optional<StateId> trap() const noexcept { return trap_; }

  /// Explicit transitions, sorted by symbol then argument tuple.
  std::span<const Transition> transitions() const noexcept { return transitions_; }
  /// Explicit transitions having `state` as an argument.
  std::span<const Occurrence> occurrences(StateId state) const { return occurrences_.at(state); }

  /// Index into transitions() of the explicit entry for the key, if any.
  std::optional<std::uint32_t> find_transition(SymbolId symbol, std::span<const StateId> args) const;

  /// Explicit entry if present; otherwise the trap when enabled; otherwise
  /// nullopt.
  std::optional<StateId> lookup(SymbolId symbol, std::span<const StateId> args) const;

  /// True iff every key has an explicit entry (the trap, if any, excluded).
  bool is_total() const;

 private:
  Dba() = default;

  RankedAlphabet alphabet_;
  std::vector<std::string> symbol_names_;
  std::vector<std::size_t> symbol_arities_;
  std::vector<std::string> state_names_;
  std::vector<bool> finals_;
  std::optional<StateId> trap_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<Occurrence>> occurrences_;
  std::shared_ptr<const detail::TransitionIndex> index_;
};

class Dba::Builder {
 public:
  explicit Builder(RankedAlphabet alphabet);

  /// Throws ModelError on a duplicate or malformed name.
  StateId add_state(std::string name);
  void set_final(StateId state, bool final = true);
  void set_trap(StateId state);

  /// Throws ModelError on an unknown symbol, an arity mismatch, an unknown
  /// state, or a duplicate key.
  void add_transition(std::string_view symbol, StateTuple args, StateId target);

  std::optional<StateId> find_state(std::string_view name) const;
  std::size_t state_count() const noexcept { return names_.size(); }

  Dba build() const;

 private:
  RankedAlphabet alphabet_;
  std::vector<std::string> names_;
  std::vector<bool> finals_;
  std::optional<StateId> trap_;
  std::map<std::pair<SymbolId, StateTuple>, StateId> delta_;
  std::map<std::string, SymbolId, std::less<>> symbol_ids_;
};

/// Map from node to state; a bottom-up or top-down run over a fixed tree.
using Run = std::map<NodeAddress, StateId>;

/// δ*(t). Throws IncompleteAutomatonError when a needed entry is missing and
/// no trap is enabled, std::invalid_argument on an undeclared label or an
/// arity mismatch.
StateId eval_tree(const Dba& automaton, const Tree& tree);
/// δ*(q, c): evaluates `context` with its hole carrying `state`.
StateId eval_context(const Dba& automaton, StateId state, const Context& context);
bool member_dba(const Dba& automaton, const Tree& tree);

/// The unique bottom-up run on `tree`.
Run bottom_up_run(const Dba& automaton, const Tree& tree);
/// True iff `run` labels every node of `tree` consistently with the transitions.
bool is_bottom_up_run(const Dba& automaton, const Tree& tree, const Run& run);

/// Explicit top-down transition `source --symbol--> targets`.
struct DtaEntry {
  StateId source;
  SymbolId symbol;
  StateTuple targets;
};

/// Deterministic top-down tree automaton with a partial transition map.
/// A tree is accepted iff a complete run exists from the initial state; a
/// leaf `a` at state Q is accepted iff the entry (Q, a) is present.
class Dta {
 public:
  class Builder;

  const RankedAlphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t symbol_count() const noexcept { return symbol_names_.size(); }
  const std::string& symbol_name(SymbolId symbol) const { return symbol_names_.at(symbol); }
  std::optional<SymbolId> find_symbol(std::string_view name) const;

  std::size_t state_count() const noexcept { return state_names_.size(); }
  std::span<const std::string> state_names() const noexcept { return state_names_; }
  const std::string& state_name(StateId state) const { return state_names_.at(state); }
  StateId initial() const noexcept { return initial_; }

  /// Targets of (state, symbol), or nullopt when the entry is absent.
  std::optional<std::span<const StateId>> step(StateId state, SymbolId symbol) const;

  /// Entries sorted by source state then symbol.
  std::vector<DtaEntry> entries() const;
  std::size_t entry_count() const noexcept { return delta_.size(); }

 private:
  Dta() = default;

  RankedAlphabet alphabet_;
  std::vector<std::string> symbol_names_;
  std::vector<std::string> state_names_;
  StateId initial_ = 0;
  std::map<std::pair<StateId, SymbolId>, StateTuple> delta_;
};

class Dta::Builder {
 public:
  explicit Builder(RankedAlphabet alphabet);

  StateId add_state(std::string name);
  void set_initial(StateId state);
  /// Throws ModelError on an unknown symbol/state, a length mismatch, or a
  /// duplicate key.
  void add_transition(StateId source, std::string_view symbol, StateTuple targets);

  Dta build() const;

 private:
  RankedAlphabet alphabet_;
  std::vector<std::string> names_;
  std::optional<StateId> initial_;
  std::map<std::pair<StateId, SymbolId>, StateTuple> delta_;
};

bool member_dta(const Dta& automaton, const Tree& tree);
/// The unique top-down run on `tree`, or nullopt when none exists.
std::optional<Run> top_down_run(const Dta& automaton, const Tree& tree);
bool is_top_down_run(const Dta& automaton, const Tree& tree, const Run& run);

/// Reduced automaton together with a smallest tree reaching each state.
struct Reduction {
  Dba automaton;
  /// Indexed by state of `automaton`; nullopt only for the trap.
  std::vector<std::optional<Tree>> representatives;
  /// Ids of the kept states in the input automaton, indexed by new id.
  std::vector<StateId> origin;
};

/// Restricts the automaton to its reachable states, keeping declaration
/// order. Representatives are minimal by (size, canonical order) among the
/// trees built from the children's representatives. A trap, if enabled, is
/// kept.
Reduction reduce_with_representatives(const Dba& automaton);
Dba reduce(const Dba& automaton);

/// Enables a fresh implicit trap state. A no-op when one is already enabled.
Dba complete(const Dba& automaton);

/// |Q| (trap excluded) plus arity+1 per explicit transition.
std::size_t size(const Dba& automaton);

}  // namespace topdown
