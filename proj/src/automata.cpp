#include "topdown/automata.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "topdown/error.hpp"

namespace topdown {

namespace detail {

// Per-symbol lookup from argument tuple to transition index. Small key
// spaces use a dense table; the rest fall back to hashing.
class TransitionIndex {
 public:
  static constexpr std::uint32_t kMissing = std::numeric_limits<std::uint32_t>::max();
  static constexpr std::size_t kDenseLimit = std::size_t{1} << 20;

  TransitionIndex(std::span<const std::size_t> arities, std::size_t states, std::span<const Transition> transitions)
      : states_(states), tables_(arities.size()) {
    for (std::size_t s = 0; s < arities.size(); ++s) {
      auto& table = tables_[s];
      std::size_t cells = 1;
      table.dense = true;
      for (std::size_t i = 0; i < arities[s]; ++i) {
        if (states != 0 && cells > kDenseLimit / states) {
          table.dense = false;
          break;
        }
        cells *= states;
      }
      if (table.dense) table.cells.assign(cells, kMissing);
    }
    for (std::size_t i = 0; i < transitions.size(); ++i) {
      const Transition& t = transitions[i];
      auto& table = tables_[t.symbol];
      if (table.dense) {
        table.cells[dense_key(t.args)] = static_cast<std::uint32_t>(i);
      } else {
        table.sparse.emplace(t.args, static_cast<std::uint32_t>(i));
      }
    }
  }

  std::optional<std::uint32_t> find(SymbolId symbol, std::span<const StateId> args) const {
    const auto& table = tables_[symbol];
    if (table.dense) {
      const std::uint32_t hit = table.cells[dense_key(args)];
      if (hit == kMissing) return std::nullopt;
      return hit;
    }
    auto it = table.sparse.find(StateTuple(args.begin(), args.end()));
    if (it == table.sparse.end()) return std::nullopt;
    return it->second;
  }

 private:
  struct TupleHash {
    std::size_t operator()(const StateTuple& tuple) const noexcept {
      std::size_t h = 0xcbf29ce484222325ULL;
      for (StateId s : tuple) {
        h ^= s;
        h *= 0x100000001b3ULL;
      }
      return h;
    }
  };

  struct Table {
    bool dense = true;
    std::vector<std::uint32_t> cells;
    std::unordered_map<StateTuple, std::uint32_t, TupleHash> sparse;
  };

  std::size_t dense_key(std::span<const StateId> args) const {
    std::size_t key = 0;
    for (StateId s : args) key = key * states_ + s;
    return key;
  }

  std::size_t states_;
  std::vector<Table> tables_;
};

}  // namespace detail

namespace {

std::optional<std::uint32_t> find_sorted(const std::vector<std::string>& names, std::string_view name) {
  auto it = std::lower_bound(names.begin(), names.end(), name);
  if (it == names.end() || *it != name) return std::nullopt;
  return static_cast<std::uint32_t>(it - names.begin());
}

std::optional<StateId> find_linear(const std::vector<std::string>& names, std::string_view name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<StateId>(it - names.begin());
}

}  // namespace

// ---------------------------------------------------------------------------
// Dba

std::optional<SymbolId> Dba::find_symbol(std::string_view name) const { return find_sorted(symbol_names_, name); }

std::optional<StateId> Dba::find_state(std::string_view name) const { return find_linear(state_names_, name); }

std::vector<StateId> Dba::finals() const {
  std::vector<StateId> out;
  for (StateId q = 0; q < finals_.size(); ++q) {
    if (finals_[q]) out.push_back(q);
  }
  return out;
}

std::optional<std::uint32_t> Dba::find_transition(SymbolId symbol, std::span<const StateId> args) const {
  if (symbol >= symbol_count() || args.size() != symbol_arities_[symbol]) return std::nullopt;
  for (StateId s : args) {
    if (s >= state_count()) return std::nullopt;
  }
  return index_->find(symbol, args);
}

std::optional<StateId> Dba::lookup(SymbolId symbol, std::span<const StateId> args) const {
  if (trap_ && std::find(args.begin(), args.end(), *trap_) != args.end()) return trap_;
  if (auto hit = find_transition(symbol, args)) return transitions_[*hit].target;
  return trap_;
}

bool Dba::is_total() const {
  const std::size_t real_states = state_count() - (trap_ ? 1 : 0);
  std::size_t expected = 0;
  for (std::size_t arity : symbol_arities_) {
    std::size_t keys = 1;
    for (std::size_t i = 0; i < arity; ++i) {
      if (real_states != 0 && keys > std::numeric_limits<std::size_t>::max() / real_states) return false;
      keys *= real_states;
    }
    expected += keys;
  }
  return transitions_.size() == expected;
}

Dba::Builder::Builder(RankedAlphabet alphabet) : alphabet_(std::move(alphabet)) {
  SymbolId next = 0;
  for (const auto& [name, _] : alphabet_.symbols()) symbol_ids_.emplace(name, next++);
}

StateId Dba::Builder::add_state(std::string name) {
  if (!is_identifier(name)) throw ModelError("invalid state name '" + name + "'");
  if (find_state(name)) throw ModelError("duplicate state '" + name + "'");
  names_.push_back(std::move(name));
  finals_.push_back(false);
  return static_cast<StateId>(names_.size() - 1);
}

void Dba::Builder::set_final(StateId state, bool final) {
  if (state >= names_.size()) throw ModelError("unknown state id " + std::to_string(state));
  finals_[state] = final;
}

void Dba::Builder::set_trap(StateId state) {
  if (state >= names_.size()) throw ModelError("unknown state id " + std::to_string(state));
  trap_ = state;
}

void Dba::Builder::add_transition(std::string_view symbol, StateTuple args, StateId target) {
  auto it = symbol_ids_.find(symbol);
  if (it == symbol_ids_.end()) throw ModelError("undeclared symbol '" + std::string(symbol) + "'");
  const int arity = *alphabet_.arity(symbol);
  if (args.size() != static_cast<std::size_t>(arity)) {
    throw ModelError("symbol '" + std::string(symbol) + "' has arity " + std::to_string(arity) + " but " +
                     std::to_string(args.size()) + " arguments were given");
  }
  for (StateId s : args) {
    if (s >= names_.size()) throw ModelError("unknown state id " + std::to_string(s));
  }
  if (target >= names_.size()) throw ModelError("unknown state id " + std::to_string(target));
  auto [pos, inserted] = delta_.emplace(std::make_pair(it->second, std::move(args)), target);
  if (!inserted) {
    std::string key(symbol);
    if (!pos->first.second.empty()) {
      key += '(';
      for (std::size_t i = 0; i < pos->first.second.size(); ++i) {
        if (i != 0) key += ',';
        key += names_[pos->first.second[i]];
      }
      key += ')';
    }
    throw ModelError("duplicate transition for " + key + " (the automaton must be deterministic)");
  }
}

std::optional<StateId> Dba::Builder::find_state(std::string_view name) const { return find_linear(names_, name); }

Dba Dba::Builder::build() const {
  Dba dba;
  dba.alphabet_ = alphabet_;
  for (const auto& [name, arity] : alphabet_.symbols()) {
    dba.symbol_names_.push_back(name);
    dba.symbol_arities_.push_back(static_cast<std::size_t>(arity));
  }
  dba.state_names_ = names_;
  dba.finals_ = finals_;
  dba.trap_ = trap_;
  if (trap_ && finals_[*trap_]) throw ModelError("trap state '" + names_[*trap_] + "' must not be final");
  dba.occurrences_.resize(names_.size());
  for (const auto& [key, target] : delta_) {
    if (trap_ && (target == *trap_ || std::find(key.second.begin(), key.second.end(), *trap_) != key.second.end())) {
      throw ModelError("trap state '" + names_[*trap_] + "' must not occur in explicit transitions");
    }
    const auto index = static_cast<std::uint32_t>(dba.transitions_.size());
    for (std::size_t j = 0; j < key.second.size(); ++j) {
      dba.occurrences_[key.second[j]].push_back({index, static_cast<std::uint32_t>(j)});
    }
    dba.transitions_.push_back({key.first, key.second, target});
  }
  dba.index_ = std::make_shared<detail::TransitionIndex>(dba.symbol_arities_, names_.size(), dba.transitions_);
  return dba;
}

// ---------------------------------------------------------------------------
// Bottom-up evaluation

namespace {

SymbolId resolve_symbol(const Dba& automaton, const Tree& tree) {
  auto symbol = automaton.find_symbol(tree.label());
  if (!symbol) throw std::invalid_argument("undeclared symbol '" + tree.label() + "'");
  if (automaton.symbol_arity(*symbol) != tree.arity()) {
    throw std::invalid_argument("symbol '" + tree.label() + "' used with " + std::to_string(tree.arity()) +
                                " children");
  }
  return *symbol;
}

StateId step_up(const Dba& automaton, SymbolId symbol, const StateTuple& args) {
  if (auto state = automaton.lookup(symbol, args)) return *state;
  std::string key = automaton.symbol_name(symbol);
  if (!args.empty()) {
    key += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i != 0) key += ',';
      key += automaton.state_name(args[i]);
    }
    key += ')';
  }
  throw IncompleteAutomatonError("incomplete automaton: no transition for " + key);
}

StateId eval_with_hole(const Dba& automaton, const Tree& tree, std::optional<StateId> hole_state) {
  if (tree.is_hole() && hole_state) return *hole_state;
  const SymbolId symbol = resolve_symbol(automaton, tree);
  StateTuple args;
  args.reserve(tree.arity());
  for (const Tree& child : tree.children()) args.push_back(eval_with_hole(automaton, child, hole_state));
  return step_up(automaton, symbol, args);
}

StateId fill_run(const Dba& automaton, const Tree& tree, NodeAddress& prefix, Run& run) {
  const SymbolId symbol = resolve_symbol(automaton, tree);
  StateTuple args;
  for (std::size_t i = 0; i < tree.arity(); ++i) {
    prefix.push_back(static_cast<std::uint32_t>(i + 1));
    args.push_back(fill_run(automaton, tree.children()[i], prefix, run));
    prefix.pop_back();
  }
  const StateId state = step_up(automaton, symbol, args);
  run[prefix] = state;
  return state;
}

}  // namespace

StateId eval_tree(const Dba& automaton, const Tree& tree) { return eval_with_hole(automaton, tree, std::nullopt); }

StateId eval_context(const Dba& automaton, StateId state, const Context& context) {
  if (state >= automaton.state_count()) throw std::invalid_argument("unknown state id " + std::to_string(state));
  return eval_with_hole(automaton, context.tree(), state);
}

bool member_dba(const Dba& automaton, const Tree& tree) { return automaton.is_final(eval_tree(automaton, tree)); }

Run bottom_up_run(const Dba& automaton, const Tree& tree) {
  Run run;
  NodeAddress prefix;
  fill_run(automaton, tree, prefix, run);
  return run;
}

bool is_bottom_up_run(const Dba& automaton, const Tree& tree, const Run& run) {
  const auto addresses = nodes(tree);
  if (run.size() != addresses.size()) return false;
  for (const NodeAddress& u : addresses) {
    auto here = run.find(u);
    if (here == run.end()) return false;
    const Tree& node = subtree_at(tree, u);
    auto symbol = automaton.find_symbol(node.label());
    if (!symbol || automaton.symbol_arity(*symbol) != node.arity()) return false;
    StateTuple args;
    NodeAddress child = u;
    for (std::uint32_t i = 1; i <= node.arity(); ++i) {
      child.push_back(i);
      auto it = run.find(child);
      if (it == run.end()) return false;
      args.push_back(it->second);
      child.pop_back();
    }
    auto expected = automaton.lookup(*symbol, args);
    if (!expected || *expected != here->second) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Dta

std::optional<SymbolId> Dta::find_symbol(std::string_view name) const { return find_sorted(symbol_names_, name); }

std::optional<std::span<const StateId>> Dta::step(StateId state, SymbolId symbol) const {
  auto it = delta_.find({state, symbol});
  if (it == delta_.end()) return std::nullopt;
  return std::span<const StateId>(it->second);
}

std::vector<DtaEntry> Dta::entries() const {
  std::vector<DtaEntry> out;
  out.reserve(delta_.size());
  for (const auto& [key, targets] : delta_) out.push_back({key.first, key.second, targets});
  return out;
}

Dta::Builder::Builder(RankedAlphabet alphabet) : alphabet_(std::move(alphabet)) {}

StateId Dta::Builder::add_state(std::string name) {
  if (name.empty()) throw ModelError("empty state name");
  if (find_linear(names_, name)) throw ModelError("duplicate state '" + name + "'");
  names_.push_back(std::move(name));
  return static_cast<StateId>(names_.size() - 1);
}

void Dta::Builder::set_initial(StateId state) {
  if (state >= names_.size()) throw ModelError("unknown state id " + std::to_string(state));
  initial_ = state;
}

void Dta::Builder::add_transition(StateId source, std::string_view symbol, StateTuple targets) {
  auto arity = alphabet_.arity(symbol);
  if (!arity) throw ModelError("undeclared symbol '" + std::string(symbol) + "'");
  if (targets.size() != static_cast<std::size_t>(*arity)) {
    throw ModelError("symbol '" + std::string(symbol) + "' needs " + std::to_string(*arity) + " target states");
  }
  if (source >= names_.size()) throw ModelError("unknown state id " + std::to_string(source));
  for (StateId s : targets) {
    if (s >= names_.size()) throw ModelError("unknown state id " + std::to_string(s));
  }
  const auto id = static_cast<SymbolId>(std::distance(alphabet_.symbols().begin(), alphabet_.symbols().find(symbol)));
  if (!delta_.emplace(std::make_pair(source, id), std::move(targets)).second) {
    throw ModelError("duplicate top-down transition for (" + names_[source] + ", " + std::string(symbol) + ")");
  }
}

Dta Dta::Builder::build() const {
  if (!initial_) throw ModelError("top-down automaton has no initial state");
  Dta dta;
  dta.alphabet_ = alphabet_;
  for (const auto& [name, _] : alphabet_.symbols()) dta.symbol_names_.push_back(name);
  dta.state_names_ = names_;
  dta.initial_ = *initial_;
  dta.delta_ = delta_;
  return dta;
}

namespace {

bool descend(const Dta& automaton, const Tree& tree, StateId state, NodeAddress& prefix, Run* run) {
  auto symbol = automaton.find_symbol(tree.label());
  if (!symbol) return false;
  auto targets = automaton.step(state, *symbol);
  if (!targets || targets->size() != tree.arity()) return false;
  if (run) (*run)[prefix] = state;
  for (std::size_t i = 0; i < tree.arity(); ++i) {
    prefix.push_back(static_cast<std::uint32_t>(i + 1));
    const bool ok = descend(automaton, tree.children()[i], (*targets)[i], prefix, run);
    prefix.pop_back();
    if (!ok) return false;
  }
  return true;
}

}  // namespace

bool member_dta(const Dta& automaton, const Tree& tree) {
  NodeAddress prefix;
  return descend(automaton, tree, automaton.initial(), prefix, nullptr);
}

std::optional<Run> top_down_run(const Dta& automaton, const Tree& tree) {
  Run run;
  NodeAddress prefix;
  if (!descend(automaton, tree, automaton.initial(), prefix, &run)) return std::nullopt;
  return run;
}

bool is_top_down_run(const Dta& automaton, const Tree& tree, const Run& run) {
  const auto addresses = nodes(tree);
  if (run.size() != addresses.size()) return false;
  auto root = run.find(NodeAddress{});
  if (root == run.end() || root->second != automaton.initial()) return false;
  for (const NodeAddress& u : addresses) {
    auto here = run.find(u);
    if (here == run.end()) return false;
    const Tree& node = subtree_at(tree, u);
    auto symbol = automaton.find_symbol(node.label());
    if (!symbol) return false;
    auto targets = automaton.step(here->second, *symbol);
    if (!targets || targets->size() != node.arity()) return false;
    NodeAddress child = u;
    for (std::uint32_t i = 1; i <= node.arity(); ++i) {
      child.push_back(i);
      auto it = run.find(child);
      if (it == run.end() || it->second != (*targets)[i - 1]) return false;
      child.pop_back();
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Reduction, completion, size

Reduction reduce_with_representatives(const Dba& automaton) {
  const std::size_t n = automaton.state_count();
  std::vector<std::optional<Tree>> best(n);
  const auto better = [](const Tree& candidate, const std::optional<Tree>& current) {
    if (!current) return true;
    if (candidate.size() != current->size()) return candidate.size() < current->size();
    return candidate < *current;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (const Transition& t : automaton.transitions()) {
      if (!std::all_of(t.args.begin(), t.args.end(), [&](StateId s) { return best[s].has_value(); })) continue;
      std::vector<Tree> children;
      children.reserve(t.args.size());
      for (StateId s : t.args) children.push_back(*best[s]);
      Tree candidate(automaton.symbol_name(t.symbol), std::move(children));
      if (better(candidate, best[t.target])) {
        best[t.target] = std::move(candidate);
        changed = true;
      }
    }
  }

  Dba::Builder builder(automaton.alphabet());
  std::vector<std::optional<StateId>> renamed(n);
  Reduction result{Dba::Builder(automaton.alphabet()).build(), {}, {}};
  for (StateId q = 0; q < n; ++q) {
    const bool keep = best[q].has_value() || automaton.trap() == q;
    if (!keep) continue;
    renamed[q] = builder.add_state(automaton.state_name(q));
    builder.set_final(*renamed[q], automaton.is_final(q));
    if (automaton.trap() == q) builder.set_trap(*renamed[q]);
    result.representatives.push_back(best[q]);
    result.origin.push_back(q);
  }
  for (const Transition& t : automaton.transitions()) {
    if (!renamed[t.target] ||
        !std::all_of(t.args.begin(), t.args.end(), [&](StateId s) { return renamed[s].has_value(); })) {
      continue;
    }
    StateTuple args;
    for (StateId s : t.args) args.push_back(*renamed[s]);
    builder.add_transition(automaton.symbol_name(t.symbol), std::move(args), *renamed[t.target]);
  }
  result.automaton = builder.build();
  return result;
}

Dba reduce(const Dba& automaton) { return reduce_with_representatives(automaton).automaton; }

Dba complete(const Dba& automaton) {
  if (automaton.trap()) return automaton;
  Dba::Builder builder(automaton.alphabet());
  for (StateId q = 0; q < automaton.state_count(); ++q) {
    builder.add_state(automaton.state_name(q));
    builder.set_final(q, automaton.is_final(q));
  }
  std::string name = "trap";
  for (int suffix = 1; builder.find_state(name); ++suffix) name = "trap_" + std::to_string(suffix);
  builder.set_trap(builder.add_state(name));
  for (const Transition& t : automaton.transitions()) {
    builder.add_transition(automaton.symbol_name(t.symbol), t.args, t.target);
  }
  return builder.build();
}

std::size_t size(const Dba& automaton) {
  std::size_t total = automaton.state_count() - (automaton.trap() ? 1 : 0);
  for (const Transition& t : automaton.transitions()) total += t.args.size() + 1;
  return total;
}

}  // namespace topdown
