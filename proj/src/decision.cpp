#include "topdown/decision.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

#include "topdown/error.hpp"

namespace topdown {

namespace {

constexpr std::size_t kMaxTripleStates = std::size_t{1} << 21;

void require_trap(const Dba& automaton, const char* operation) {
  if (!automaton.trap()) throw std::invalid_argument(std::string(operation) + " needs a completed automaton");
  if (automaton.state_count() >= kMaxTripleStates) {
    throw ResourceLimitError("too many states for the triple fixpoint");
  }
}

// Range of transitions on `symbol` inside the canonically sorted list.
std::span<const Transition> transitions_of(const Dba& automaton, SymbolId symbol) {
  auto all = automaton.transitions();
  auto lo = std::partition_point(all.begin(), all.end(), [&](const Transition& t) { return t.symbol < symbol; });
  auto hi = std::partition_point(lo, all.end(), [&](const Transition& t) { return t.symbol <= symbol; });
  return {lo, hi};
}

}  // namespace

TripleSet::TripleSet(std::size_t states) {
  constexpr std::size_t kDenseLimit = std::size_t{1} << 24;
  if (states != 0 && states <= kDenseLimit / states / states) {
    states_ = states;
    dense_.assign(states * states * states, kAbsent);
  }
}

bool TripleSet::insert(TripleRecord record) {
  const Triple& t = record.triple;
  if (!dense_.empty() && t.first < states_ && t.second < states_ && t.third < states_) {
    std::uint32_t& slot = dense_[(t.first * states_ + t.second) * states_ + t.third];
    if (slot != kAbsent) return false;
    slot = static_cast<std::uint32_t>(records_.size());
  } else {
    if (!dense_.empty()) throw std::out_of_range("triple component outside the state range");
    auto [it, inserted] = index_.emplace(key(t), records_.size());
    if (!inserted) return false;
  }
  records_.push_back(std::move(record));
  return true;
}

std::optional<std::size_t> TripleSet::find(const Triple& triple) const {
  if (!dense_.empty()) {
    if (triple.first >= states_ || triple.second >= states_ || triple.third >= states_) return std::nullopt;
    const std::uint32_t slot = dense_[(triple.first * states_ + triple.second) * states_ + triple.third];
    if (slot == kAbsent) return std::nullopt;
    return slot;
  }
  auto it = index_.find(key(triple));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

bool is_conflict(const Dba& automaton, const Triple& t) {
  return automaton.is_final(t.first) && automaton.is_final(t.second) && !automaton.is_final(t.third);
}

// Seeds grouped by the argument mixed in: for a left transition, a position j
// and a state s, the mixed target is fixed and the right transitions are all
// those with s at j, of which only one per distinct target matters.
TripleSet seeds_until(const Dba& automaton, bool stop_at_conflict) {
  require_trap(automaton, "seed_triples");
  const std::size_t n = automaton.state_count();
  TripleSet seeds(n);
  StateTuple mixed;
  std::vector<std::vector<const Transition*>> by_argument(n);
  std::vector<bool> seen(n);
  for (SymbolId symbol = 0; symbol < automaton.symbol_count(); ++symbol) {
    const std::size_t arity = automaton.symbol_arity(symbol);
    if (arity < 2) continue;
    const auto entries = transitions_of(automaton, symbol);
    for (std::size_t j = 0; j < arity; ++j) {
      for (auto& group : by_argument) group.clear();
      for (const Transition& right : entries) {
        auto& group = by_argument[right.args[j]];
        if (std::none_of(group.begin(), group.end(), [&](const Transition* r) { return r->target == right.target; })) {
          group.push_back(&right);
        }
      }
      for (const Transition& left : entries) {
        for (StateId s = 0; s < n; ++s) {
          // Same argument at j: the mixed tuple is `left` itself.
          if (s == left.args[j] || by_argument[s].empty()) continue;
          mixed = left.args;
          mixed[j] = s;
          const StateId third = *automaton.lookup(symbol, mixed);
          if (third == left.target) continue;
          for (const Transition* right : by_argument[s]) {
            const Triple triple{left.target, right->target, third};
            if (third == right->target || seeds.contains(triple)) continue;
            seeds.insert({triple, SeedOrigin{symbol, left.args, right->args, static_cast<std::uint32_t>(j + 1)}});
            if (stop_at_conflict && is_conflict(automaton, triple)) return seeds;
          }
        }
      }
    }
  }
  return seeds;
}

}  // namespace

TripleSet seed_triples(const Dba& automaton) { return seeds_until(automaton, false); }

TripleSet close_triples(const Dba& automaton, TripleSet seeds, const ClosureOptions& options) {
  require_trap(automaton, "close_triples");
  const std::size_t n = automaton.state_count();
  const std::size_t cap = options.max_triples != 0 ? options.max_triples : n * n * n;
  const StateId trap = *automaton.trap();
  if (seeds.size() > cap) throw ResourceLimitError("triple set exceeds the cap of " + std::to_string(cap));

  TripleSet closed = std::move(seeds);
  if (options.stop_at_conflict) {
    for (const TripleRecord& r : closed.records()) {
      if (is_conflict(automaton, r.triple)) return closed;
    }
  }
  StateTuple args;
  // The record vector doubles as the FIFO worklist.
  for (std::size_t next = 0; next < closed.size(); ++next) {
    const Triple current = closed[next].triple;
    for (const Occurrence& occurrence : automaton.occurrences(current.first)) {
      const Transition& t = automaton.transitions()[occurrence.transition];
      const std::size_t j = occurrence.position;
      args = t.args;
      args[j] = current.second;
      const StateId second = *automaton.lookup(t.symbol, args);
      if (second == trap) continue;
      args[j] = current.third;
      const StateId third = *automaton.lookup(t.symbol, args);
      if (third == t.target || third == second) continue;
      const Triple found{t.target, second, third};
      // Checked first so that known triples cost no allocation.
      if (closed.contains(found)) continue;
      closed.insert({found, StepOrigin{next, t.symbol, static_cast<std::uint32_t>(j + 1), t.args}});
      if (closed.size() > cap) {
        throw ResourceLimitError("triple set exceeds the cap of " + std::to_string(cap));
      }
      if (options.stop_at_conflict && is_conflict(automaton, found)) return closed;
    }
  }
  return closed;
}


// ---------------------------------------------------------------------------
// Decision

namespace {

std::vector<std::string> names_of(const Dba& automaton, const StateTuple& states) {
  std::vector<std::string> out;
  for (StateId s : states) out.push_back(automaton.state_name(s));
  return out;
}

std::array<std::string, 3> names_of(const Dba& automaton, const Triple& triple) {
  return {automaton.state_name(triple.first), automaton.state_name(triple.second),
          automaton.state_name(triple.third)};
}

std::vector<Tree> trees_of(const std::vector<std::optional<Tree>>& representatives, const StateTuple& states) {
  std::vector<Tree> out;
  for (StateId s : states) out.push_back(*representatives.at(s));
  return out;
}

ConflictWitness materialize(const Dba& automaton, const std::vector<std::optional<Tree>>& representatives,
                            const TripleSet& closed, std::size_t conflict) {
  std::vector<std::size_t> chain{conflict};
  while (const auto* step = std::get_if<StepOrigin>(&closed[chain.back()].origin)) chain.push_back(step->parent);

  Context context = Context::hole();
  for (std::size_t index : chain) {
    const auto* step = std::get_if<StepOrigin>(&closed[index].origin);
    if (!step) break;
    std::vector<Tree> children;
    for (std::size_t p = 0; p < step->sides.size(); ++p) {
      children.push_back(p + 1 == step->position ? Tree::hole() : *representatives.at(step->sides[p]));
    }
    context = plug_context(context, Context(Tree(automaton.symbol_name(step->symbol), std::move(children))));
  }

  const auto& seed = std::get<SeedOrigin>(closed[chain.back()].origin);
  const std::string& symbol = automaton.symbol_name(seed.symbol);
  std::vector<Tree> left = trees_of(representatives, seed.left);
  std::vector<Tree> right = trees_of(representatives, seed.right);
  std::vector<Tree> mixed = left;
  mixed[seed.position - 1] = right[seed.position - 1];

  std::vector<TrailStep> trail;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const TripleRecord& record = closed[*it];
    TrailStep entry{names_of(automaton, record.triple), "", "", 0, {}, {}};
    if (const auto* s = std::get_if<SeedOrigin>(&record.origin)) {
      entry.kind = "seed";
      entry.symbol = automaton.symbol_name(s->symbol);
      entry.position = s->position;
      entry.left = names_of(automaton, s->left);
      entry.right = names_of(automaton, s->right);
    } else {
      const auto& step = std::get<StepOrigin>(record.origin);
      entry.kind = "step";
      entry.symbol = automaton.symbol_name(step.symbol);
      entry.position = step.position;
      entry.left = names_of(automaton, step.sides);
      entry.left[step.position - 1] = std::string(kHole);
    }
    trail.push_back(std::move(entry));
  }

  Tree accepted_left = plug(context, Tree(symbol, left));
  Tree accepted_right = plug(context, Tree(symbol, right));
  Tree violating = plug(context, Tree(symbol, mixed));
  if (!member_dba(automaton, accepted_left) || !member_dba(automaton, accepted_right) ||
      member_dba(automaton, violating)) {
    throw std::logic_error("materialized conflict witness does not separate the language");
  }
  return ConflictWitness{names_of(automaton, closed[conflict].triple),
                         std::move(trail),
                         std::move(context),
                         symbol,
                         seed.position,
                         std::move(left),
                         std::move(right),
                         std::move(accepted_left),
                         std::move(accepted_right),
                         std::move(violating)};
}

}  // namespace

Decision is_top_down_deterministic(const Dba& automaton, const DecisionOptions& options) {
  Reduction reduction = reduce_with_representatives(automaton);
  Dba prepared = complete(reduction.automaton);
  auto representatives = std::move(reduction.representatives);
  representatives.resize(prepared.state_count());

  Decision decision{true, std::nullopt, {}, {}, prepared};
  decision.stats.input_states = automaton.state_count() - (automaton.trap() ? 1 : 0);
  decision.stats.reachable_states = reduction.automaton.state_count() - (reduction.automaton.trap() ? 1 : 0);
  decision.stats.transitions = prepared.transitions().size();
  decision.stats.automaton_size = size(prepared);

  if (prepared.finals().empty()) decision.notes.emplace_back("empty language");

  ClosureOptions closure = options.closure;
  closure.stop_at_conflict = !options.full_closure;
  TripleSet seeds = seeds_until(prepared, closure.stop_at_conflict);
  decision.stats.seed_triples = seeds.size();
  TripleSet closed = close_triples(prepared, std::move(seeds), closure);
  decision.stats.closed_triples = closed.size();

  for (std::size_t i = 0; i < closed.size(); ++i) {
    if (is_conflict(prepared, closed[i].triple)) {
      decision.answer = false;
      decision.witness = materialize(prepared, representatives, closed, i);
      decision.notes.emplace_back("the witness is one of possibly many");
      if (closure.stop_at_conflict) decision.notes.emplace_back("triple search stopped at the first conflict");
      break;
    }
  }
  return decision;
}

std::optional<ConflictWitness> find_conflict(const Dba& automaton, const DecisionOptions& options) {
  return is_top_down_deterministic(automaton, options).witness;
}

// ---------------------------------------------------------------------------
// Associated top-down automaton

std::string subset_name(const Dba& base, const StateTuple& subset) {
  std::string out = "{";
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i != 0) out += ',';
    out += base.state_name(subset[i]);
  }
  return out + "}";
}

AssociatedDta associated_dta(const Dba& automaton, std::size_t max_states) {
  Dba base = reduce(automaton);
  const std::size_t n = base.state_count();
  std::size_t cap = max_states;
  if (n < 63) cap = std::min<std::size_t>(cap, std::size_t{1} << n);
  cap = std::max<std::size_t>(cap, 1);

  Dta::Builder builder(base.alphabet());
  std::vector<StateTuple> subsets;
  std::map<StateTuple, StateId> ids;
  const auto state_of = [&](StateTuple subset) {
    auto it = ids.find(subset);
    if (it != ids.end()) return it->second;
    if (subsets.size() >= cap) {
      throw ResourceLimitError("associated top-down automaton needs more than " + std::to_string(cap) + " states");
    }
    const StateId id = builder.add_state(subset_name(base, subset));
    ids.emplace(subset, id);
    subsets.push_back(std::move(subset));
    return id;
  };

  builder.set_initial(state_of(base.finals()));
  std::vector<bool> member(n);
  std::vector<std::vector<bool>> components;
  for (std::size_t current = 0; current < subsets.size(); ++current) {
    std::fill(member.begin(), member.end(), false);
    for (StateId s : subsets[current]) member[s] = true;
    for (SymbolId symbol = 0; symbol < base.symbol_count(); ++symbol) {
      const std::size_t arity = base.symbol_arity(symbol);
      components.assign(arity, std::vector<bool>(n, false));
      bool found = false;
      for (const Transition& t : transitions_of(base, symbol)) {
        if (!member[t.target]) continue;
        found = true;
        for (std::size_t i = 0; i < arity; ++i) components[i][t.args[i]] = true;
      }
      if (!found) continue;
      StateTuple targets;
      for (const auto& component : components) {
        StateTuple subset;
        for (StateId s = 0; s < n; ++s) {
          if (component[s]) subset.push_back(s);
        }
        targets.push_back(state_of(std::move(subset)));
      }
      builder.add_transition(static_cast<StateId>(current), base.symbol_name(symbol), std::move(targets));
    }
  }
  return AssociatedDta{builder.build(), std::move(subsets), std::move(base)};
}

}  // namespace topdown
