#include "topdown/oracle.hpp"

#include <charconv>
#include <stdexcept>

#include "topdown/error.hpp"

namespace topdown {

namespace {

class CheckCounter {
 public:
  explicit CheckCounter(std::size_t cap) : cap_(cap) {}
  void tick() {
    if (++used_ > cap_) throw ResourceLimitError("search exceeded " + std::to_string(cap_) + " membership tests");
  }

 private:
  std::size_t cap_;
  std::size_t used_ = 0;
};

// Membership where a missing transition rejects.
class Membership {
 public:
  Membership(const Dba& automaton, CheckCounter& counter) : automaton_(complete(automaton)), counter_(counter) {}

  bool operator()(const Tree& tree) {
    counter_.tick();
    return member_dba(automaton_, tree);
  }

 private:
  Dba automaton_;
  CheckCounter& counter_;
};

// Calls `visit(tuple)` for every tuple of `arity` trees drawn from `pool`
// (ordered by size then canonically) whose sizes add up to at most `budget`,
// in lexicographic order of pool positions. Stops when `visit` returns true.
template <typename Visit>
bool for_each_tuple(const std::vector<Tree>& pool, std::size_t arity, std::uint64_t budget, std::vector<Tree>& tuple,
                    Visit&& visit) {
  if (tuple.size() == arity) return visit(tuple);
  const std::uint64_t reserve = arity - tuple.size() - 1;
  for (const Tree& candidate : pool) {
    if (candidate.size() + reserve > budget) break;
    tuple.push_back(candidate);
    const bool stop = for_each_tuple(pool, arity, budget - candidate.size(), tuple, visit);
    tuple.pop_back();
    if (stop) return true;
  }
  return false;
}

}  // namespace

std::optional<ExchangeViolation> exchange_violation_search(const Dba& automaton, std::size_t max_tree_size,
                                                           const SearchLimits& limits) {
  CheckCounter counter(limits.max_checks);
  Membership member(automaton, counter);
  const std::vector<Tree> pool = enumerate_trees(automaton.alphabet(), max_tree_size, limits.max_trees);

  std::optional<ExchangeViolation> found;
  for (const Tree& base : pool) {
    if (!member(base)) continue;
    for (const NodeAddress& node : nodes(base)) {
      const Tree& at = subtree_at(base, node);
      const std::size_t arity = at.arity();
      if (arity < 2) continue;
      const std::vector<Tree> original(at.children().begin(), at.children().end());
      const std::uint64_t budget = max_tree_size - (base.size() - at.size()) - 1;
      std::vector<Tree> tuple;
      const bool stop = for_each_tuple(pool, arity, budget, tuple, [&](const std::vector<Tree>& alternative) {
        if (alternative == original || !member(replace_at(base, node, Tree(at.label(), alternative)))) return false;
        for (std::size_t i = 0; i < arity; ++i) {
          if (original[i] == alternative[i]) continue;
          std::vector<Tree> mixed = original;
          mixed[i] = alternative[i];
          Tree exchanged = replace_at(base, node, Tree(at.label(), mixed));
          if (!member(exchanged)) {
            found = ExchangeViolation{base,        node, at.label(), original, alternative,
                                      static_cast<std::uint32_t>(i + 1), std::move(exchanged)};
            return true;
          }
        }
        return false;
      });
      if (stop) return found;
    }
  }
  return std::nullopt;
}

bool confirm_violation(const Dba& automaton, const ExchangeViolation& violation) {
  const std::size_t arity = violation.original.size();
  if (arity < 2 || violation.alternative.size() != arity || violation.position < 1 || violation.position > arity) {
    return false;
  }
  const RankedAlphabet& alphabet = automaton.alphabet();
  if (!validate_tree(alphabet, violation.base) || !validate_tree(alphabet, violation.exchanged)) return false;
  try {
    if (subtree_at(violation.base, violation.node) != Tree(violation.symbol, violation.original)) return false;
    std::vector<Tree> mixed = violation.original;
    mixed[violation.position - 1] = violation.alternative[violation.position - 1];
    if (violation.exchanged != replace_at(violation.base, violation.node, Tree(violation.symbol, mixed))) return false;
    const Tree alternative_tree = replace_at(violation.base, violation.node, Tree(violation.symbol, violation.alternative));
    if (!validate_tree(alphabet, alternative_tree)) return false;

    const Dba completed = complete(automaton);
    return member_dba(completed, violation.base) && member_dba(completed, alternative_tree) &&
           !member_dba(completed, violation.exchanged);
  } catch (const std::out_of_range&) {
    return false;
  }
}

ExchangeViolation as_exchange_violation(const ConflictWitness& witness) {
  return ExchangeViolation{witness.accepted_left, witness.context.hole_address(), witness.symbol,
                           witness.left_trees,    witness.right_trees,            witness.position,
                           witness.violating_tree};
}

namespace {

template <typename Disagrees>
std::optional<Tree> first_tree(const Dba& bottom_up, const Dta& top_down, std::size_t max_tree_size,
                               const SearchLimits& limits, Disagrees&& disagrees) {
  if (!(bottom_up.alphabet() == top_down.alphabet())) {
    throw std::invalid_argument("automata are over different alphabets");
  }
  CheckCounter counter(limits.max_checks);
  Membership member(bottom_up, counter);
  for (const Tree& tree : enumerate_trees(bottom_up.alphabet(), max_tree_size, limits.max_trees)) {
    if (disagrees(member(tree), member_dta(top_down, tree))) return tree;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Tree> bounded_language_equal(const Dba& bottom_up, const Dta& top_down, std::size_t max_tree_size,
                                           const SearchLimits& limits) {
  return first_tree(bottom_up, top_down, max_tree_size, limits, [](bool a, bool b) { return a != b; });
}

std::optional<Tree> bounded_subset(const Dba& bottom_up, const Dta& top_down, std::size_t max_tree_size,
                                   const SearchLimits& limits) {
  return first_tree(bottom_up, top_down, max_tree_size, limits, [](bool a, bool b) { return a && !b; });
}

// ---------------------------------------------------------------------------
// Generator

void GenSpec::validate() const {
  if (states == 0) throw std::invalid_argument("state count must be positive");
  if (!(density >= 0.0 && density <= 1.0)) throw std::invalid_argument("density must lie in [0,1]");
  if (!(final_probability >= 0.0 && final_probability <= 1.0)) {
    throw std::invalid_argument("final probability must lie in [0,1]");
  }
  try {
    if (!alphabet().has_nullary()) throw std::invalid_argument("the alphabet needs a nullary symbol");
  } catch (const ModelError& e) {
    throw std::invalid_argument(e.what());
  }
}

RankedAlphabet GenSpec::alphabet() const {
  RankedAlphabet alphabet;
  for (const auto& [name, arity] : symbols) alphabet.add(name, arity);
  return alphabet;
}

std::vector<std::pair<std::string, int>> parse_symbol_list(const std::string& text) {
  std::vector<std::pair<std::string, int>> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    std::string item = text.substr(start, comma - start);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    const std::size_t slash = item.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == item.size()) {
      throw std::invalid_argument("expected name/arity, got '" + item + "'");
    }
    const std::string name = item.substr(0, slash);
    const std::string digits = item.substr(slash + 1);
    int arity = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), arity);
    if (ec != std::errc{} || end != digits.data() + digits.size() || arity < 0) {
      throw std::invalid_argument("invalid arity in '" + item + "'");
    }
    if (!is_identifier(name) || name == kHole) throw std::invalid_argument("invalid symbol name '" + name + "'");
    for (const auto& [seen, unused] : out) {
      if (seen == name) throw std::invalid_argument("duplicate symbol '" + name + "'");
    }
    out.emplace_back(name, arity);
    start = comma + 1;
  }
  return out;
}

Dba random_dba(const GenSpec& spec) {
  spec.validate();
  const RankedAlphabet alphabet = spec.alphabet();
  Dba::Builder builder(alphabet);
  for (std::size_t q = 0; q < spec.states; ++q) builder.add_state("s" + std::to_string(q));

  SplitMix64 rng(spec.seed);
  const auto n = static_cast<StateId>(spec.states);
  for (const auto& [name, arity] : alphabet.symbols()) {
    StateTuple args(static_cast<std::size_t>(arity), 0);
    for (;;) {
      if (rng.next_unit() < spec.density) builder.add_transition(name, args, static_cast<StateId>(rng.next_below(n)));
      // Odometer over argument tuples, last position fastest.
      std::size_t i = args.size();
      while (i > 0 && ++args[i - 1] == n) args[--i] = 0;
      if (i == 0) break;
    }
  }
  for (StateId q = 0; q < n; ++q) {
    if (rng.next_unit() < spec.final_probability) builder.set_final(q);
  }
  return reduce(builder.build());
}

// ---------------------------------------------------------------------------
// Differential check

DifferentialResult differential_check(const Dba& automaton, std::size_t bound) {
  DifferentialResult result;
  const Decision decision = is_top_down_deterministic(automaton);
  result.answer = decision.answer;

  if (auto violation = exchange_violation_search(automaton, bound)) {
    result.oracle_violation = true;
    if (decision.answer) {
      result.discrepancies.push_back("exchange violation " + violation->exchanged.to_string() +
                                     " found but the decision answered true");
    }
    if (!confirm_violation(automaton, *violation)) {
      result.discrepancies.push_back("oracle violation failed its own confirmation");
    }
  }

  const AssociatedDta associated = associated_dta(automaton);
  if (auto outside = bounded_subset(automaton, associated.dta, bound)) {
    result.discrepancies.push_back("tree " + outside->to_string() + " accepted bottom-up but not top-down");
  } else {
    result.subset_holds = true;
  }

  if (decision.answer) {
    if (auto differ = bounded_language_equal(automaton, associated.dta, bound)) {
      result.discrepancies.push_back("languages differ on " + differ->to_string());
    } else {
      result.bounded_equal = true;
    }
  } else if (decision.witness && confirm_violation(automaton, as_exchange_violation(*decision.witness))) {
    result.witness_confirmed = true;
  } else {
    result.discrepancies.push_back("conflict witness is not a valid exchange violation");
  }
  return result;
}

}  // namespace topdown
