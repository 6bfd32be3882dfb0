#pragma once

#include <string>
#include <vector>

#include "topdown/automata.hpp"
#include "topdown/format.hpp"
#include "topdown/oracle.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(TOPDOWN_DATA_DIR) + "/" + name; }

// The zig-zag automaton g^n(f(x,y)), built directly rather than parsed.
inline topdown::Dba gzigzag() {
  using topdown::StateId;
  topdown::Dba::Builder b({{"a", 0}, {"b", 0}, {"f", 2}, {"g", 1}});
  const StateId q = b.add_state("q");
  const StateId qa = b.add_state("q_a");
  const StateId qb = b.add_state("q_b");
  const StateId p = b.add_state("p");
  const StateId pab = b.add_state("p_ab");
  const StateId pp = b.add_state("p'");
  const StateId pba = b.add_state("p_ba");
  for (StateId s : {q, p, pab, pba}) b.set_final(s);
  b.add_transition("a", {}, qa);
  b.add_transition("b", {}, qb);
  b.add_transition("f", {qa, qa}, q);
  b.add_transition("f", {qb, qb}, q);
  b.add_transition("f", {qa, qb}, pab);
  b.add_transition("f", {qb, qa}, pba);
  b.add_transition("g", {pab}, p);
  b.add_transition("g", {pba}, pp);
  b.add_transition("g", {pp}, p);
  b.add_transition("g", {p}, pp);
  return b.build();
}

// {f(a,b), f(b,a)}.
inline topdown::Dba fab() {
  topdown::Dba::Builder b({{"f", 2}, {"a", 0}, {"b", 0}});
  const auto qa = b.add_state("qa");
  const auto qb = b.add_state("qb");
  const auto qf = b.add_state("qf");
  b.set_final(qf);
  b.add_transition("a", {}, qa);
  b.add_transition("b", {}, qb);
  b.add_transition("f", {qa, qb}, qf);
  b.add_transition("f", {qb, qa}, qf);
  return b.build();
}

// {a}.
inline topdown::Dba single() {
  topdown::Dba::Builder b({{"a", 0}});
  b.set_final(b.add_state("q"));
  b.add_transition("a", {}, 0);
  return b.build();
}

// Every parsed file under data/ plus the built-in automata.
inline std::vector<topdown::Dba> corpus() {
  std::vector<topdown::Dba> out{gzigzag(), fab(), single()};
  for (const char* name : {"gzigzag.dba", "fab.dba", "single.dba", "chain.dba", "all_pairs.dba", "even_a.dba"}) {
    out.push_back(topdown::load_dba(data_path(name)));
  }
  return out;
}

// Small random automata over {a/0, b/0, f/2, g/1}.
inline std::vector<topdown::Dba> random_corpus(std::size_t count, std::uint64_t first_seed, std::size_t states = 3,
                                               double density = 0.7) {
  std::vector<topdown::Dba> out;
  for (std::size_t i = 0; i < count; ++i) {
    topdown::GenSpec spec;
    spec.seed = first_seed + i;
    spec.states = states;
    spec.density = density;
    out.push_back(topdown::random_dba(spec));
  }
  return out;
}

}  // namespace fixtures
