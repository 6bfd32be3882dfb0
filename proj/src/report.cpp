#include "topdown/report.hpp"

#include <sstream>

namespace topdown {

namespace {

nlohmann::ordered_json tree_list(const std::vector<Tree>& trees) {
  auto out = nlohmann::ordered_json::array();
  for (const Tree& t : trees) out.push_back(t.to_string());
  return out;
}

std::string tuple_text(const std::vector<std::string>& names) {
  std::string out = "(";
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
  return out + ")";
}

std::string triple_text(const std::array<std::string, 3>& t) { return "(" + t[0] + ", " + t[1] + ", " + t[2] + ")"; }

}  // namespace

nlohmann::ordered_json explain(const Decision& decision, const std::optional<Verification>& verification) {
  nlohmann::ordered_json report;
  report["answer"] = decision.answer;
  report["verdict"] = decision.answer ? "top-down deterministic" : "not top-down deterministic";
  if (decision.witness) {
    const ConflictWitness& w = *decision.witness;
    nlohmann::ordered_json witness;
    witness["triple"] = w.triple;
    witness["symbol"] = w.symbol;
    witness["position"] = w.position;
    witness["context"] = w.context.to_string();
    witness["hole"] = w.context.hole_address();
    witness["left_trees"] = tree_list(w.left_trees);
    witness["right_trees"] = tree_list(w.right_trees);
    witness["accepted_trees"] = {w.accepted_left.to_string(), w.accepted_right.to_string()};
    witness["violating_tree"] = w.violating_tree.to_string();
    auto trail = nlohmann::ordered_json::array();
    for (const TrailStep& step : w.trail) {
      nlohmann::ordered_json entry;
      entry["kind"] = step.kind;
      entry["triple"] = step.states;
      entry["symbol"] = step.symbol;
      entry["position"] = step.position;
      if (step.kind == "seed") {
        entry["left"] = step.left;
        entry["right"] = step.right;
      } else {
        entry["arguments"] = step.left;
      }
      trail.push_back(std::move(entry));
    }
    witness["trail"] = std::move(trail);
    report["witness"] = std::move(witness);
  } else {
    report["witness"] = nullptr;
  }
  const DecisionStats& s = decision.stats;
  report["stats"] = {{"input_states", s.input_states},     {"reachable_states", s.reachable_states},
                     {"transitions", s.transitions},       {"automaton_size", s.automaton_size},
                     {"seed_triples", s.seed_triples},     {"closed_triples", s.closed_triples}};
  report["notes"] = decision.notes;
  if (verification) {
    nlohmann::ordered_json v;
    v["bound"] = verification->bound;
    v["ok"] = verification->ok();
    if (verification->witness_confirmed) v["witness_confirmed"] = *verification->witness_confirmed;
    if (verification->bounded_equal) v["bounded_equal"] = *verification->bounded_equal;
    if (verification->first_disagreement) v["first_disagreement"] = *verification->first_disagreement;
    report["verification"] = std::move(v);
  }
  return report;
}

std::string render_text(const Decision& decision, const std::optional<Verification>& verification) {
  std::ostringstream out;
  const DecisionStats& s = decision.stats;
  out << (decision.answer ? "top-down deterministic" : "not top-down deterministic") << "\n";
  out << "  states: " << s.input_states << " (" << s.reachable_states << " reachable), transitions: "
      << s.transitions << ", size: " << s.automaton_size << "\n";
  out << "  triples: " << s.seed_triples << " seeds, " << s.closed_triples << " after closure\n";
  if (decision.witness) {
    const ConflictWitness& w = *decision.witness;
    out << "  conflict " << triple_text(w.triple) << " on " << w.symbol << " at position " << w.position << "\n";
    out << "  context:  " << w.context.to_string() << "\n";
    out << "  accepted: " << w.accepted_left.to_string() << "\n";
    out << "  accepted: " << w.accepted_right.to_string() << "\n";
    out << "  rejected: " << w.violating_tree.to_string() << "\n";
    out << "  trail:\n";
    for (const TrailStep& step : w.trail) {
      out << "    " << step.kind << " " << triple_text(step.states) << " via " << step.symbol;
      if (step.kind == "seed") {
        out << tuple_text(step.left) << " / " << step.symbol << tuple_text(step.right) << " mixed at "
            << step.position;
      } else {
        out << tuple_text(step.left);
      }
      out << "\n";
    }
  }
  for (const std::string& note : decision.notes) out << "  note: " << note << "\n";
  if (verification) {
    out << "  verification (bound " << verification->bound << "): ";
    if (verification->witness_confirmed) {
      out << (*verification->witness_confirmed ? "witness confirmed" : "WITNESS NOT CONFIRMED");
    }
    if (verification->bounded_equal) {
      out << (*verification->bounded_equal ? "languages agree" : "LANGUAGES DIFFER on ")
          << verification->first_disagreement.value_or("");
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace topdown
