#include "topdown/cli.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "topdown/decision.hpp"
#include "topdown/error.hpp"
#include "topdown/format.hpp"
#include "topdown/report.hpp"

namespace topdown::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int write_output(const std::string& text, const std::optional<std::filesystem::path>& out_path, std::ostream& out,
                 std::ostream& err) {
  if (!out_path) {
    out << text;
    return kYes;
  }
  std::ofstream file(*out_path, std::ios::binary);
  file << text;
  if (!file) {
    err << "error: cannot write '" << out_path->string() << "'\n";
    return kError;
  }
  return kYes;
}

}  // namespace

int check(const std::filesystem::path& path, const CheckOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const auto start = Clock::now();
    const Dba automaton = load_dba(path);
    DecisionOptions decision_options;
    decision_options.full_closure = options.full_closure;
    const Decision decision = is_top_down_deterministic(automaton, decision_options);
    const double decide_time = seconds_since(start);

    std::optional<Verification> verification;
    if (options.verify) {
      Verification v;
      v.bound = options.oracle_bound;
      if (decision.witness) {
        v.witness_confirmed = confirm_violation(automaton, as_exchange_violation(*decision.witness));
      } else {
        const AssociatedDta associated = associated_dta(automaton);
        auto differ = bounded_language_equal(automaton, associated.dta, options.oracle_bound);
        v.bounded_equal = !differ.has_value();
        if (differ) v.first_disagreement = differ->to_string();
      }
      verification = v;
    }

    if (options.json) {
      out << explain(decision, verification).dump(2) << "\n";
    } else {
      out << render_text(decision, verification);
    }
    if (options.stats) {
      err << std::fixed << std::setprecision(6) << "decision time: " << decide_time
          << " s, total: " << seconds_since(start) << " s\n";
    }
    if (verification && !verification->ok()) {
      err << "error: oracle verification failed\n";
      return kError;
    }
    return decision.answer ? kYes : kNo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

int build_dta(const std::filesystem::path& path, const std::optional<std::filesystem::path>& out_path, bool stats,
              std::ostream& out, std::ostream& err) {
  try {
    const auto start = Clock::now();
    const AssociatedDta associated = associated_dta(load_dba(path));
    const int code = write_output(render_dta(associated.dta), out_path, out, err);
    if (stats) {
      err << std::fixed << std::setprecision(6) << "subset states: " << associated.dta.state_count()
          << ", entries: " << associated.dta.entry_count() << ", time: " << seconds_since(start) << " s\n";
    }
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

int gen(const GenSpec& spec, const std::optional<std::filesystem::path>& out_path, std::ostream& out,
        std::ostream& err) {
  try {
    return write_output(render_dba(random_dba(spec)), out_path, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

int fuzz(const FuzzOptions& options, std::ostream& out, std::ostream& err) {
  try {
    options.base.validate();
    std::size_t agreements = 0;
    std::size_t false_confirmed = 0;
    std::size_t true_equal = 0;
    std::size_t oracle_found = 0;
    std::size_t discrepancies = 0;
    for (std::size_t i = 0; i < options.count; ++i) {
      GenSpec spec = options.base;
      spec.seed = options.base.seed + i;
      const DifferentialResult result = differential_check(random_dba(spec), options.bound);
      if (result.oracle_violation) ++oracle_found;
      if (result.discrepancies.empty()) {
        ++agreements;
        if (result.answer) {
          ++true_equal;
        } else {
          ++false_confirmed;
        }
        continue;
      }
      ++discrepancies;
      for (const std::string& d : result.discrepancies) out << "seed " << spec.seed << ": " << d << "\n";
    }
    out << "seeds                    " << options.count << " (from " << options.base.seed << ")\n";
    out << "agreements               " << agreements << "\n";
    out << "false, witness confirmed " << false_confirmed << "\n";
    out << "true, bounded equality   " << true_equal << "\n";
    out << "oracle violations        " << oracle_found << "\n";
    out << "discrepancies            " << discrepancies << "\n";
    return discrepancies == 0 ? kYes : kNo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

int eval(const std::filesystem::path& path, const std::string& tree_text, std::ostream& out, std::ostream& err) {
  try {
    const Dba automaton = complete(load_dba(path));
    const Tree tree = parse_tree(tree_text);
    if (!validate_tree(automaton.alphabet(), tree)) {
      err << "error: '" << tree_text << "' is not a tree over " << automaton.alphabet().to_string() << "\n";
      return kError;
    }
    const StateId state = eval_tree(automaton, tree);
    const bool accepted = automaton.is_final(state);
    out << tree.to_string() << " -> " << automaton.state_name(state) << (accepted ? " (accepted)" : " (rejected)")
        << "\n";
    return accepted ? kYes : kNo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decide whether a bottom-up tree automaton's language is deterministic top-down"};
  app.require_subcommand(1);

  std::string path;
  CheckOptions check_options;
  auto* check_cmd = app.add_subcommand("check", "Decide top-down determinism of a .dba file");
  check_cmd->add_option("file", path, "Automaton file")->required();
  check_cmd->add_flag("--json", check_options.json, "Emit a JSON report");
  check_cmd->add_flag("--verify", check_options.verify, "Cross-check the answer with the brute-force oracle");
  check_cmd->add_option("--oracle-bound", check_options.oracle_bound, "Tree size bound for --verify")
      ->check(CLI::PositiveNumber);
  check_cmd->add_flag("--stats", check_options.stats, "Print timing to stderr");
  check_cmd->add_flag("--full-closure", check_options.full_closure, "Keep closing the triple set after a conflict");

  std::optional<std::string> out_path;
  bool dta_stats = false;
  auto* dta_cmd = app.add_subcommand("build-dta", "Write the associated top-down automaton");
  dta_cmd->add_option("file", path, "Automaton file")->required();
  dta_cmd->add_option("-o,--out", out_path, "Output .dta file (default: stdout)");
  dta_cmd->add_flag("--stats", dta_stats, "Print statistics to stderr");

  GenSpec spec;
  std::string symbols = "a/0,b/0,f/2,g/1";
  const auto add_gen_options = [&](CLI::App* cmd) {
    cmd->add_option("--seed", spec.seed, "Generator seed");
    cmd->add_option("--states", spec.states, "Number of states")->check(CLI::PositiveNumber);
    cmd->add_option("--symbols", symbols, "Alphabet as name/arity list")->capture_default_str();
    cmd->add_option("--density", spec.density, "Transition probability")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--final-prob", spec.final_probability, "Final-state probability")->check(CLI::Range(0.0, 1.0));
  };
  auto* gen_cmd = app.add_subcommand("gen", "Write a random .dba");
  add_gen_options(gen_cmd);
  gen_cmd->add_option("-o,--out", out_path, "Output file (default: stdout)");

  FuzzOptions fuzz_options;
  auto* fuzz_cmd = app.add_subcommand("fuzz", "Differential test against the brute-force oracle");
  add_gen_options(fuzz_cmd);
  fuzz_cmd->add_option("--count", fuzz_options.count, "Number of automata");
  fuzz_cmd->add_option("--bound", fuzz_options.bound, "Tree size bound")->check(CLI::PositiveNumber);

  std::string tree;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a tree against a .dba");
  eval_cmd->add_option("file", path, "Automaton file")->required();
  eval_cmd->add_option("tree", tree, "Tree, e.g. f(a,b)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kYes : kError;
  }

  if (*gen_cmd || *fuzz_cmd) {
    try {
      spec.symbols = parse_symbol_list(symbols);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kError;
    }
  }
  std::optional<std::filesystem::path> out_file;
  if (out_path) out_file = *out_path;

  if (*check_cmd) return check(path, check_options, out, err);
  if (*dta_cmd) return build_dta(path, out_file, dta_stats, out, err);
  if (*gen_cmd) return gen(spec, out_file, out, err);
  if (*fuzz_cmd) {
    fuzz_options.base = spec;
    return fuzz(fuzz_options, out, err);
  }
  return eval(path, tree, out, err);
}

}  // namespace topdown::cli
