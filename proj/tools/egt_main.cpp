// Command-line front end: solvers, structure builders, the model checker,
// and the verification suites.  All output is deterministic given the
// inputs (timings are opt-in).
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "egt/dominance.hpp"
#include "egt/efr.hpp"
#include "egt/game.hpp"
#include "egt/logic.hpp"
#include "egt/structures.hpp"
#include "egt/verify.hpp"

namespace {

using namespace egt;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitInconclusive = 3;

NormalFormGame load_game(const std::string& path) {
  NormalFormGame g = game_from_json_file(path);
  auto report = validate_game(g);
  if (!report.empty()) {
    for (const auto& line : report) std::cerr << "invalid game: " << line << "\n";
    std::exit(kExitBadInput);
  }
  return g;
}

void print_rounds(const NormalFormGame& g,
                  const std::vector<StrategySets>& rounds) {
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    std::cout << "round " << r << ":";
    for (int p = 0; p < g.num_players(); ++p) {
      std::cout << "  " << g.players[p] << ":{";
      for (std::size_t i = 0; i < rounds[r][p].size(); ++i) {
        if (i) std::cout << ",";
        std::cout << g.strategies[p][rounds[r][p][i]];
      }
      std::cout << "}";
    }
    std::cout << "\n";
  }
}

void print_witnesses(const NormalFormGame& g, const DeletionTrace& trace) {
  for (int p = 0; p < g.num_players(); ++p) {
    for (const auto& [strat, wit] : trace.witnesses[p]) {
      std::cout << "deleted " << g.players[p] << ":" << g.strategies[p][strat]
                << " in round " << wit.round << " by";
      for (int s = 0; s < g.num_strategies(p); ++s)
        if (!wit.dominator.weights[s].is_zero())
          std::cout << " " << g.strategies[p][s] << ":"
                    << wit.dominator.weights[s].str();
      std::cout << "\n";
    }
  }
}

int cmd_solve(const std::string& concept_name, const std::string& path) {
  if (concept_name == "efr") {
    ExtensiveFormGame g = extensive_from_json_file(path);
    auto report = validate_extensive(g);
    if (!report.empty()) {
      for (const auto& line : report)
        std::cerr << "invalid game: " << line << "\n";
      return kExitBadInput;
    }
    ReducedGame rg = reduce(g);
    NcdTrace trace = iterate_ncd(rg);
    print_rounds(rg.game, trace.rounds);
    std::cout << "fixpoint_round " << trace.fixpoint_round << "\n";
    // witnesses: first information set and mixture that deletes the strategy
    for (std::size_t r = 0; r + 1 < trace.rounds.size(); ++r) {
      for (int p = 0; p < rg.game.num_players(); ++p) {
        for (int s : trace.rounds[r][p]) {
          if (trace.survives(p, s, static_cast<int>(r) + 1)) continue;
          auto wit = conditionally_dominated(rg, p, s, trace.rounds[r],
                                             CondVariant::CdPrime);
          if (!wit) continue;
          std::cout << "deleted " << rg.game.players[p] << ":"
                    << rg.game.strategies[p][s] << " in round " << r + 1
                    << " at set " << wit->infoset << " by";
          for (int s2 = 0; s2 < rg.game.num_strategies(p); ++s2)
            if (!wit->dominator.weights[s2].is_zero())
              std::cout << " " << rg.game.strategies[p][s2] << ":"
                        << wit->dominator.weights[s2].str();
          std::cout << "\n";
        }
      }
    }
    return kExitOk;
  }
  NormalFormGame g = load_game(path);
  if (concept_name == "ia" || concept_name == "isd") {
    auto trace = iterate_deletion(
        g, concept_name == "ia" ? DomMode::Weak : DomMode::Strict);
    print_rounds(g, trace.rounds);
    std::cout << "fixpoint_round " << trace.fixpoint_round << "\n";
    print_witnesses(g, trace);
    return kExitOk;
  }
  if (concept_name == "rationalizable") {
    auto trace = iterate_deletion(g, DomMode::Strict);
    print_rounds(g, trace.rounds);
    std::cout << "fixpoint_round " << trace.fixpoint_round << "\n";
    const auto& z = trace.survivors();
    for (int p = 0; p < g.num_players(); ++p) {
      OppProfiles opp = OppProfiles::enumerate(g, p, z);
      for (int s : z[p]) {
        auto wit = best_response_witness(g, p, s, opp, SupportMode::Any);
        std::cout << "witness " << g.players[p] << ":" << g.strategies[p][s]
                  << " ->";
        if (wit)
          for (int q = 0; q < opp.size(); ++q)
            if (!wit->weights[q].is_zero())
              std::cout << " " << g.profile_label(opp.items[q]) << ":"
                        << wit->weights[q].str();
        std::cout << "\n";
      }
    }
    return kExitOk;
  }
  std::cerr << "unknown concept " << concept_name << "\n";
  return kExitBadInput;
}

int cmd_check(const std::string& structure_path, const std::string& state,
              int time, const std::string& formula_text,
              const std::string& rat_mode, bool show_trace) {
  std::ifstream probe(structure_path);
  if (!probe) {
    std::cerr << "cannot open " << structure_path << "\n";
    return kExitBadInput;
  }
  std::stringstream ss;
  ss << probe.rdbuf();
  const std::string text = ss.str();
  const bool extensive = text.find("\"horizon\"") != std::string::npos;
  EvalTrace trace;
  try {
    if (extensive) {
      ExtEpistemicStructure s = ext_structure_from_json_text(text);
      int w = s.state_index(state);
      if (w < 0) {
        std::cerr << "unknown state " << state << "\n";
        return kExitBadInput;
      }
      FormulaPtr f = parse_formula(formula_text, s.rg.game);
      DiamondOracle oracle = make_efr_oracle(s.rg);
      bool result = eval_efr(s, w, time, f, oracle, &trace);
      for (const auto& line : trace.lines) std::cout << "# " << line << "\n";
      std::cout << (result ? "true" : "false") << "\n";
      return kExitOk;
    }
    EpistemicStructure s = structure_from_json_text(text);
    int w = s.state_index(state);
    if (w < 0) {
      std::cerr << "unknown state " << state << "\n";
      return kExitBadInput;
    }
    FormulaPtr f = parse_formula(formula_text, s.game);
    DiamondOracle oracle(s.game);
    RatMode mode = rat_mode == "lex" ? RatMode::Lex : RatMode::Prob;
    bool result = eval(s, w, f, oracle, mode, &trace);
    for (const auto& line : trace.lines) std::cout << "# " << line << "\n";
    std::cout << (result ? "true" : "false") << "\n";
    return kExitOk;
  } catch (const DiamondUndecided& ex) {
    std::cerr << ex.what() << "\n";
    return kExitInconclusive;
  } catch (const ParseError& ex) {
    std::cerr << ex.what() << "\n";
    return kExitBadInput;
  }
  (void)show_trace;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact solvers and an epistemic model checker for finite games"};
  app.require_subcommand(1);

  std::string game_path, concept_name = "ia";
  auto* solve = app.add_subcommand(
      "solve", "iterated deletion / rationalizability survivor tables");
  solve->add_option("--concept", concept_name,
                    "ia | isd | efr | rationalizable");
  solve->add_option("game", game_path, "game file (JSON)")->required();

  std::string gap_path;
  auto* gap_cmd = app.add_subcommand("gap", "strict-improvement margin");
  gap_cmd->add_option("game", gap_path)->required();

  std::string eps_path;
  int eps_k = 0;
  auto* eps_cmd =
      app.add_subcommand("epsilon0", "minimum nonzero witness probability");
  eps_cmd->add_option("game", eps_path)->required();
  eps_cmd->add_option("--k", eps_k, "round bound (default: fixpoint)");

  std::string build_kind = "ratzero", build_out, build_path, build_delta;
  int build_k = 2;
  auto* build = app.add_subcommand("build-structure",
                                   "construct an epistemic structure");
  build->add_option("--kind", build_kind, "ratzero | grat | approx | efr");
  build->add_option("--k", build_k)->required();
  build->add_option("--delta", build_delta, "approx mixing weight p/q");
  build->add_option("--out", build_out, "output path (default: stdout)");
  build->add_option("game", build_path)->required();

  std::string chk_structure, chk_state, chk_formula, chk_mode = "lex";
  int chk_time = 0;
  bool chk_trace = true;
  auto* check = app.add_subcommand("check", "evaluate a formula at a state");
  check->add_option("--structure", chk_structure)->required();
  check->add_option("--state", chk_state)->required();
  check->add_option("--time", chk_time, "time step (extensive structures)");
  check->add_option("--formula", chk_formula)->required();
  check->add_option("--rat-mode", chk_mode, "prob | lex");

  std::string ver_suite, ver_theorem, ver_game, ver_json_out;
  int ver_k = 3, ver_normal = 40, ver_extensive = 20, ver_mutations = 4;
  bool ver_timings = false;
  auto* verify_cmd =
      app.add_subcommand("verify", "theorem-by-theorem verification harness");
  verify_cmd->add_option("--suite", ver_suite, "all");
  verify_cmd->add_option("--theorem", ver_theorem);
  verify_cmd->add_option("--game", ver_game, "game file for --theorem");
  verify_cmd->add_option("--k", ver_k);
  verify_cmd->add_option("--normal-games", ver_normal);
  verify_cmd->add_option("--extensive-games", ver_extensive);
  verify_cmd->add_option("--mutations", ver_mutations);
  verify_cmd->add_option("--json-out", ver_json_out,
                         "also write reports as JSON lines");
  verify_cmd->add_flag("--timings", ver_timings, "include wall-clock column");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(concept_name, game_path);
    if (*gap_cmd) {
      auto g = load_game(gap_path);
      auto r = compute_gap(g);
      std::cout << (r.gap ? r.gap->str() : "none") << "\n";
      return kExitOk;
    }
    if (*eps_cmd) {
      auto g = load_game(eps_path);
      int k = eps_k > 0
                  ? eps_k
                  : std::max(1, iterate_deletion(g, DomMode::Weak)
                                    .fixpoint_round + 1);
      std::cout << compute_epsilon0(g, k).epsilon0.str() << "\n";
      return kExitOk;
    }
    if (*build) {
      std::string out;
      if (build_kind == "efr") {
        ExtensiveFormGame g = extensive_from_json_file(build_path);
        auto report = validate_extensive(g);
        if (!report.empty()) {
          std::cerr << "invalid game: " << report.front() << "\n";
          return kExitBadInput;
        }
        out = ext_structure_to_json_text(build_efr_structure(g, build_k));
      } else {
        NormalFormGame g = load_game(build_path);
        if (build_kind == "ratzero") {
          out = structure_to_json_text(build_ratzero_structure(g, build_k));
        } else if (build_kind == "grat") {
          out = structure_to_json_text(build_grat_structure(g, build_k));
        } else if (build_kind == "approx") {
          auto delta = Rat::parse(build_delta);
          if (!delta) {
            std::cerr << "--delta must be a rational p/q\n";
            return kExitBadInput;
          }
          out = structure_to_json_text(
              build_approx_structure(g, build_k, *delta));
        } else {
          std::cerr << "unknown kind " << build_kind << "\n";
          return kExitBadInput;
        }
      }
      if (build_out.empty()) {
        std::cout << out;
      } else {
        std::ofstream f(build_out);
        f << out;
      }
      return kExitOk;
    }
    if (*check)
      return cmd_check(chk_structure, chk_state, chk_time, chk_formula,
                       chk_mode, chk_trace);
    if (*verify_cmd) {
      std::vector<verify::VerificationReport> reports;
      if (!ver_theorem.empty()) {
        bool extensive = ver_theorem == "charefr" ||
                         ver_theorem == "charefrwd" ||
                         ver_theorem == "prop_conddom" ||
                         ver_theorem.rfind("lemma_pearce", 0) == 0;
        if (ver_game.empty()) {
          std::cerr << "--theorem needs --game\n";
          return kExitBadInput;
        }
        if (extensive) {
          reports.push_back(verify::verify_theorem_extensive(
              extensive_from_json_file(ver_game), ver_game, ver_k,
              ver_theorem));
        } else {
          reports.push_back(verify::verify_theorem(
              load_game(ver_game), ver_game, ver_k, ver_theorem,
              ver_mutations));
        }
      } else {
        verify::SuiteOptions opt;
        opt.k = ver_k;
        opt.normal_games = ver_normal;
        opt.extensive_games = ver_extensive;
        opt.mutations = ver_mutations;
        reports = verify::run_suite(opt);
      }
      std::cout << verify::report_table(reports, ver_timings);
      if (!ver_json_out.empty()) {
        std::ofstream f(ver_json_out);
        for (const auto& r : reports) f << verify::report_to_json_text(r);
      }
      bool inconclusive = false, failed = false;
      for (const auto& r : reports)
        for (const auto& c : r.claims) {
          inconclusive |= c.inconclusive;
          failed |= !c.pass && !c.inconclusive;
        }
      if (failed) return kExitVerifyFail;
      if (inconclusive) return kExitInconclusive;
      return kExitOk;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitBadInput;
  }
  return kExitOk;
}
