#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "egt/efr.hpp"
#include "egt/verify.hpp"

using namespace egt;

namespace {

// Player 1 chooses Out -> (1/2, 1/2) or In; then player 2 chooses
// l -> (0,0) or r -> (1,1).
ExtensiveFormGame g_ex() {
  ExtensiveFormGame g;
  g.players = {"1", "2"};
  g.nodes.resize(5);
  g.nodes[0].mover = 0;
  g.nodes[0].children = {{"Out", 1}, {"In", 2}};
  g.nodes[1] = {0, -1, {}, {Rat(1, 2), Rat(1, 2)}, 1};
  g.nodes[2] = {0, 1, {{"l", 3}, {"r", 4}}, {}, 1};
  g.nodes[3] = {2, -1, {}, {Rat(0), Rat(0)}, 2};
  g.nodes[4] = {2, -1, {}, {Rat(1), Rat(1)}, 2};
  g.infosets = {{{0}}, {{2}}};
  return g;
}

// Perfect-recall violation: player 1 moves twice and forgets the first move.
ExtensiveFormGame forgetful() {
  ExtensiveFormGame g;
  g.players = {"1"};
  g.nodes.resize(7);
  g.nodes[0].mover = 0;
  g.nodes[0].children = {{"a", 1}, {"b", 2}};
  g.nodes[1] = {0, 0, {{"x", 3}, {"y", 4}}, {}, 1};
  g.nodes[2] = {0, 0, {{"x", 5}, {"y", 6}}, {}, 1};
  for (int leaf : {3, 4, 5, 6})
    g.nodes[leaf] = {leaf <= 4 ? 1 : 2, -1, {}, {Rat(1, 2)}, 2};
  g.infosets = {{{0}, {1, 2}}};
  return g;
}

}  // namespace

TEST_CASE("validation accepts G_EX and flags broken trees") {
  CHECK(validate_extensive(g_ex()).empty());

  auto bad = g_ex();
  bad.nodes[2].parent = -1;  // second root
  CHECK(!validate_extensive(bad).empty());

  auto forget = forgetful();
  auto report = validate_extensive(forget);
  REQUIRE(!report.empty());
  CHECK(report[0].find("perfect recall") != std::string::npos);
}

TEST_CASE("reduction produces the reduced strategic form") {
  auto rg = reduce(g_ex());
  CHECK(rg.game.strategies[0] == std::vector<std::string>{"Out", "In"});
  CHECK(rg.game.strategies[1] == std::vector<std::string>{"l", "r"});
  CHECK(rg.game.payoff(0, {0, 0}) == Rat(1, 2));
  CHECK(rg.game.payoff(0, {1, 1}) == Rat(1));
  CHECK(rg.game.payoff(1, {1, 0}) == Rat(0));
  CHECK(validate_game(rg.game).empty());

  // a second own move below In collapses behaviorally equivalent plans
  ExtensiveFormGame g2 = g_ex();
  g2.nodes[1] = {0, 0, {{"s", 5}, {"t", 6}}, {}, 1};
  g2.nodes.resize(7);
  g2.nodes[5] = {1, -1, {}, {Rat(1, 2), Rat(1, 2)}, 2};
  g2.nodes[6] = {1, -1, {}, {Rat(1, 4), Rat(1, 4)}, 2};
  g2.infosets[0].push_back({1});
  auto rg2 = reduce(g2);
  // plans: Out.s, Out.t, In (choice after Out is irrelevant once In is fixed)
  CHECK(rg2.game.num_strategies(0) == 3);
}

TEST_CASE("reach sets per the definition") {
  auto rg = reduce(g_ex());
  auto opp2 = OppProfiles::enumerate_full(rg.game, 1);  // P2's opponents
  // P2's information set is reached only when P1 plays In
  auto r = reach_set(rg, 1, 0, 0, opp2);
  REQUIRE(r.size() == 1);
  CHECK(rg.game.strategies[0][opp2.items[r[0]][0]] == "In");
  // the root set is reached by every opponent profile
  auto opp1 = OppProfiles::enumerate_full(rg.game, 0);
  CHECK(reach_set(rg, 0, 0, 0, opp1).size() == opp1.size());
  // the mixed form intersects the supports' reach sets
  MixedStrategy mix{1, {Rat(1, 2), Rat(1, 2)}};
  CHECK(reach_set_mixed(rg, 1, 0, mix, 0, opp2) == r);
}

TEST_CASE("conditional dominance on G_EX") {
  auto rg = reduce(g_ex());
  auto full = rg.game.full_sets();
  // l is conditionally dominated at the post-In set by pure r
  auto wl = conditionally_dominated(rg, 1, 0, full, CondVariant::Cd);
  REQUIRE(wl);
  CHECK(wl->dominator.pure_index() == 1);
  CHECK(conditionally_dominated(rg, 1, 0, full, CondVariant::CdPrime));
  // Out is not dominated on the full sets (l protects it)
  CHECK(!conditionally_dominated(rg, 0, 0, full, CondVariant::Cd));
  CHECK(!conditionally_dominated(rg, 0, 0, full, CondVariant::CdPrime));
  // restricting P2 to r dominates Out at the root via pure In
  StrategySets sets = full;
  sets[1] = {1};
  auto wo = conditionally_dominated(rg, 0, 0, sets, CondVariant::Cd);
  REQUIRE(wo);
  CHECK(wo->infoset == 0);
  CHECK(wo->dominator.pure_index() == 1);
}

TEST_CASE("NCD iteration of G_EX reaches {In} x {r}") {
  auto rg = reduce(g_ex());
  auto trace = iterate_ncd(rg);
  REQUIRE(trace.rounds.size() == 3);
  CHECK(trace.rounds[0] == StrategySets{{0, 1}, {0, 1}});
  CHECK(trace.rounds[1] == StrategySets{{0, 1}, {1}});
  CHECK(trace.rounds[2] == StrategySets{{1}, {1}});
  CHECK(trace.fixpoint_round == 2);
  // agreement with the brute-force oracle
  auto brute = verify::brute_force_ncd(rg);
  CHECK(brute.rounds.size() == trace.rounds.size());
  for (std::size_t i = 0; i < brute.rounds.size(); ++i)
    CHECK(brute.rounds[i] == trace.rounds[i]);
}

TEST_CASE("witness LPS construction for r over the full sets") {
  auto rg = reduce(g_ex());
  auto opp = OppProfiles::enumerate_full(rg.game, 1);
  Lps lps = witness_lps(rg, 1, 1, opp);
  // first level conditions on the post-In set (mass on In), then a uniform
  // tail covers Out
  REQUIRE(lps.length() == 2);
  int in_idx = opp.index_of({1, -1});
  int out_idx = opp.index_of({0, -1});
  CHECK(lps.levels[0][in_idx] == Rat(1));
  CHECK(lps.levels[1][out_idx] == Rat(1));
  // support is exactly the given set
  CHECK(lps.first_positive_level({in_idx}) == 0);
  CHECK(lps.first_positive_level({out_idx}) == 1);
  // dominated strategies are rejected
  CHECK_THROWS_AS(witness_lps(rg, 1, 0, opp), std::invalid_argument);
}

TEST_CASE("weak witness LPS is the constant full-support belief") {
  auto rg = reduce(g_ex());
  auto opp = OppProfiles::enumerate_full(rg.game, 1);
  Lps lps = weak_witness_lps(rg, 1, 1, opp);
  REQUIRE(lps.length() == 1);
  for (int q = 0; q < opp.size(); ++q)
    CHECK(lps.levels[0][q].is_positive());
  // l is weakly dominated in the reduced game
  CHECK_THROWS_AS(weak_witness_lps(rg, 1, 0, opp), std::invalid_argument);
  // single opponent profile: point mass
  StrategySets sets = rg.game.full_sets();
  sets[0] = {1};
  auto single = OppProfiles::enumerate(rg.game, 1, sets);
  Lps point = weak_witness_lps(rg, 1, 1, single);
  CHECK(point.levels[0][0] == Rat(1));
}

TEST_CASE("EFR structure of G_EX: counts, appropriateness, conditioning") {
  auto built = build_efr_structure(g_ex(), 2);
  CHECK(built.num_states() == 2 * (4 + 2 + 1));
  CHECK(check_appropriate_ext(built).empty());
  CHECK(check_respects_conditioning(built).empty());
}

TEST_CASE("RATEFR holds per the charefr construction on G_EX") {
  auto built = build_efr_structure(g_ex(), 2);
  DiamondOracle oracle = make_efr_oracle(built.rg);
  int w = built.state_index("(2,1,(In,r))");
  REQUIRE(w >= 0);
  CHECK(eval_efr(built, w, 0, f_macro(MacroKind::RatEfr, 2, 1), oracle));
  // G(true) everywhere, INIT agrees with time zero
  for (int m = 0; m <= built.horizon; ++m) {
    CHECK(eval_efr(built, w, m, f_g(f_true()), oracle));
    CHECK(eval_efr(built, w, m, f_init(f_macro(MacroKind::RatEfr, 2, 1)),
                   oracle) ==
          eval_efr(built, w, 0, f_macro(MacroKind::RatEfr, 2, 1), oracle));
  }
}

TEST_CASE("theorem harnesses pass on G_EX") {
  auto g = g_ex();
  for (const char* theorem : {"charefr", "charefrwd", "prop_conddom",
                              "lemma_pearce1", "lemma_pearce2"}) {
    auto r = verify::verify_theorem_extensive(g, "G_EX", 2, theorem);
    if (!r.all_pass()) {
      for (auto& c : r.claims)
        if (!c.pass)
          MESSAGE(std::string(theorem), ": ", c.name, " -- ", c.counterexample);
    }
    CHECK(r.all_pass());
  }
}

TEST_CASE("extensive game json round-trip") {
  auto g = g_ex();
  auto text = extensive_to_json_text(g);
  auto g2 = extensive_from_json_text(text);
  CHECK(validate_extensive(g2).empty());
  auto rg = reduce(g2);
  CHECK(rg.game.strategies[0] == std::vector<std::string>{"Out", "In"});
  CHECK(extensive_to_json_text(g2) == text);
}

TEST_CASE("random extensive corpus is well-formed") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto g = verify::random_extensive_game(seed);
    auto report = validate_extensive(g);
    if (!report.empty()) MESSAGE("seed ", seed, ": ", report[0]);
    CHECK(report.empty());
    auto rg = reduce(g);
    CHECK(validate_game(rg.game).empty());
  }
}
