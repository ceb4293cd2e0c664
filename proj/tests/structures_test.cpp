#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "egt/structures.hpp"
#include "test_games.hpp"

using namespace egt;

TEST_CASE("state space size is n * sum of per-round profile counts") {
  auto s = build_ratzero_structure(testgames::g_wd(), 2);
  CHECK(s.num_states() == 2 * (4 + 2 + 1));
  auto labels_ok = s.state_index("(2,2,(U,L))") >= 0 &&
                   s.state_index("(0,1,(D,R))") >= 0;
  CHECK(labels_ok);
  // deleted profiles are absent from higher levels
  CHECK(s.state_index("(1,1,(D,L))") < 0);
  CHECK(s.state_index("(2,1,(U,R))") < 0);
}

TEST_CASE("ratzero, grat, and rationalizable builders are appropriate") {
  CHECK(check_appropriate(build_ratzero_structure(testgames::g_wd(), 2)).empty());
  CHECK(check_appropriate(build_grat_structure(testgames::g_wd(), 2)).empty());
  CHECK(check_appropriate(build_grat_structure(testgames::g_mp(), 3)).empty());
  CHECK(check_appropriate(build_rationalizable_structure(testgames::g_mp()))
            .empty());
  CHECK(check_appropriate(build_ratzero_structure(testgames::g_mp(), 3)).empty());
}

TEST_CASE("constructed violations are reported with their condition") {
  auto s = build_ratzero_structure(testgames::g_wd(), 1);
  // move own-strategy mass to a state with a different own strategy
  auto bad = s;
  int w = bad.state_index("(1,1,(U,L))");
  REQUIRE(w >= 0);
  int other = bad.state_index("(0,1,(D,L))");
  REQUIRE(other >= 0);
  auto& level = bad.beliefs[0][w].levels[0];
  for (auto& x : level) x = Rat(0);
  level[other] = Rat(1);  // player 1 believes a state where they play D
  auto report = check_appropriate(bad);
  REQUIRE(!report.empty());
  bool has2 = false;
  for (auto& v : report) has2 |= v.condition == 2;
  CHECK(has2);

  // same own strategy but a different belief there: condition 4
  auto bad4 = s;
  int w2 = bad4.state_index("(1,2,(U,L))");
  int target = bad4.state_index("(0,1,(U,L))");
  int target2 = bad4.state_index("(0,1,(U,R))");
  REQUIRE(w2 >= 0);
  REQUIRE(target >= 0);
  auto& lv = bad4.beliefs[0][w2].levels[0];
  for (auto& x : lv) x = Rat(0);
  lv[target] = Rat(1, 4);
  lv[target2] = Rat(3, 4);
  auto report4 = check_appropriate(bad4);
  bool has4 = false;
  for (auto& v : report4) has4 |= v.condition == 4;
  CHECK(has4);
}

TEST_CASE("grat towers stack the per-round witnesses") {
  auto s = build_grat_structure(testgames::g_wd(), 2);
  // at (2,1,(U,L)), the column player's LPS is (T(2,L), T(1,L))
  int w = s.state_index("(2,1,(U,L))");
  REQUIRE(w >= 0);
  const Lps& lps = s.beliefs[1][w];
  REQUIRE(lps.length() == 2);
  int t1 = s.state_index("(1,2,(U,L))");
  CHECK(lps.levels[0][t1] == Rat(1));
  int t0u = s.state_index("(0,2,(U,L))");
  int t0d = s.state_index("(0,2,(D,L))");
  CHECK(lps.levels[1][t0u] == Rat(1, 2));
  CHECK(lps.levels[1][t0d] == Rat(1, 2));
}

TEST_CASE("approximate structure mixes the tower with the delta schedule") {
  Rat delta(1, 8);
  auto s = build_approx_structure(testgames::g_wd(), 2, delta);
  int w = s.state_index("(2,1,(U,L))");
  REQUIRE(w >= 0);
  const Lps& lps = s.beliefs[1][w];
  REQUIRE(lps.length() == 1);
  // schedule (7/8, 7/64, 1/64); the two deepest terms share the level-1
  // witness, so the measure puts 7/8 up top and 1/8 on the round-1 witness.
  int t1 = s.state_index("(1,2,(U,L))");
  int t0u = s.state_index("(0,2,(U,L))");
  int t0d = s.state_index("(0,2,(D,L))");
  CHECK(lps.levels[0][t1] == Rat(7, 8));
  CHECK(lps.levels[0][t0u] == Rat(1, 16));
  CHECK(lps.levels[0][t0d] == Rat(1, 16));
  Rat total;
  for (const auto& x : lps.levels[0]) total += x;
  CHECK(total == Rat(1));

  CHECK_THROWS_AS(build_approx_structure(testgames::g_wd(), 2, Rat(1, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_approx_structure(testgames::g_wd(), 2, Rat(0)),
                  std::invalid_argument);
}

TEST_CASE("approx structure violates exactly condition 4 beyond depth one") {
  // The level-k mixture spans several state levels whose own mixtures
  // differ, so own-belief certainty is unattainable for k >= 2; conditions
  // 1 and 2 must still hold exactly.
  auto s = build_approx_structure(testgames::g_wd(), 2, Rat(1, 16));
  auto report = check_appropriate(s);
  CHECK(!report.empty());
  for (const auto& v : report) CHECK(v.condition == 4);
  auto mp = build_approx_structure(testgames::g_mp(), 2, Rat(1, 16));
  for (const auto& v : check_appropriate(mp)) CHECK(v.condition == 4);
  // a depth-zero structure has single-component mixtures and passes whole
  CHECK(check_appropriate(build_approx_structure(testgames::g_wd(), 0,
                                                 Rat(1, 16)))
            .empty());
}

TEST_CASE("rationalizable structure of matching pennies has four states") {
  auto s = build_rationalizable_structure(testgames::g_mp());
  CHECK(s.num_states() == 4);
  CHECK(s.kind == "rationalizable");
  // dominant-profile game collapses to a single state
  NormalFormGame g;
  g.players = {"1", "2"};
  g.strategies = {{"a", "b"}, {"x"}};
  g.payoffs = {{Rat(1), Rat(1)}, {Rat(0), Rat(1)}};
  auto s2 = build_rationalizable_structure(g);
  CHECK(s2.num_states() == 1);
}

TEST_CASE("structure json round-trips and re-serializes identically") {
  auto s = build_grat_structure(testgames::g_wd(), 2);
  std::string text = structure_to_json_text(s);
  auto s2 = structure_from_json_text(text);
  CHECK(structure_to_json_text(s2) == text);
  CHECK(s2.num_states() == s.num_states());
  CHECK(check_appropriate(s2).empty());
}

TEST_CASE("built state labels decompose") {
  auto s = build_ratzero_structure(testgames::g_wd(), 2);
  int w = s.state_index("(2,2,(U,L))");
  auto info = built_state_info(s, w);
  CHECK(info.level == 2);
  CHECK(info.mid_player == 1);
}
