#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "egt/game.hpp"
#include "test_games.hpp"

using namespace egt;

TEST_CASE("reference games validate cleanly") {
  CHECK(validate_game(testgames::g_wd()).empty());
  CHECK(validate_game(testgames::g_mp()).empty());
  CHECK(validate_game(testgames::g_wd_halved()).empty());
}

TEST_CASE("payoff out of [0,1] is reported") {
  auto g = testgames::g_wd();
  g.payoffs[1][0] = Rat(3, 2);
  auto report = validate_game(g);
  REQUIRE(report.size() == 1);
  CHECK(report[0].find("payoff out of [0,1]") != std::string::npos);
  CHECK(report[0].find("(U,R)") != std::string::npos);
}

TEST_CASE("empty strategy set is reported") {
  auto g = testgames::g_wd();
  g.strategies[1].clear();
  auto report = validate_game(g);
  REQUIRE(!report.empty());
  CHECK(report[0].find("empty strategy set") != std::string::npos);
}

TEST_CASE("duplicate labels and missing payoffs are reported") {
  auto g = testgames::g_wd();
  g.strategies[0] = {"U", "U"};
  CHECK(!validate_game(g).empty());

  g = testgames::g_wd();
  g.payoffs.pop_back();
  CHECK(!validate_game(g).empty());
}

TEST_CASE("validation is a pure function") {
  auto g = testgames::g_wd();
  g.payoffs[0][1] = Rat(5, 4);
  CHECK(validate_game(g) == validate_game(g));
}

TEST_CASE("profile indexing follows player order then declaration order") {
  auto g = testgames::g_wd();
  CHECK(g.profile_index({0, 0}) == 0);
  CHECK(g.profile_index({0, 1}) == 1);
  CHECK(g.profile_index({1, 0}) == 2);
  CHECK(g.profile_at(3) == Profile{1, 1});
  CHECK(g.profile_label({1, 0}) == "(D,L)");
}

TEST_CASE("opponent profile enumeration is canonical") {
  auto g = testgames::g_wd();
  auto opp = OppProfiles::enumerate_full(g, 0);
  REQUIRE(opp.size() == 2);
  CHECK(opp.items[0][1] == 0);
  CHECK(opp.items[1][1] == 1);
  CHECK(opp.index_of({-1, 1}) == 1);
  CHECK(combine(opp.items[1], 0, 0) == Profile{0, 1});
}

TEST_CASE("json round-trip preserves the game") {
  auto g = testgames::g_wd();
  auto text = game_to_json_text(g);
  auto g2 = game_from_json_text(text);
  CHECK(g2.players == g.players);
  CHECK(g2.strategies == g.strategies);
  for (long long idx = 0; idx < g.num_profiles(); ++idx)
    for (int p = 0; p < g.num_players(); ++p)
      CHECK(g2.payoffs[idx][p] == g.payoffs[idx][p]);
  // integers allowed as shorthand for rationals
  auto g3 = game_from_json_text(R"({
    "players": ["1", "2"],
    "strategies": {"1": ["a"], "2": ["b"]},
    "payoffs": [{"profile": {"1": "a", "2": "b"}, "u": {"1": 1, "2": "1/2"}}]
  })");
  CHECK(g3.payoffs[0][0] == Rat(1));
  CHECK(g3.payoffs[0][1] == Rat(1, 2));
  CHECK_THROWS(game_from_json_text(R"({
    "players": ["1"],
    "strategies": {"1": ["a", "b"]},
    "payoffs": [{"profile": {"1": "a"}, "u": {"1": 1}}]
  })"));
}
