#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "egt/verify.hpp"
#include "test_games.hpp"

using namespace egt;

TEST_CASE("brute-force survivors match the reference traces") {
  auto weak = verify::brute_force_survivors(testgames::g_wd(),
                                            verify::DeletionMode::Weak);
  REQUIRE(weak.rounds.size() == 3);
  CHECK(weak.rounds[1] == StrategySets{{0}, {0, 1}});
  CHECK(weak.rounds[2] == StrategySets{{0}, {0}});
  auto strict = verify::brute_force_survivors(testgames::g_wd(),
                                              verify::DeletionMode::Strict);
  CHECK(strict.fixpoint_round == 0);
  auto mp = verify::brute_force_survivors(testgames::g_mp(),
                                          verify::DeletionMode::Weak);
  CHECK(mp.fixpoint_round == 0);
}

TEST_CASE("size guard rejects huge games") {
  NormalFormGame g;
  g.players = {"1", "2"};
  g.strategies.resize(2);
  for (int k = 0; k < 110; ++k) {
    g.strategies[0].push_back("a" + std::to_string(k));
    g.strategies[1].push_back("b" + std::to_string(k));
  }
  g.payoffs.assign(110 * 110, {Rat(0), Rat(0)});
  CHECK_THROWS_AS(
      verify::brute_force_survivors(g, verify::DeletionMode::Weak),
      std::length_error);
}

TEST_CASE("lp path and oracle path agree on the corpus") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    auto g = verify::random_game(seed);
    for (auto mode : {DomMode::Weak, DomMode::Strict}) {
      auto lp = iterate_deletion(g, mode);
      auto oracle = verify::brute_force_survivors(
          g, mode == DomMode::Weak ? verify::DeletionMode::Weak
                                   : verify::DeletionMode::Strict);
      REQUIRE(lp.rounds.size() == oracle.rounds.size());
      for (std::size_t r = 0; r < lp.rounds.size(); ++r)
        CHECK(lp.rounds[r] == oracle.rounds[r]);
    }
  }
}

TEST_CASE("both mixture-base conventions give identical weak traces") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    auto g = verify::random_game(seed);
    auto full = iterate_deletion(g, DomMode::Weak, MixtureBase::FullSigma);
    auto surv = iterate_deletion(g, DomMode::Weak, MixtureBase::Survivors);
    REQUIRE(full.rounds.size() == surv.rounds.size());
    for (std::size_t r = 0; r < full.rounds.size(); ++r)
      CHECK(full.rounds[r] == surv.rounds[r]);
  }
}

TEST_CASE("theorem harness passes on the reference games") {
  for (const char* theorem :
       {"charrat", "charsd", "charwd", "charwdg", "charwdg1", "prop_grat",
        "lemma_ckchar"}) {
    for (const auto& [g, id] :
         {std::pair{testgames::g_wd(), "G_WD"},
          std::pair{testgames::g_mp(), "G_MP"}}) {
      auto r = verify::verify_theorem(g, id, 2, theorem, 4);
      if (!r.all_pass())
        for (auto& c : r.claims)
          if (!c.pass) MESSAGE(std::string(theorem), "/", id, ": ", c.name, " -- ",
                               c.counterexample);
      CHECK(r.all_pass());
    }
  }
}

TEST_CASE("harness catches a truncated structure") {
  // Deleting a level-0 state breaks the full-support clauses at level 1; the
  // per-state claims must then fail with a counterexample.
  auto g = testgames::g_wd();
  auto built = build_grat_structure(g, 2);
  DiamondOracle oracle(g);
  EpistemicStructure cut = built;
  int victim = cut.state_index("(0,2,(D,R))");
  REQUIRE(victim >= 0);
  // zero out every belief's mass on the victim and renormalize
  for (auto& per_player : cut.beliefs) {
    for (auto& lps : per_player) {
      for (auto& level : lps.levels) {
        Rat removed = level[victim];
        if (removed.is_zero()) continue;
        level[victim] = Rat(0);
        Rat rest = Rat::one() - removed;
        if (rest.is_zero()) { level[victim] = Rat(1); continue; }
        for (auto& x : level) x /= rest;
      }
    }
  }
  bool some_claim_fails = false;
  std::string counterexample;
  for (int w = 0; w < cut.num_states() && !some_claim_fails; ++w) {
    auto info = built_state_info(cut, w);
    for (int j = 0; j < 2; ++j) {
      if (j == info.mid_player) continue;
      if (!eval(cut, w, f_macro(MacroKind::GratZero, info.level, j), oracle,
                RatMode::Lex)) {
        some_claim_fails = true;
        counterexample = cut.state_labels[w];
        break;
      }
    }
  }
  CHECK(some_claim_fails);
  CHECK(!counterexample.empty());
}

TEST_CASE("theorem harness passes on a corpus slice") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto g = verify::random_game(seed);
    std::string id = "random-" + std::to_string(seed);
    for (const char* theorem : {"charwd", "charwdg", "charwdg1"}) {
      auto r = verify::verify_theorem(g, id, 3, theorem, 2);
      if (!r.all_pass())
        for (auto& c : r.claims)
          if (!c.pass) MESSAGE(std::string(theorem), "/", id, ": ", c.name, " -- ",
                               c.counterexample);
      CHECK(r.all_pass());
    }
  }
}

TEST_CASE("extensive harness passes on a corpus slice") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto g = verify::random_extensive_game(seed);
    std::string id = "random-ext-" + std::to_string(seed);
    for (const char* theorem : {"charefr", "charefrwd", "prop_conddom",
                                "lemma_pearce1", "lemma_pearce2"}) {
      auto r = verify::verify_theorem_extensive(g, id, 2, theorem);
      if (!r.all_pass())
        for (auto& c : r.claims)
          if (!c.pass) MESSAGE(std::string(theorem), "/", id, ": ", c.name, " -- ",
                               c.counterexample);
      CHECK(r.all_pass());
    }
  }
}

TEST_CASE("reports serialize to json and a table") {
  auto r = verify::verify_theorem(testgames::g_mp(), "G_MP", 2, "charwd", 1);
  auto text = verify::report_to_json_text(r);
  CHECK(text.find("\"theorem\": \"charwd\"") != std::string::npos);
  CHECK(text.find("\"all_pass\": true") != std::string::npos);
  auto table = verify::report_table({r});
  CHECK(table.find("charwd") != std::string::npos);
  CHECK(table.find("pass") != std::string::npos);
}
