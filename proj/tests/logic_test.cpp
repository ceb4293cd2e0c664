#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "egt/logic.hpp"
#include "egt/structures.hpp"
#include "test_games.hpp"

using namespace egt;

namespace {

const NormalFormGame& gwd() {
  static NormalFormGame g = testgames::g_wd();
  return g;
}

FormulaPtr parse(const std::string& text) { return parse_formula(text, gwd()); }

}  // namespace

TEST_CASE("parser covers the grammar") {
  auto f = parse("(RAT[1] & B[1](play[2]=L))");
  CHECK(f->tag == Formula::Tag::And);
  CHECK(f->children[0]->tag == Formula::Tag::RatAtom);
  CHECK(f->children[1]->tag == Formula::Tag::B);
  CHECK(f->children[1]->children[0]->tag == Formula::Tag::Play);
  // the spec's own example omits the outer parentheses; accepted leniently
  auto g = parse("RAT[1] & B[1](play[2]=L)");
  CHECK(g->tag == Formula::Tag::And);

  auto o = parse("O[1](GRATZ^1[2])");
  CHECK(o->tag == Formula::Tag::O);
  CHECK(o->children[0]->tag == Formula::Tag::Macro);
  CHECK(o->children[0]->macro == MacroKind::GratZero);

  auto od = parse("Od[1,1/16,1/4](GRATA^1[2;1/16,1/4],true)");
  CHECK(od->tag == Formula::Tag::Od);
  CHECK(od->delta == Rat(1, 16));
  CHECK(od->children.size() == 2);

  auto bd = parse("Bd[2,1/8](play[1]=U|!play[2]=L)");
  CHECK(bd->tag == Formula::Tag::Bd);
  CHECK(bd->has_condition);

  CHECK(parse("DIA((play[1]=D & RATZ^1[1]))")->tag == Formula::Tag::Diamond);
  CHECK(parse("!true")->tag == Formula::Tag::Not);
  CHECK(parse("PB[1](RAT[2])")->tag == Formula::Tag::PB);
  CHECK(parse("INIT(G(true))")->tag == Formula::Tag::Init);
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse("B[1]("), ParseError);
  CHECK_THROWS_AS(parse("play[3]=U"), ParseError);
  CHECK_THROWS_AS(parse("play[1]=Z"), ParseError);
  CHECK_THROWS_AS(parse("RAT[1] &"), ParseError);
  CHECK_THROWS_AS(parse("GRATA^1[1]"), ParseError);  // missing parameters
  try {
    parse("B[1](");
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
    CHECK(e.column >= 5);
  }
}

TEST_CASE("macro expansion matches the definitions") {
  auto g = gwd();
  // RATZ^0 is true
  auto z0 = expand_macro(*f_macro(MacroKind::RatZero, 0, 0), g);
  CHECK(z0->tag == Formula::Tag::True);
  // GRATZ^1[i] = RAT_i & O_i(true)
  auto g1 = expand_macro(*f_macro(MacroKind::GratZero, 1, 0), g);
  REQUIRE(g1->tag == Formula::Tag::And);
  CHECK(g1->children[0]->tag == Formula::Tag::RatAtom);
  REQUIRE(g1->children[1]->tag == Formula::Tag::O);
  REQUIRE(g1->children[1]->children.size() == 1);
  // the single list entry is the group macro GRATZ^0; for two players it
  // expands to the opponent's GRATZ^0, which in turn expands to true
  auto entry = g1->children[1]->children[0];
  auto step = expand_macro(*entry, g);
  REQUIRE(step->tag == Formula::Tag::Macro);
  CHECK(expand_macro(*step, g)->tag == Formula::Tag::True);
  // GRATA^1[i;d,e] = RAT_i & Od_i(true)
  auto a1 = expand_macro(
      *f_macro(MacroKind::GratApprox, 1, 0, false, Rat(1, 16), Rat(1, 4)), g);
  REQUIRE(a1->tag == Formula::Tag::And);
  CHECK(a1->children[1]->tag == Formula::Tag::Od);
  // RATZ^{k+1} carries the play-consistency conjunct
  auto z2 = expand_macro(*f_macro(MacroKind::RatZero, 2, 0), g);
  REQUIRE(z2->tag == Formula::Tag::And);
  CHECK(z2->children[0]->tag == Formula::Tag::RatAtom);
}

TEST_CASE("diamond oracle answers the characterized families") {
  DiamondOracle oracle(gwd());
  CHECK(oracle.query(f_true()) == DiamondAnswer::Sat);
  // D does not survive one round of weak deletion
  auto q1 = f_and(f_play(0, 1), f_macro(MacroKind::RatZero, 1, 0));
  CHECK(oracle.query(q1) == DiamondAnswer::Unsat);
  auto q2 = f_and(f_play(0, 0), f_macro(MacroKind::RatZero, 2, 0));
  CHECK(oracle.query(q2) == DiamondAnswer::Sat);
  // column profile (as the opponent of the row player)
  auto q3 = f_and(f_play(1, 1), f_macro(MacroKind::RatZero, 2, 0, true));
  CHECK(oracle.query(q3) == DiamondAnswer::Unsat);  // R not in NWD^2
  // GRATZ H-pattern
  auto q4 = f_and_all({f_play(1, 1),
                       f_not(f_macro(MacroKind::GratZero, 2, 0, true)),
                       f_macro(MacroKind::GratZero, 1, 0, true)});
  CHECK(oracle.query(q4) == DiamondAnswer::Sat);  // R survives one round
  // a propositional contradiction is not simplified by the oracle
  auto q5 = f_and(f_rat(0), f_not(f_rat(0)));
  CHECK(oracle.query(q5) == DiamondAnswer::Unknown);
  // contradictory play atoms are part of the profile family
  auto q6 = f_and(f_play(0, 0), f_play(0, 1));
  CHECK(oracle.query(q6) == DiamondAnswer::Unsat);
}

TEST_CASE("B of true holds everywhere; PB is not-B-not") {
  auto s = build_grat_structure(gwd(), 2);
  DiamondOracle oracle(gwd());
  auto formulas = {
      parse("RAT[1]"), parse("RAT[2]"), parse("play[1]=U"),
      parse("B[2](play[1]=U)"), parse("GRATZ^1[2]"),
  };
  for (int w = 0; w < s.num_states(); ++w) {
    CHECK(eval(s, w, parse("B[1](true)"), oracle, RatMode::Lex));
    for (const auto& f : formulas) {
      bool pb = eval(s, w, f_pb(0, f), oracle, RatMode::Lex);
      bool nbn = !eval(s, w, f_b(0, {f_not(f)}), oracle, RatMode::Lex);
      CHECK(pb == nbn);
    }
  }
}

TEST_CASE("RAT follows best response against the projected belief") {
  auto s = build_ratzero_structure(gwd(), 1);
  DiamondOracle oracle(gwd());
  // at level-0 states the column player holds a point-mass belief on the
  // first row strategy (U); R is then strictly worse than L
  int w = s.state_index("(0,1,(U,R))");
  REQUIRE(w >= 0);
  CHECK(!eval(s, w, parse("RAT[2]"), oracle, RatMode::Prob));
  int w2 = s.state_index("(0,1,(U,L))");
  CHECK(eval(s, w2, parse("RAT[2]"), oracle, RatMode::Prob));
  // the row player's D ties U against point-L, so RAT holds there
  CHECK(eval(s, w2, parse("RAT[1]"), oracle, RatMode::Prob));
}

TEST_CASE("prob mode rejects longer LPSs") {
  auto s = build_grat_structure(gwd(), 2);
  DiamondOracle oracle(gwd());
  CHECK_THROWS_AS(eval(s, 0, parse("RAT[1]"), oracle, RatMode::Prob),
                  std::invalid_argument);
}

TEST_CASE("theorem instance: GRATZ^2 holds at the built top state") {
  auto s = build_grat_structure(gwd(), 2);
  DiamondOracle oracle(gwd());
  int w = s.state_index("(2,2,(U,L))");
  REQUIRE(w >= 0);
  CHECK(eval(s, w, parse("GRATZ^2[1]"), oracle, RatMode::Lex));
  // and the column player's level-2 rationality at the row-middle state
  int w2 = s.state_index("(2,1,(U,L))");
  CHECK(eval(s, w2, parse("GRATZ^2[2]"), oracle, RatMode::Lex));
  // deleted strategies never satisfy their level
  for (int st = 0; st < s.num_states(); ++st) {
    if (s.strat[st][0] == 1)  // row plays D
      CHECK(!eval(s, st, parse("GRATZ^1[1]"), oracle, RatMode::Lex));
  }
}

TEST_CASE("vacuous conditioning keeps no-deletion games satisfiable") {
  auto g = testgames::g_mp();
  auto s = build_grat_structure(g, 3);
  DiamondOracle oracle(g);
  for (int w = 0; w < s.num_states(); ++w) {
    BuiltStateInfo info = built_state_info(s, w);
    for (int j = 0; j < 2; ++j) {
      if (j == info.mid_player) continue;
      CHECK(eval(s, w, f_macro(MacroKind::GratZero, info.level, j), oracle,
                 RatMode::Lex));
    }
  }
}

TEST_CASE("ratzero holds per the charwd construction") {
  auto s = build_ratzero_structure(gwd(), 2);
  DiamondOracle oracle(gwd());
  for (int w = 0; w < s.num_states(); ++w) {
    BuiltStateInfo info = built_state_info(s, w);
    for (int j = 0; j < 2; ++j) {
      if (j == info.mid_player) continue;
      CHECK(eval(s, w, f_macro(MacroKind::RatZero, info.level, j), oracle,
                 RatMode::Prob));
    }
  }
}

TEST_CASE("diamond inside eval raises on unknown") {
  auto s = build_ratzero_structure(gwd(), 1);
  DiamondOracle oracle(gwd());
  auto f = f_diamond(f_and(f_rat(0), f_not(f_rat(0))));
  CHECK_THROWS_AS(eval(s, 0, f, oracle, RatMode::Prob), DiamondUndecided);
  // with the built structure attached as a search family, satisfiable
  // uncharacterized queries become answerable
  DiamondOracle with_search(gwd());
  with_search.add_search_structure(
      std::make_shared<EpistemicStructure>(build_ratzero_structure(gwd(), 1)));
  CHECK(with_search.query(f_rat(0)) == DiamondAnswer::Sat);
}

TEST_CASE("monotone delta for approximate belief") {
  auto g = gwd();
  auto s = build_approx_structure(g, 2, Rat(1, 16));
  DiamondOracle oracle(g);
  for (int w = 0; w < s.num_states(); ++w) {
    for (int i = 0; i < 2; ++i) {
      auto weaker = f_bd(i, Rat(1, 4), parse("play[1]=U"));
      auto stronger = f_bd(i, Rat(1, 16), parse("play[1]=U"));
      if (eval(s, w, stronger, oracle, RatMode::Prob))
        CHECK(eval(s, w, weaker, oracle, RatMode::Prob));
    }
  }
}

TEST_CASE("formula printing is faithful enough to re-parse") {
  for (const char* text :
       {"(RAT[1] & B[1](play[2]=L))", "O[1](GRATZ^1[2])", "!PB[2](true)",
        "Bd[1,1/8](play[2]=R|true)", "DIA(RATZ^2[1])", "EK^2[1]"}) {
    auto f = parse(text);
    auto printed = formula_to_string(gwd(), f);
    auto f2 = parse(printed);
    CHECK(formula_to_string(gwd(), f2) == printed);
  }
}
