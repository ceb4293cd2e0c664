#ifndef EGT_TESTS_TEST_GAMES_HPP
#define EGT_TESTS_TEST_GAMES_HPP

#include "egt/game.hpp"

namespace egt::testgames {

// Two-player game where D is weakly (not strictly) dominated, then R falls.
// Row {U,D} x Col {L,R}; row: UL=1 UR=1 DL=1 DR=0; col: UL=1 UR=0 DL=0 DR=1.
inline NormalFormGame g_wd() {
  NormalFormGame g;
  g.players = {"1", "2"};
  g.strategies = {{"U", "D"}, {"L", "R"}};
  auto r = [](long long n, long long d = 1) { return Rat(n, d); };
  // profile order: (U,L), (U,R), (D,L), (D,R)
  g.payoffs = {
      {r(1), r(1)},
      {r(1), r(0)},
      {r(1), r(0)},
      {r(0), r(1)},
  };
  return g;
}

// Matching pennies with win = 1, lose = 0.
inline NormalFormGame g_mp() {
  NormalFormGame g;
  g.players = {"1", "2"};
  g.strategies = {{"H", "T"}, {"h", "t"}};
  auto r = [](long long n) { return Rat(n); };
  g.payoffs = {
      {r(1), r(0)},  // (H,h)
      {r(0), r(1)},  // (H,t)
      {r(0), r(1)},  // (T,h)
      {r(1), r(0)},  // (T,t)
  };
  return g;
}

// Same as g_wd with all payoffs halved (range [0,1/2]).
inline NormalFormGame g_wd_halved() {
  NormalFormGame g = g_wd();
  for (auto& row : g.payoffs)
    for (auto& u : row) u *= Rat(1, 2);
  return g;
}

}  // namespace egt::testgames

#endif
