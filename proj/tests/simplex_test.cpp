#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "egt/simplex.hpp"
#include "egt/verify_oracle.hpp"

using namespace egt;

TEST_CASE("textbook maximum") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2,6)
  LinearProgram lp;
  lp.num_vars = 2;
  lp.objective = {Rat(3), Rat(5)};
  lp.add_row({Rat(1), Rat(0)}, Rel::Le, Rat(4));
  lp.add_row({Rat(0), Rat(2)}, Rel::Le, Rat(12));
  lp.add_row({Rat(3), Rat(2)}, Rel::Le, Rat(18));
  auto res = solve_lp(lp);
  REQUIRE(res.status == LpStatus::Optimal);
  CHECK(res.objective == Rat(36));
  CHECK(res.x[0] == Rat(2));
  CHECK(res.x[1] == Rat(6));
}

TEST_CASE("equality and >= rows need phase one") {
  // max x + y, x + y = 1, x >= 1/3 -> 1, attainable
  LinearProgram lp;
  lp.num_vars = 2;
  lp.objective = {Rat(1), Rat(1)};
  lp.add_row({Rat(1), Rat(1)}, Rel::Eq, Rat(1));
  lp.add_row({Rat(1), Rat(0)}, Rel::Ge, Rat(1, 3));
  auto res = solve_lp(lp);
  REQUIRE(res.status == LpStatus::Optimal);
  CHECK(res.objective == Rat(1));
}

TEST_CASE("infeasible system detected") {
  LinearProgram lp;
  lp.num_vars = 1;
  lp.objective = {Rat(1)};
  lp.add_row({Rat(1)}, Rel::Ge, Rat(2));
  lp.add_row({Rat(1)}, Rel::Le, Rat(1));
  CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("unbounded detected") {
  LinearProgram lp;
  lp.num_vars = 1;
  lp.objective = {Rat(1)};
  lp.add_row({Rat(-1)}, Rel::Le, Rat(0));
  CHECK(solve_lp(lp).status == LpStatus::Unbounded);
}

TEST_CASE("degenerate pivoting terminates (Bland)") {
  LinearProgram lp;
  lp.num_vars = 3;
  lp.objective = {Rat(3, 4), Rat(-150), Rat(1, 50)};
  lp.add_row({Rat(1, 4), Rat(-60), Rat(-1, 25)}, Rel::Le, Rat(0));
  lp.add_row({Rat(1, 2), Rat(-90), Rat(-1, 50)}, Rel::Le, Rat(0));
  lp.add_row({Rat(0), Rat(0), Rat(1)}, Rel::Le, Rat(1));
  auto res = solve_lp(lp);
  REQUIRE(res.status == LpStatus::Optimal);
  CHECK(res.objective == Rat(1, 20));
}

TEST_CASE("simplex agrees with the vertex-enumeration oracle") {
  std::mt19937_64 rng(99);
  auto rnd = [&] { return Rat(static_cast<long long>(rng() % 17) - 8, 4); };
  for (int it = 0; it < 150; ++it) {
    int n = 2 + static_cast<int>(rng() % 3);
    int m = 1 + static_cast<int>(rng() % 4);
    LinearProgram lp;
    lp.num_vars = n;
    for (int i = 0; i < n; ++i) lp.objective.push_back(rnd());
    // Keep the region bounded: simplex constraint plus random rows.
    lp.add_row(std::vector<Rat>(n, Rat::one()), Rel::Eq, Rat::one());
    std::vector<verify::OracleRow> orows;
    orows.push_back({std::vector<Rat>(n, Rat::one()), 0, Rat::one()});
    for (int r = 0; r < m; ++r) {
      std::vector<Rat> coeff;
      for (int i = 0; i < n; ++i) coeff.push_back(rnd());
      Rat rhs = rnd();
      int rel = static_cast<int>(rng() % 2) == 0 ? -1 : +1;
      lp.add_row(coeff, rel < 0 ? Rel::Le : Rel::Ge, rhs);
      orows.push_back({coeff, rel, rhs});
    }
    auto a = solve_lp(lp);
    auto b = verify::oracle_lp(n, lp.objective, orows);
    if (a.status == LpStatus::Optimal) {
      REQUIRE(b.feasible);
      CHECK(a.objective == b.objective);
    } else {
      CHECK(!b.feasible);
    }
  }
}
