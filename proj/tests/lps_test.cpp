#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "egt/lps.hpp"
#include "test_games.hpp"

using namespace egt;

namespace {

Lps three_atom() {
  // carrier {a,b,c}; levels ((1,0,0),(0,1/2,1/2))
  Lps l;
  l.carrier_size = 3;
  l.levels = {{Rat(1), Rat(0), Rat(0)}, {Rat(0), Rat(1, 2), Rat(1, 2)}};
  return l;
}

Lps random_lps(std::mt19937_64& rng) {
  Lps l;
  l.carrier_size = 2 + static_cast<int>(rng() % 4);
  int depth = 1 + static_cast<int>(rng() % 3);
  for (int h = 0; h < depth; ++h) {
    std::vector<Rat> raw(l.carrier_size);
    Rat total;
    for (auto& w : raw) {
      w = Rat(static_cast<long long>(rng() % 5));
      total += w;
    }
    if (total.is_zero()) { raw[rng() % l.carrier_size] = Rat(1); total = Rat(1); }
    for (auto& w : raw) w /= total;
    l.levels.push_back(std::move(raw));
  }
  return l;
}

std::vector<int> random_subset(std::mt19937_64& rng, int n) {
  std::vector<int> s;
  for (int a = 0; a < n; ++a)
    if (rng() % 2) s.push_back(a);
  return s;
}

}  // namespace

TEST_CASE("conditioning drops null levels and renormalizes") {
  auto l = three_atom();
  auto c = condition(l, {1, 2});
  REQUIRE(c.length() == 1);
  CHECK(c.levels[0] == std::vector<Rat>{Rat(0), Rat(1, 2), Rat(1, 2)});

  auto whole = condition(l, {0, 1, 2});
  CHECK(whole.levels == l.levels);

  auto point = condition(l, {0});
  REQUIRE(point.length() == 1);
  CHECK(point.levels[0] == std::vector<Rat>{Rat(1), Rat(0), Rat(0)});

  CHECK_THROWS_AS(condition(l, {}), std::domain_error);
}

TEST_CASE("first conditional probability") {
  auto l = three_atom();
  CHECK(first_conditional(l, {1}, {1, 2}) == Rat(1, 2));
  CHECK(first_conditional(l, {1, 2}, {1, 2}) == Rat(1));
  CHECK(first_conditional(l, {0}, {1, 2}) == Rat(0));
}

TEST_CASE("lexicographic expected utility comparison") {
  auto g = testgames::g_wd();
  auto opp = OppProfiles::enumerate_full(g, 0);
  // point mass on L, then point mass on R
  Lps l;
  l.carrier_size = 2;
  l.levels = {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
  // EU(U) = (1,1), EU(D) = (1,0)
  CHECK(lex_compare_eu(g, 0, 0, 1, opp, l) == Order::Greater);
  CHECK(lex_compare_eu(g, 0, 1, 0, opp, l) == Order::Less);
  CHECK(lex_compare_eu(g, 0, 0, 0, opp, l) == Order::Equal);
  // single level: coincides with plain expected utility
  Lps single = Lps::single({Rat(1, 2), Rat(1, 2)});
  CHECK(lex_compare_eu(g, 0, 0, 1, opp, single) == Order::Greater);
}

TEST_CASE("event domination") {
  Lps l;
  l.carrier_size = 2;
  l.levels = {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
  CHECK(dominates_event(l, {0}, {1}));
  CHECK(!dominates_event(l, {1}, {0}));
  CHECK(!dominates_event(l, {0}, {0}));
  // F never positive: min over empty set is infinity
  Lps l2;
  l2.carrier_size = 2;
  l2.levels = {{Rat(1), Rat(0)}};
  CHECK(dominates_event(l2, {0}, {1}));
  CHECK(!dominates_event(l2, {1}, {0}));
}

TEST_CASE("infinitely more likely and assumption") {
  Lps l;
  l.carrier_size = 2;
  l.levels = {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
  CHECK(infinitely_more_likely(l, {0}, {1}));
  CHECK(!infinitely_more_likely(l, {1}, {0}));
  CHECK(assumes(l, {0}));
  CHECK(!assumes(l, {1}));

  // an atom of E with all-zero mass falsifies the first clause
  Lps l3;
  l3.carrier_size = 3;
  l3.levels = {{Rat(1), Rat(0), Rat(0)}};
  CHECK(!infinitely_more_likely(l3, {0, 1}, {}));
  CHECK(infinitely_more_likely(l3, {0}, {}));
}

TEST_CASE("assumption agrees with the direct quantifier definition") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 500; ++it) {
    Lps l = random_lps(rng);
    auto e = random_subset(rng, l.carrier_size);
    std::vector<bool> in_e(l.carrier_size, false);
    for (int a : e) in_e[a] = true;
    // direct re-implementation of the quantifier definition
    bool direct = true;
    for (int w = 0; w < l.carrier_size && direct; ++w) {
      if (!in_e[w]) continue;
      int lw = l.first_positive_level({w});
      if (lw < 0) { direct = false; break; }
      for (int w2 = 0; w2 < l.carrier_size; ++w2) {
        if (in_e[w2]) continue;
        int lw2 = l.first_positive_level({w2});
        if (lw2 >= 0 && lw2 <= lw) { direct = false; break; }
      }
    }
    CHECK(assumes(l, e) == direct);
  }
}

TEST_CASE("tower property and normalization on random LPSs") {
  std::mt19937_64 rng(20240818);
  int checked = 0;
  for (int it = 0; it < 1000; ++it) {
    Lps l = random_lps(rng);
    auto u = random_subset(rng, l.carrier_size);
    auto v = random_subset(rng, l.carrier_size);
    std::vector<int> vu;
    for (int a : v)
      if (std::find(u.begin(), u.end(), a) != u.end()) vu.push_back(a);
    if (l.is_null(u)) continue;
    Lps cu = condition(l, u);
    for (const auto& level : cu.levels) {
      Rat total;
      for (const Rat& w : level) total += w;
      CHECK(total == Rat(1));
    }
    if (vu.empty() || cu.is_null(vu) || l.is_null(vu)) continue;
    CHECK(condition(cu, vu).levels == condition(l, vu).levels);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("event domination is transitive") {
  std::mt19937_64 rng(5150);
  for (int it = 0; it < 600; ++it) {
    Lps l = random_lps(rng);
    auto e = random_subset(rng, l.carrier_size);
    auto f = random_subset(rng, l.carrier_size);
    auto g = random_subset(rng, l.carrier_size);
    if (dominates_event(l, e, f) && dominates_event(l, f, g))
      CHECK(dominates_event(l, e, g));
  }
}

TEST_CASE("validate_lps flags malformed levels") {
  Lps l;
  l.carrier_size = 2;
  l.levels = {{Rat(1, 2), Rat(1, 4)}};
  CHECK(!validate_lps(l).empty());
  l.levels = {{Rat(3, 2), Rat(-1, 4)}};
  CHECK(validate_lps(l).size() == 2);
  CHECK(validate_lps(Lps::uniform(3)).empty());
}
