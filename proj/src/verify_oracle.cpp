#include "egt/verify_oracle.hpp"

#include <random>
#include <stdexcept>

namespace egt::verify {

namespace {

// Solve the square system M x = v exactly; empty result when singular.
std::optional<std::vector<Rat>> gaussian_solve(std::vector<std::vector<Rat>> M,
                                               std::vector<Rat> v) {
  const int d = static_cast<int>(v.size());
  for (int col = 0; col < d; ++col) {
    int pivot = -1;
    for (int r = col; r < d; ++r)
      if (!M[r][col].is_zero()) { pivot = r; break; }
    if (pivot < 0) return std::nullopt;
    std::swap(M[pivot], M[col]);
    std::swap(v[pivot], v[col]);
    Rat inv = Rat::one() / M[col][col];
    for (int c = col; c < d; ++c) M[col][c] *= inv;
    v[col] *= inv;
    for (int r = 0; r < d; ++r) {
      if (r == col || M[r][col].is_zero()) continue;
      Rat f = M[r][col];
      for (int c = col; c < d; ++c) M[r][c] -= f * M[col][c];
      v[r] -= f * v[col];
    }
  }
  return v;
}

}  // namespace

OracleLpResult oracle_lp(int num_vars, const std::vector<Rat>& objective,
                         const std::vector<OracleRow>& rows) {
  if (num_vars > 12)
    throw std::length_error("oracle_lp: variable guard exceeded");
  // Candidate tight rows: every constraint plus each bound x_i = 0.
  // Equalities are always tight, so they are forced into every basis.
  struct Cand { std::vector<Rat> coeff; Rat rhs; bool forced; };
  std::vector<Cand> cands;
  for (const auto& row : rows)
    cands.push_back({row.coeff, row.rhs, row.rel == 0});
  for (int i = 0; i < num_vars; ++i) {
    std::vector<Rat> coeff(num_vars);
    coeff[i] = Rat::one();
    cands.push_back({std::move(coeff), Rat::zero(), false});
  }

  OracleLpResult best;
  std::vector<int> chosen;
  auto feasible_point = [&](const std::vector<Rat>& x) {
    for (const Rat& xi : x)
      if (xi.is_negative()) return false;
    for (const auto& row : rows) {
      Rat lhs;
      for (int i = 0; i < num_vars; ++i) lhs += row.coeff[i] * x[i];
      if (row.rel < 0 && lhs > row.rhs) return false;
      if (row.rel == 0 && lhs != row.rhs) return false;
      if (row.rel > 0 && lhs < row.rhs) return false;
    }
    return true;
  };
  auto try_basis = [&]() {
    std::vector<std::vector<Rat>> M;
    std::vector<Rat> v;
    for (int idx : chosen) {
      M.push_back(cands[idx].coeff);
      v.push_back(cands[idx].rhs);
    }
    auto x = gaussian_solve(std::move(M), std::move(v));
    if (!x || !feasible_point(*x)) return;
    Rat obj;
    for (int i = 0; i < num_vars; ++i) obj += objective[i] * (*x)[i];
    if (!best.feasible || obj > best.objective) {
      best.feasible = true;
      best.objective = obj;
      best.x = *x;
    }
  };
  // Depth-first choice of num_vars tight candidates including all forced ones.
  int forced = 0;
  for (std::size_t i = 0; i < cands.size(); ++i)
    if (cands[i].forced) { chosen.push_back(static_cast<int>(i)); ++forced; }
  if (forced > num_vars) return best;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (static_cast<int>(chosen.size()) == num_vars) {
      try_basis();
      return;
    }
    for (std::size_t i = from; i < cands.size(); ++i) {
      if (cands[i].forced) continue;
      chosen.push_back(static_cast<int>(i));
      self(self, i + 1);
      chosen.pop_back();
    }
  };
  rec(rec, 0);
  return best;
}

OracleDomination oracle_dominated(const NormalFormGame& g, int player,
                                  int strat, const std::vector<int>& base,
                                  const OppProfiles& opp, bool weak) {
  const int nb = static_cast<int>(base.size());
  OracleDomination out;
  // adv(y, tau) = sum_s y_s (u(s,tau) - u(strat,tau))
  auto adv_row = [&](const Profile& tau) {
    std::vector<Rat> row(nb);
    Rat us = g.payoff(player, combine(tau, player, strat));
    for (int s = 0; s < nb; ++s)
      row[s] = g.payoff(player, combine(tau, player, base[s])) - us;
    return row;
  };
  std::vector<OracleRow> rows;
  std::vector<Rat> ones(nb, Rat::one());
  if (weak) {
    // y >= 0, sum y = 1, adv >= 0 everywhere; maximize total advantage.
    rows.push_back({ones, 0, Rat::one()});
    std::vector<Rat> objective(nb);
    for (int k = 0; k < opp.size(); ++k) {
      auto row = adv_row(opp.items[k]);
      for (int s = 0; s < nb; ++s) objective[s] += row[s];
      rows.push_back({std::move(row), +1, Rat::zero()});
    }
    auto res = oracle_lp(nb, objective, rows);
    if (res.feasible && res.objective.is_positive()) {
      out.dominated = true;
      out.mixture = res.x;
      out.margin = res.objective;
    }
    return out;
  }
  // Strict: shifted margin m' = min advantage + 2 (keeps the region bounded).
  const int d = nb + 1;
  std::vector<Rat> sum_row(ones);
  sum_row.push_back(Rat::zero());
  rows.push_back({std::move(sum_row), 0, Rat::one()});
  for (int k = 0; k < opp.size(); ++k) {
    auto row = adv_row(opp.items[k]);
    row.push_back(Rat(-1));
    rows.push_back({std::move(row), +1, Rat(-2)});
  }
  std::vector<Rat> cap(nb, Rat::zero());
  cap.push_back(Rat::one());
  rows.push_back({std::move(cap), -1, Rat(3)});
  std::vector<Rat> objective(nb, Rat::zero());
  objective.push_back(Rat::one());
  auto res = oracle_lp(d, objective, rows);
  if (res.feasible && res.objective > Rat(2)) {
    out.dominated = true;
    out.mixture.assign(res.x.begin(), res.x.begin() + nb);
    out.margin = res.objective - Rat(2);
  }
  return out;
}

BruteTrace brute_force_survivors(const NormalFormGame& g, DeletionMode mode,
                                 long long guard) {
  if (g.num_profiles() > guard)
    throw std::length_error("brute_force_survivors: size guard exceeded");
  BruteTrace trace;
  trace.rounds.push_back(g.full_sets());
  std::vector<int> all;
  for (int k = 0; k < g.num_strategies(0); ++k) all.push_back(k);
  while (true) {
    const StrategySets& cur = trace.rounds.back();
    StrategySets next(g.num_players());
    bool changed = false;
    for (int p = 0; p < g.num_players(); ++p) {
      OppProfiles opp = OppProfiles::enumerate(g, p, cur);
      std::vector<int> base;
      for (int k = 0; k < g.num_strategies(p); ++k) base.push_back(k);
      for (int s : cur[p]) {
        auto dom = oracle_dominated(g, p, s, base, opp,
                                    mode == DeletionMode::Weak);
        if (dom.dominated)
          changed = true;
        else
          next[p].push_back(s);
      }
    }
    if (!changed) break;
    trace.rounds.push_back(std::move(next));
  }
  trace.fixpoint_round = static_cast<int>(trace.rounds.size()) - 1;
  return trace;
}

NormalFormGame random_game(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  NormalFormGame g;
  int n = 2 + static_cast<int>(rng() % 2);
  int total = 1;
  for (int p = 0; p < n; ++p) {
    g.players.push_back(std::to_string(p + 1));
    int cnt = 2 + static_cast<int>(rng() % 3);
    total *= cnt;
    std::vector<std::string> labels;
    for (int k = 0; k < cnt; ++k)
      labels.push_back(std::string(1, static_cast<char>('a' + k)) +
                       std::to_string(p + 1));
    g.strategies.push_back(std::move(labels));
  }
  g.payoffs.assign(total, std::vector<Rat>(n));
  for (int idx = 0; idx < total; ++idx)
    for (int p = 0; p < n; ++p)
      g.payoffs[idx][p] = Rat(static_cast<long long>(rng() % 9), 8);
  return g;
}

}  // namespace egt::verify
