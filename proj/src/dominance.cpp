#include "egt/dominance.hpp"

#include <stdexcept>

#include "egt/simplex.hpp"
#include "json.hpp"

namespace egt {

namespace {

std::vector<Rat> advantage_row(const NormalFormGame& g, int player, int strat,
                               const std::vector<int>& base,
                               const Profile& tau) {
  std::vector<Rat> row(base.size());
  Rat us = g.payoff(player, combine(tau, player, strat));
  for (std::size_t s = 0; s < base.size(); ++s)
    row[s] = g.payoff(player, combine(tau, player, base[s])) - us;
  return row;
}

std::vector<int> all_strategies(const NormalFormGame& g, int player) {
  std::vector<int> v;
  for (int k = 0; k < g.num_strategies(player); ++k) v.push_back(k);
  return v;
}

}  // namespace

std::optional<MixedStrategy> dominated_by_mixed(
    const NormalFormGame& g, int player, int strat, const OppProfiles& opp,
    DomMode mode, const std::vector<int>& base) {
  if (opp.size() == 0) throw std::invalid_argument("empty restriction set");
  const int nb = static_cast<int>(base.size());
  LinearProgram lp;
  std::vector<Rat> ones(nb, Rat::one());

  if (mode == DomMode::Weak) {
    // y in the simplex, adv(y,tau) >= 0 for all tau, maximize total advantage.
    lp.num_vars = nb;
    lp.objective.assign(nb, Rat::zero());
    lp.add_row(ones, Rel::Eq, Rat::one());
    for (int k = 0; k < opp.size(); ++k) {
      auto row = advantage_row(g, player, strat, base, opp.items[k]);
      for (int s = 0; s < nb; ++s) lp.objective[s] += row[s];
      lp.add_row(std::move(row), Rel::Ge, Rat::zero());
    }
    auto res = solve_lp(lp);
    if (res.status != LpStatus::Optimal || !res.objective.is_positive())
      return std::nullopt;
    return MixedStrategy{player, [&] {
                           std::vector<Rat> w(g.num_strategies(player));
                           for (int s = 0; s < nb; ++s) w[base[s]] = res.x[s];
                           return w;
                         }()};
  }

  // Strict: maximize the worst-case advantage, shifted to stay nonnegative.
  lp.num_vars = nb + 1;
  lp.objective.assign(nb + 1, Rat::zero());
  lp.objective[nb] = Rat::one();
  {
    std::vector<Rat> row(ones);
    row.push_back(Rat::zero());
    lp.add_row(std::move(row), Rel::Eq, Rat::one());
  }
  for (int k = 0; k < opp.size(); ++k) {
    auto row = advantage_row(g, player, strat, base, opp.items[k]);
    row.push_back(Rat(-1));
    lp.add_row(std::move(row), Rel::Ge, Rat(-2));
  }
  auto res = solve_lp(lp);
  if (res.status != LpStatus::Optimal || res.objective <= Rat(2))
    return std::nullopt;
  std::vector<Rat> w(g.num_strategies(player));
  for (int s = 0; s < nb; ++s) w[base[s]] = res.x[s];
  return MixedStrategy{player, std::move(w)};
}

std::optional<MixedStrategy> dominated_by_mixed(const NormalFormGame& g,
                                                int player, int strat,
                                                const OppProfiles& opp,
                                                DomMode mode) {
  return dominated_by_mixed(g, player, strat, opp, mode,
                            all_strategies(g, player));
}

namespace {

LinearProgram maxmin_witness_lp(const NormalFormGame& g, int player, int strat,
                                const OppProfiles& opp) {
  const int m = opp.size();
  LinearProgram lp;
  lp.num_vars = m + 1;
  lp.objective.assign(m + 1, Rat::zero());
  lp.objective[m] = Rat::one();
  {
    std::vector<Rat> ones(m, Rat::one());
    ones.push_back(Rat::zero());
    lp.add_row(std::move(ones), Rel::Eq, Rat::one());
  }
  for (int s = 0; s < g.num_strategies(player); ++s) {
    if (s == strat) continue;
    std::vector<Rat> row(m + 1);
    for (int k = 0; k < m; ++k) {
      const Profile& tau = opp.items[k];
      row[k] = g.payoff(player, combine(tau, player, strat)) -
               g.payoff(player, combine(tau, player, s));
    }
    lp.add_row(std::move(row), Rel::Ge, Rat::zero());
  }
  for (int k = 0; k < m; ++k) {
    std::vector<Rat> r(m + 1);
    r[k] = Rat::one();
    r[m] = Rat(-1);
    lp.add_row(std::move(r), Rel::Ge, Rat::zero());
  }
  return lp;
}

}  // namespace

bool best_response_witness_exists(const NormalFormGame& g, int player,
                                  int strat, const OppProfiles& opp,
                                  SupportMode support) {
  if (opp.size() == 0) throw std::invalid_argument("empty restriction set");
  auto res = solve_lp(maxmin_witness_lp(g, player, strat, opp));
  if (res.status != LpStatus::Optimal) return false;
  return support == SupportMode::Any || res.objective.is_positive();
}

std::optional<Belief> best_response_witness(const NormalFormGame& g,
                                            int player, int strat,
                                            const OppProfiles& opp,
                                            SupportMode support) {
  if (opp.size() == 0) throw std::invalid_argument("empty restriction set");
  const int m = opp.size();

  // Best-response rows: sum_tau x_tau * (u(strat,tau) - u(s,tau)) >= 0.
  std::vector<LpRow> br_rows;
  for (int s = 0; s < g.num_strategies(player); ++s) {
    if (s == strat) continue;
    std::vector<Rat> row(m);
    for (int k = 0; k < m; ++k) {
      const Profile& tau = opp.items[k];
      row[k] = g.payoff(player, combine(tau, player, strat)) -
               g.payoff(player, combine(tau, player, s));
    }
    br_rows.push_back({std::move(row), Rel::Ge, Rat::zero()});
  }

  // Stage 1: maximize the minimum weight w (variables x_0..x_{m-1}, w).
  LinearProgram lp;
  lp.num_vars = m + 1;
  lp.objective.assign(m + 1, Rat::zero());
  lp.objective[m] = Rat::one();
  {
    std::vector<Rat> ones(m, Rat::one());
    ones.push_back(Rat::zero());
    lp.add_row(std::move(ones), Rel::Eq, Rat::one());
  }
  for (const auto& row : br_rows) {
    auto r = row.coeff;
    r.push_back(Rat::zero());
    lp.add_row(std::move(r), Rel::Ge, Rat::zero());
  }
  for (int k = 0; k < m; ++k) {
    std::vector<Rat> r(m + 1);
    r[k] = Rat::one();
    r[m] = Rat(-1);
    lp.add_row(std::move(r), Rel::Ge, Rat::zero());
  }
  auto stage1 = solve_lp(lp);
  if (stage1.status != LpStatus::Optimal) return std::nullopt;
  Rat w = stage1.objective;
  if (support == SupportMode::Full && !w.is_positive()) return std::nullopt;

  // Stage 2: lexicographic refinement in profile order, keeping w fixed.
  LinearProgram ref;
  ref.num_vars = m;
  ref.objective.assign(m, Rat::zero());
  {
    std::vector<Rat> ones(m, Rat::one());
    ref.add_row(std::move(ones), Rel::Eq, Rat::one());
  }
  for (const auto& row : br_rows) ref.rows.push_back(row);
  for (int k = 0; k < m; ++k) {
    std::vector<Rat> r(m);
    r[k] = Rat::one();
    ref.add_row(std::move(r), Rel::Ge, w);
  }
  std::vector<Rat> x(m);
  for (int k = 0; k < m; ++k) {
    ref.objective.assign(m, Rat::zero());
    ref.objective[k] = Rat::one();
    auto res = solve_lp(ref);
    if (res.status != LpStatus::Optimal)
      throw std::logic_error("witness refinement lost feasibility");
    x[k] = res.objective;
    std::vector<Rat> pin(m);
    pin[k] = Rat::one();
    ref.add_row(std::move(pin), Rel::Eq, x[k]);
  }
  Belief b;
  b.owner = player;
  b.support = opp;
  b.weights = std::move(x);
  return b;
}

const StrategySets& DeletionTrace::at_round(int k) const {
  if (k < 0) k = 0;
  std::size_t idx = std::min<std::size_t>(k, rounds.size() - 1);
  return rounds[idx];
}

bool DeletionTrace::survives(int player, int strat, int k) const {
  const auto& sets = at_round(k);
  for (int s : sets[player])
    if (s == strat) return true;
  return false;
}

DeletionTrace iterate_deletion(const NormalFormGame& g, DomMode mode,
                               MixtureBase base) {
  DeletionTrace trace;
  trace.mode = mode;
  trace.rounds.push_back(g.full_sets());
  trace.witnesses.resize(g.num_players());
  int round = 1;
  while (true) {
    const StrategySets& cur = trace.rounds.back();
    StrategySets next(g.num_players());
    bool changed = false;
    for (int p = 0; p < g.num_players(); ++p) {
      OppProfiles opp = OppProfiles::enumerate(g, p, cur);
      std::vector<int> mix_base = base == MixtureBase::FullSigma
                                      ? all_strategies(g, p)
                                      : cur[p];
      for (int s : cur[p]) {
        auto dom = dominated_by_mixed(g, p, s, opp, mode, mix_base);
        if (dom) {
          changed = true;
          trace.witnesses[p][s] = {round, std::move(*dom)};
        } else {
          next[p].push_back(s);
        }
      }
    }
    if (!changed) break;
    trace.rounds.push_back(std::move(next));
    ++round;
  }
  trace.fixpoint_round = static_cast<int>(trace.rounds.size()) - 1;
  return trace;
}

GapReport compute_gap(const NormalFormGame& g) {
  GapReport report;
  DeletionTrace trace = iterate_deletion(g, DomMode::Weak);
  for (int p = 0; p < g.num_players(); ++p) {
    for (const auto& [strat, wit] : trace.witnesses[p]) {
      const StrategySets& prev = trace.at_round(wit.round - 1);
      OppProfiles opp = OppProfiles::enumerate(g, p, prev);
      std::vector<int> base = [&] {
        std::vector<int> v;
        for (int k = 0; k < g.num_strategies(p); ++k) v.push_back(k);
        return v;
      }();
      const int nb = static_cast<int>(base.size());
      Rat margin;
      bool have = false;
      // One LP per candidate profile: maximize the advantage there subject
      // to weak dominance over the whole previous-round set.
      for (int k = 0; k < opp.size(); ++k) {
        LinearProgram lp;
        lp.num_vars = nb;
        lp.objective = advantage_row(g, p, strat, base, opp.items[k]);
        lp.add_row(std::vector<Rat>(nb, Rat::one()), Rel::Eq, Rat::one());
        for (int k2 = 0; k2 < opp.size(); ++k2)
          lp.add_row(advantage_row(g, p, strat, base, opp.items[k2]), Rel::Ge,
                     Rat::zero());
        auto res = solve_lp(lp);
        if (res.status != LpStatus::Optimal) continue;
        if (!have || res.objective > margin) {
          margin = res.objective;
          have = true;
        }
      }
      report.per_deletion_margins[{p, strat, wit.round}] = margin;
      if (!report.gap || margin < *report.gap) report.gap = margin;
    }
  }
  return report;
}

Epsilon0Report compute_epsilon0(const NormalFormGame& g, int k) {
  if (k < 1) throw std::invalid_argument("compute_epsilon0: k must be >= 1");
  Epsilon0Report report;
  report.epsilon0 = Rat::one();
  DeletionTrace trace = iterate_deletion(g, DomMode::Weak);
  for (int round = 1; round <= k; ++round) {
    const StrategySets& prev = trace.at_round(round - 1);
    const StrategySets& cur = trace.at_round(round);
    for (int p = 0; p < g.num_players(); ++p) {
      OppProfiles opp = OppProfiles::enumerate(g, p, prev);
      for (int s : cur[p]) {
        auto wit = best_response_witness(g, p, s, opp, SupportMode::Full);
        if (!wit)
          throw std::logic_error("survivor lost its Pearce witness");
        for (const Rat& weight : wit->weights)
          if (weight.is_positive() && weight < report.epsilon0)
            report.epsilon0 = weight;
        report.witness_beliefs[{round, p, s}] = std::move(*wit);
      }
    }
  }
  return report;
}

std::string trace_to_json_text(const NormalFormGame& g,
                               const DeletionTrace& trace) {
  nlohmann::json doc;
  doc["mode"] = trace.mode == DomMode::Weak ? "weak" : "strict";
  doc["fixpoint_round"] = trace.fixpoint_round;
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& sets : trace.rounds) {
    nlohmann::json row = nlohmann::json::object();
    for (int p = 0; p < g.num_players(); ++p) {
      nlohmann::json labels = nlohmann::json::array();
      for (int s : sets[p]) labels.push_back(g.strategies[p][s]);
      row[g.players[p]] = labels;
    }
    rounds.push_back(row);
  }
  doc["rounds"] = rounds;
  nlohmann::json wits = nlohmann::json::array();
  for (int p = 0; p < g.num_players(); ++p) {
    for (const auto& [strat, wit] : trace.witnesses[p]) {
      nlohmann::json entry;
      entry["player"] = g.players[p];
      entry["strategy"] = g.strategies[p][strat];
      entry["round"] = wit.round;
      nlohmann::json mix = nlohmann::json::object();
      for (int s = 0; s < g.num_strategies(p); ++s)
        if (!wit.dominator.weights[s].is_zero())
          mix[g.strategies[p][s]] = wit.dominator.weights[s].str();
      entry["mixture"] = mix;
      wits.push_back(entry);
    }
  }
  doc["witnesses"] = wits;
  return doc.dump(2) + "\n";
}

}  // namespace egt
