#include "egt/verify.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>
#include <functional>
#include <random>
#include <sstream>

#include "json.hpp"

namespace egt::verify {

bool VerificationReport::all_pass() const {
  for (const auto& c : claims)
    if (!c.pass) return false;
  return true;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Timer {
  Clock::time_point start = Clock::now();
  double seconds() const {
    return std::chrono::duration<double>(Clock::now() - start).count();
  }
};

void add_claim(VerificationReport& r, const std::string& name, bool pass,
               const std::string& counterexample = "") {
  r.claims.push_back({name, pass, false, pass ? "" : counterexample});
}

void add_inconclusive(VerificationReport& r, const std::string& name,
                      const std::string& why) {
  r.claims.push_back({name, false, true, why});
}

}  // namespace

EpistemicStructure mutate_structure(const EpistemicStructure& s,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 12345);
  EpistemicStructure out = s;
  int edits = 1 + static_cast<int>(rng() % 3);
  for (int e = 0; e < edits; ++e) {
    int p = static_cast<int>(rng() % out.num_players());
    int w = static_cast<int>(rng() % out.num_states());
    Lps& lps = out.beliefs[p][w];
    int kind = static_cast<int>(rng() % 3);
    if (kind == 0 && lps.length() > 1) {
      int a = static_cast<int>(rng() % lps.length());
      int b = static_cast<int>(rng() % lps.length());
      std::swap(lps.levels[a], lps.levels[b]);
      continue;
    }
    // Move half of one atom's mass to another atom at a random level.
    int h = static_cast<int>(rng() % lps.length());
    std::vector<int> support;
    for (int a = 0; a < lps.carrier_size; ++a)
      if (lps.levels[h][a].is_positive()) support.push_back(a);
    if (support.empty()) continue;
    int from = support[rng() % support.size()];
    int to = static_cast<int>(rng() % lps.carrier_size);
    Rat moved = lps.levels[h][from] / Rat(2);
    lps.levels[h][from] -= moved;
    lps.levels[h][to] += moved;
  }
  return out;
}

namespace {

// ---------------------------------------------------------------------
// Normal-form theorem checks

struct NormalContext {
  const NormalFormGame& g;
  DeletionTrace weak;
  DeletionTrace strict;
  DiamondOracle oracle;

  explicit NormalContext(const NormalFormGame& game)
      : g(game),
        weak(iterate_deletion(game, DomMode::Weak)),
        strict(iterate_deletion(game, DomMode::Strict)),
        oracle(game) {}
};

std::string state_note(const EpistemicStructure& s, int w) {
  return "state " + s.state_labels[w];
}

// membership <=> formula at a state of the structure, plus a battery of
// mutated structures for the formula => membership direction.
void check_biconditional(VerificationReport& r, NormalContext& ctx,
                         const EpistemicStructure& built, EvalSession& session,
                         RatMode mode, const std::string& family,
                         const std::function<FormulaPtr(int k, int i)>& make,
                         const std::function<bool(int i, int strat, int k)>&
                             survives,
                         int kmax, int mutations) {
  // membership => formula somewhere in the built structure
  for (int i = 0; i < ctx.g.num_players(); ++i) {
    for (int strat = 0; strat < ctx.g.num_strategies(i); ++strat) {
      for (int k = 0; k <= kmax; ++k) {
        bool member = survives(i, strat, k);
        bool found = false;
        std::string err;
        for (int w = 0; w < built.num_states() && !found; ++w) {
          if (built.strat[w][i] != strat) continue;
          try {
            found = session.ev(w, make(k, i));
          } catch (const DiamondUndecided& ex) {
            err = ex.what();
            break;
          }
        }
        if (!err.empty()) {
          add_inconclusive(r, family + " membership=>formula", err);
          return;
        }
        if (member && !found) {
          add_claim(r, family + " membership=>formula", false,
                    family + "^" + std::to_string(k) + " unsatisfied for " +
                        ctx.g.players[i] + ":" + ctx.g.strategies[i][strat]);
          return;
        }
        if (!member && found) {
          add_claim(r, family + " formula=>membership", false,
                    family + "^" + std::to_string(k) + " held for deleted " +
                        ctx.g.players[i] + ":" + ctx.g.strategies[i][strat]);
          return;
        }
      }
    }
  }
  add_claim(r, family + " membership=>formula", true);

  // formula => membership on mutated structures
  for (int mi = 0; mi < mutations; ++mi) {
    EpistemicStructure mut = mutate_structure(built, 1000 + mi);
    EvalSession mses(mut, ctx.oracle, mode);
    for (int w = 0; w < mut.num_states(); ++w) {
      for (int i = 0; i < ctx.g.num_players(); ++i) {
        for (int k = 1; k <= kmax; ++k) {
          bool holds;
          try {
            holds = mses.ev(w, make(k, i));
          } catch (const DiamondUndecided&) {
            continue;
          }
          if (holds && !survives(i, mut.strat[w][i], k)) {
            add_claim(r, family + " formula=>membership (mutations)", false,
                      "mutation " + std::to_string(mi) + " " +
                          state_note(mut, w) + " player " + ctx.g.players[i]);
            return;
          }
        }
      }
    }
  }
  add_claim(r, family + " formula=>membership (mutations)", true);
}

void per_state_claims(VerificationReport& r, NormalContext& ctx,
                      const EpistemicStructure& built, EvalSession& session,
                      const std::string& family,
                      const std::function<FormulaPtr(int k, int i)>& make) {
  for (int w = 0; w < built.num_states(); ++w) {
    BuiltStateInfo info = built_state_info(built, w);
    for (int j = 0; j < ctx.g.num_players(); ++j) {
      if (j == info.mid_player) continue;
      bool ok;
      try {
        ok = session.ev(w, make(info.level, j));
      } catch (const DiamondUndecided& ex) {
        add_inconclusive(r, family + " per-state claims", ex.what());
        return;
      }
      if (!ok) {
        add_claim(r, family + " per-state claims", false,
                  state_note(built, w) + " player " + ctx.g.players[j]);
        return;
      }
    }
  }
  add_claim(r, family + " per-state claims", true);
}

void appropriateness_claim(VerificationReport& r,
                           const EpistemicStructure& built,
                           const std::string& name, bool allow_cond4) {
  auto violations = check_appropriate(built);
  std::string detail;
  bool ok = true;
  for (const auto& v : violations) {
    if (allow_cond4 && v.condition == 4) continue;
    ok = false;
    detail = "condition " + std::to_string(v.condition) + " at " +
             built.state_labels[v.state] + ": " + v.detail;
    break;
  }
  add_claim(r, name, ok, detail);
}

// charsd needs a structure whose beliefs are strict-iteration witnesses;
// assembled here from public pieces with the same condition-4 completion as
// the weak tower.
EpistemicStructure build_strict_tower(const NormalFormGame& g, int k) {
  DeletionTrace strict = iterate_deletion(g, DomMode::Strict);
  EpistemicStructure s;
  s.game = g;
  s.kind = "ratk";
  s.bound = k;

  std::vector<std::vector<Profile>> level_profiles;
  std::vector<int> offset;
  int total = 0;
  for (int h = 0; h <= k; ++h) {
    const StrategySets& sets = strict.at_round(h);
    std::vector<Profile> profs;
    Profile cur(g.num_players());
    std::vector<std::size_t> pos(g.num_players(), 0);
    while (true) {
      for (int p = 0; p < g.num_players(); ++p) cur[p] = sets[p][pos[p]];
      profs.push_back(cur);
      int p = g.num_players() - 1;
      while (p >= 0 && ++pos[p] == sets[p].size()) pos[p--] = 0;
      if (p < 0) break;
    }
    offset.push_back(total);
    total += g.num_players() * static_cast<int>(profs.size());
    level_profiles.push_back(std::move(profs));
  }
  auto state_of = [&](int h, int mid, const Profile& prof) {
    const auto& profs = level_profiles[h];
    for (std::size_t q = 0; q < profs.size(); ++q)
      if (profs[q] == prof)
        return offset[h] + mid * static_cast<int>(profs.size()) +
               static_cast<int>(q);
    throw std::logic_error("strict tower: missing profile");
  };
  for (int h = 0; h <= k; ++h)
    for (int mid = 0; mid < g.num_players(); ++mid)
      for (const Profile& prof : level_profiles[h]) {
        s.state_labels.push_back(built_state_label(g, h, mid, prof));
        s.strat.push_back(prof);
      }
  s.beliefs.assign(g.num_players(), std::vector<Lps>(total));

  std::map<std::tuple<int, int, int>, Belief> cache;
  auto witness = [&](int j, int strat, int h) -> const Belief& {
    int eff = std::min(h, strict.fixpoint_round + 1);
    auto key = std::make_tuple(j, strat, eff);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    OppProfiles opp = OppProfiles::enumerate(g, j, strict.at_round(eff - 1));
    auto wit = best_response_witness(g, j, strat, opp, SupportMode::Any);
    if (!wit) throw std::logic_error("strict survivor lost its witness");
    return cache.emplace(key, std::move(*wit)).first->second;
  };
  auto tower_level = [&](int j, int strat, int h) {
    std::vector<Rat> level(total, Rat::zero());
    const Belief& w = witness(j, strat, h);
    for (int q = 0; q < w.support.size(); ++q) {
      if (w.weights[q].is_zero()) continue;
      level[state_of(h - 1, j, combine(w.support.items[q], j, strat))] =
          w.weights[q];
    }
    return level;
  };
  auto point = [&](int j, int strat, bool own_mid) {
    Profile prof(g.num_players());
    for (int p = 0; p < g.num_players(); ++p)
      prof[p] = strict.at_round(0)[p][0];
    prof[j] = strat;
    std::vector<Rat> level(total, Rat::zero());
    level[state_of(0, own_mid ? j : (j == 0 ? 1 : 0), prof)] = Rat::one();
    return level;
  };
  for (int h = 0; h <= k; ++h) {
    for (int mid = 0; mid < g.num_players(); ++mid) {
      for (const Profile& prof : level_profiles[h]) {
        int w = state_of(h, mid, prof);
        for (int j = 0; j < g.num_players(); ++j) {
          int strat = prof[j];
          std::vector<Rat> level;
          if (h >= 1) {
            if (mid == j && strict.survives(j, strat, h + 1))
              level = tower_level(j, strat, h + 1);
            else
              level = tower_level(j, strat, h);
          } else if (strict.survives(j, strat, 1)) {
            level = tower_level(j, strat, 1);
          } else {
            level = point(j, strat, mid == j);
          }
          Lps lps;
          lps.carrier_size = total;
          lps.levels.push_back(std::move(level));
          s.beliefs[j][w] = std::move(lps);
        }
      }
    }
  }
  return s;
}

void verify_charwd(VerificationReport& r, NormalContext& ctx, int k,
                   int mutations) {
  EpistemicStructure built = build_ratzero_structure(ctx.g, k);
  appropriateness_claim(r, built, "ratzero structure appropriate", false);
  auto make = [](int kk, int i) {
    return f_macro(MacroKind::RatZero, kk, i);
  };
  EvalSession session(built, ctx.oracle, RatMode::Prob);
  per_state_claims(r, ctx, built, session, "RATzero", make);
  check_biconditional(
      r, ctx, built, session, RatMode::Prob, "RATzero", make,
      [&](int i, int strat, int kk) { return ctx.weak.survives(i, strat, kk); },
      k, mutations);
}

void verify_charwdg(VerificationReport& r, NormalContext& ctx, int k,
                    int mutations) {
  EpistemicStructure built = build_grat_structure(ctx.g, k);
  appropriateness_claim(r, built, "grat structure appropriate", false);
  auto make = [](int kk, int i) {
    return f_macro(MacroKind::GratZero, kk, i);
  };
  EvalSession session(built, ctx.oracle, RatMode::Lex);
  per_state_claims(r, ctx, built, session, "GRATzero", make);
  check_biconditional(
      r, ctx, built, session, RatMode::Lex, "GRATzero", make,
      [&](int i, int strat, int kk) { return ctx.weak.survives(i, strat, kk); },
      k, mutations);
}

void verify_charwdg1(VerificationReport& r, NormalContext& ctx, int k,
                     int mutations) {
  GapReport gap = compute_gap(ctx.g);
  Rat eps0 = compute_epsilon0(ctx.g, std::max(1, k)).epsilon0;
  Rat eps = min(eps0, Rat(1, 4));
  Rat delta = (gap.gap ? *gap.gap : Rat(1)) * eps / Rat(4);
  EpistemicStructure built = build_approx_structure(ctx.g, k, delta);
  appropriateness_claim(r, built, "approx structure conditions 1-2", true);
  auto make = [&](int kk, int i) {
    return f_macro(MacroKind::GratApprox, kk, i, false, delta, eps);
  };
  EvalSession session(built, ctx.oracle, RatMode::Prob);
  per_state_claims(r, ctx, built, session, "GRATapprox", make);
  check_biconditional(
      r, ctx, built, session, RatMode::Prob, "GRATapprox", make,
      [&](int i, int strat, int kk) { return ctx.weak.survives(i, strat, kk); },
      k, mutations);
}

void verify_charsd(VerificationReport& r, NormalContext& ctx, int k,
                   int mutations) {
  EpistemicStructure built = build_strict_tower(ctx.g, k);
  appropriateness_claim(r, built, "strict tower appropriate", false);
  auto make = [](int kk, int i) { return f_macro(MacroKind::RatK, kk, i); };
  EvalSession session(built, ctx.oracle, RatMode::Prob);
  per_state_claims(r, ctx, built, session, "RATk", make);
  check_biconditional(r, ctx, built, session, RatMode::Prob, "RATk", make,
                      [&](int i, int strat, int kk) {
                        return ctx.strict.survives(i, strat, kk);
                      },
                      k, mutations);
}

void verify_charrat(VerificationReport& r, NormalContext& ctx, int k,
                    int mutations) {
  EpistemicStructure built = build_rationalizable_structure(ctx.g);
  appropriateness_claim(r, built, "rationalizable structure appropriate",
                        false);
  long long expect = 1;
  for (int p = 0; p < ctx.g.num_players(); ++p)
    expect *= static_cast<long long>(ctx.strict.survivors()[p].size());
  add_claim(r, "state count = product of fixpoint sets",
            built.num_states() == expect, std::to_string(built.num_states()));
  // every state satisfies B_i E^h RAT for h <= k
  EvalSession session(built, ctx.oracle, RatMode::Prob);
  for (int w = 0; w < built.num_states(); ++w)
    for (int i = 0; i < ctx.g.num_players(); ++i)
      for (int h = 0; h <= k; ++h)
        if (!session.ev(w, f_macro(MacroKind::Ek, h, i))) {
          add_claim(r, "common-belief claims", false,
                    state_note(built, w) + " E^" + std::to_string(h));
          return;
        }
  add_claim(r, "common-belief claims", true);
  // formula => membership (mutations): B_i E^k RAT implies surviving k+1
  // strict rounds.
  for (int mi = 0; mi < mutations; ++mi) {
    EpistemicStructure mut = mutate_structure(built, 2000 + mi);
    EvalSession mses(mut, ctx.oracle, RatMode::Prob);
    for (int w = 0; w < mut.num_states(); ++w)
      for (int i = 0; i < ctx.g.num_players(); ++i)
        for (int h = 0; h <= k; ++h)
          if (mses.ev(w, f_macro(MacroKind::Ek, h, i)) &&
              !ctx.strict.survives(i, mut.strat[w][i], h + 1)) {
            add_claim(r, "formula=>membership (mutations)", false,
                      "mutation " + std::to_string(mi) + " " +
                          state_note(mut, w));
            return;
          }
  }
  add_claim(r, "formula=>membership (mutations)", true);
}

void verify_prop_grat(VerificationReport& r, NormalContext& ctx, int k) {
  EpistemicStructure built = build_grat_structure(ctx.g, k);
  EvalSession session(built, ctx.oracle, RatMode::Lex);
  const int n = ctx.g.num_players();
  std::vector<OppProfiles> full(n);
  for (int i = 0; i < n; ++i)
    full[i] = OppProfiles::enumerate_full(ctx.g, i);
  // count players losing a strategy in round 1 (hypothesis of clause (b))
  int losers = 0;
  for (int p = 0; p < n; ++p)
    if (ctx.weak.at_round(1)[p].size() < ctx.weak.at_round(0)[p].size())
      ++losers;

  auto gratz = [&](int h, int i) { return f_macro(MacroKind::GratZero, h, i); };
  auto gratz_group = [&](int h, int i) {
    return f_macro(MacroKind::GratZero, h, i, true);
  };
  // play_{-i}(tau) events, per opponent profile
  auto play_states = [&](int i, int q) {
    std::vector<int> ev;
    for (int w2 = 0; w2 < built.num_states(); ++w2) {
      bool match = true;
      for (int p = 0; p < n; ++p)
        if (p != i && built.strat[w2][p] != full[i].items[q][p]) {
          match = false;
          break;
        }
      if (match) ev.push_back(w2);
    }
    return ev;
  };

  bool checked_any = false;
  for (int w = 0; w < built.num_states(); ++w) {
    for (int i = 0; i < n; ++i) {
      for (int kk = 1; kk <= k; ++kk) {
        bool holds;
        try {
          holds = session.ev(w, gratz(kk, i));
        } catch (const DiamondUndecided& ex) {
          add_inconclusive(r, "prop_grat", ex.what());
          return;
        }
        if (!holds) continue;
        checked_any = true;
        const int bound = kk - 1;  // GRATzero^{bound+1} holds at w
        const Lps& lps = built.beliefs[i][w];
        // (a) every opponent profile lexicographically possible
        for (int q = 0; q < full[i].size(); ++q) {
          if (lps.is_null(play_states(i, q))) {
            add_claim(r, "clause (a): all opponent profiles possible", false,
                      state_note(built, w) + " misses " +
                          ctx.g.profile_label(full[i].items[q]));
            return;
          }
        }
        // (b) mutual exclusion under its hypothesis
        if (losers >= 2) {
          for (int h = 1; h <= bound; ++h) {
            if (session.ev(w, gratz(h, i))) {
              add_claim(r, "clause (b): levels mutually exclusive", false,
                        state_note(built, w) + " also satisfies level " +
                            std::to_string(h));
              return;
            }
          }
        }
        // (c) first part: H-event domination
        auto h_event = [&](int h) {
          std::vector<int> ev;
          for (int w2 = 0; w2 < built.num_states(); ++w2) {
            bool ok = session.ev(w2, gratz_group(h, i));
            for (int h2 = h + 1; ok && h2 <= bound; ++h2)
              ok = !session.ev(w2, gratz_group(h2, i));
            if (ok) ev.push_back(w2);
          }
          return ev;
        };
        std::vector<std::vector<int>> hev;
        for (int h = 0; h <= bound; ++h) hev.push_back(h_event(h));
        for (int h2 = 0; h2 <= bound; ++h2)
          for (int h1 = 0; h1 < h2; ++h1) {
            if (!hev[h1].empty() && !lps.is_null(hev[h2]) &&
                !dominates_event(lps, hev[h2], hev[h1])) {
              add_claim(r, "clause (c): H-event domination", false,
                        state_note(built, w) + " H^" + std::to_string(h2) +
                            " !>> H^" + std::to_string(h1));
              return;
            }
          }
        // (c) second part: profile domination.  grat_from[h][w2] marks states
        // satisfying some GRATzero^{h'}_{-i} with h' in [h, bound].
        std::vector<std::vector<char>> grat_from(
            bound + 1, std::vector<char>(built.num_states(), 0));
        for (int w2 = 0; w2 < built.num_states(); ++w2) {
          int highest = -1;
          for (int h = 0; h <= bound; ++h)
            if (session.ev(w2, gratz_group(h, i))) highest = std::max(highest, h);
          for (int h = 0; h <= bound && h <= highest; ++h)
            grat_from[h][w2] = 1;
          // a state satisfying level h' also covers every h <= h' in the
          // disjunction, which the loop above encodes via `highest`.
        }
        for (int h = 0; h <= bound; ++h) {
          for (int q = 0; q < full[i].size(); ++q) {
            auto tau = play_states(i, q);
            bool tau_compatible = false;
            for (int w2 : tau)
              if (session.ev(w2, gratz_group(h, i))) tau_compatible = true;
            if (!tau_compatible) continue;
            for (int q2 = 0; q2 < full[i].size(); ++q2) {
              auto tau2 = play_states(i, q2);
              bool tau2_incompatible = true;
              for (int w2 : tau2)
                if (grat_from[h][w2]) tau2_incompatible = false;
              if (tau2_incompatible && !dominates_event(lps, tau, tau2)) {
                add_claim(r, "clause (c): profile domination", false,
                          state_note(built, w));
                return;
              }
            }
          }
        }
      }
    }
  }
  add_claim(r, "prop_grat clauses (a)(b)(c)", true,
            checked_any ? "" : "no qualifying state");
}

void verify_lemma_ckchar(VerificationReport& r, NormalContext& ctx, int k) {
  EpistemicStructure structs[2] = {build_ratzero_structure(ctx.g, k),
                                   build_grat_structure(ctx.g, k)};
  for (const auto& built : structs) {
    RatMode mode =
        built.max_lps_length() > 1 ? RatMode::Lex : RatMode::Prob;
    EvalSession session(built, ctx.oracle, mode);
    for (int w = 0; w < built.num_states(); ++w) {
      for (int i = 0; i < ctx.g.num_players(); ++i) {
        for (int kk = 0; kk < k; ++kk) {
          FormulaPtr a = f_macro(MacroKind::RatK, kk + 1, i);
          FormulaPtr b = f_b(i, {a});
          FormulaPtr c =
              f_and(f_rat(i), f_b(i, {f_macro(MacroKind::RatK, kk, i, true)}));
          bool va = session.ev(w, a);
          bool vb = session.ev(w, b);
          bool vc = session.ev(w, c);
          if (va != vb || vb != vc) {
            add_claim(r, "RAT^k equivalences", false,
                      state_note(built, w) + " k=" + std::to_string(kk + 1));
            return;
          }
          if (va && kk >= 1 &&
              !session.ev(w, f_macro(MacroKind::RatK, kk, i))) {
            add_claim(r, "RAT^{k+1} implies RAT^k", false,
                      state_note(built, w));
            return;
          }
        }
      }
    }
  }
  add_claim(r, "RAT^k equivalences", true);
  add_claim(r, "RAT^{k+1} implies RAT^k", true);
}

// ---------------------------------------------------------------------
// Extensive-form theorem checks

void verify_prop_conddom(VerificationReport& r, const ReducedGame& rg) {
  NcdTrace trace = iterate_ncd(rg);
  for (std::size_t round = 0; round < trace.rounds.size(); ++round) {
    const StrategySets& sets = trace.rounds[round];
    for (int p = 0; p < rg.game.num_players(); ++p) {
      for (int s : sets[p]) {
        bool cd = conditionally_dominated(rg, p, s, sets, CondVariant::Cd)
                      .has_value();
        bool cdp =
            conditionally_dominated(rg, p, s, sets, CondVariant::CdPrime)
                .has_value();
        if (cd != cdp) {
          add_claim(r, "cd <=> cd'", false,
                    "round " + std::to_string(round) + " " +
                        rg.game.players[p] + ":" + rg.game.strategies[p][s]);
          return;
        }
      }
    }
  }
  add_claim(r, "cd <=> cd'", true);
}

void verify_lemma_pearce1(VerificationReport& r, const ReducedGame& rg) {
  NcdTrace trace = iterate_ncd(rg);
  for (std::size_t round = 1; round < trace.rounds.size() + 1; ++round) {
    const StrategySets& prev = trace.at_round(static_cast<int>(round) - 1);
    const StrategySets& cur = trace.at_round(static_cast<int>(round));
    for (int p = 0; p < rg.game.num_players(); ++p) {
      OppProfiles opp = OppProfiles::enumerate(rg.game, p, prev);
      for (int s : cur[p]) {
        Lps lps = witness_lps(rg, p, s, opp);
        // full support
        for (int q = 0; q < opp.size(); ++q)
          if (lps.first_positive_level({q}) < 0) {
            add_claim(r, "witness LPS full support", false,
                      rg.game.strategies[p][s]);
            return;
          }
        // almost-best response conditional on every reachable set
        for (int I = 0;
             I < static_cast<int>(rg.tree.infosets[p].size()); ++I) {
          auto reach = reach_set(rg, p, s, I, opp);
          if (reach.empty()) continue;
          Lps cond = condition(lps, reach);
          for (int other = 0; other < rg.game.num_strategies(p); ++other) {
            if (!rg.agrees_above(p, other, s, I)) continue;
            Rat eu_s, eu_o;
            for (int q = 0; q < opp.size(); ++q) {
              if (cond.levels[0][q].is_zero()) continue;
              eu_s += cond.levels[0][q] *
                      rg.game.payoff(p, combine(opp.items[q], p, s));
              eu_o += cond.levels[0][q] *
                      rg.game.payoff(p, combine(opp.items[q], p, other));
            }
            if (eu_o > eu_s) {
              add_claim(r, "almost-best response at reachable sets", false,
                        rg.game.strategies[p][s] + " at set " +
                            std::to_string(I));
              return;
            }
          }
        }
      }
    }
  }
  add_claim(r, "witness LPS full support", true);
  add_claim(r, "almost-best response at reachable sets", true);
}

void verify_lemma_pearce2(VerificationReport& r, const ReducedGame& rg) {
  DeletionTrace weak = iterate_deletion(rg.game, DomMode::Weak);
  for (int round = 1; round <= weak.fixpoint_round + 1; ++round) {
    const StrategySets& prev = weak.at_round(round - 1);
    const StrategySets& cur = weak.at_round(round);
    for (int p = 0; p < rg.game.num_players(); ++p) {
      OppProfiles opp = OppProfiles::enumerate(rg.game, p, prev);
      for (int s : cur[p]) {
        Lps lps = weak_witness_lps(rg, p, s, opp);
        for (int q = 0; q < opp.size(); ++q)
          if (!lps.levels[0][q].is_positive()) {
            add_claim(r, "first level has full support", false,
                      rg.game.strategies[p][s]);
            return;
          }
        for (int I = 0;
             I < static_cast<int>(rg.tree.infosets[p].size()); ++I) {
          auto reach = reach_set(rg, p, s, I, opp);
          if (reach.empty()) continue;
          Lps cond = condition(lps, reach);
          for (int other = 0; other < rg.game.num_strategies(p); ++other) {
            if (!rg.agrees_above(p, other, s, I)) continue;
            Rat eu_s, eu_o;
            for (int q = 0; q < opp.size(); ++q) {
              if (cond.levels[0][q].is_zero()) continue;
              eu_s += cond.levels[0][q] *
                      rg.game.payoff(p, combine(opp.items[q], p, s));
              eu_o += cond.levels[0][q] *
                      rg.game.payoff(p, combine(opp.items[q], p, other));
            }
            if (eu_o > eu_s) {
              add_claim(r, "conditional almost-best response", false,
                        rg.game.strategies[p][s]);
              return;
            }
          }
        }
        // dominated strategies must be rejected
      }
      for (int s : prev[p]) {
        bool deleted = true;
        for (int x : cur[p])
          if (x == s) deleted = false;
        if (!deleted) continue;
        bool threw = false;
        try {
          weak_witness_lps(rg, p, s, opp);
        } catch (const std::invalid_argument&) {
          threw = true;
        }
        if (!threw) {
          add_claim(r, "dominated strategies rejected", false,
                    rg.game.strategies[p][s]);
          return;
        }
      }
    }
  }
  add_claim(r, "first level has full support", true);
  add_claim(r, "conditional almost-best response", true);
  add_claim(r, "dominated strategies rejected", true);
}

void verify_charefr(VerificationReport& r, const ExtensiveFormGame& g, int k,
                    bool weak_variant) {
  ExtEpistemicStructure built = weak_variant
                                    ? build_efr_structure_weak(g, k)
                                    : build_efr_structure(g, k);
  DiamondOracle oracle = make_efr_oracle(built.rg);
  {
    auto violations = check_appropriate_ext(built);
    add_claim(r, "appropriateness conditions 1-6", violations.empty(),
              violations.empty()
                  ? ""
                  : "condition " + std::to_string(violations[0].condition) +
                        " at " + built.state_labels[violations[0].state] +
                        "@" + std::to_string(violations[0].time) + ": " +
                        violations[0].detail);
  }
  {
    auto violations = check_respects_conditioning(built);
    add_claim(r, "respects conditioning", violations.empty(),
              violations.empty()
                  ? ""
                  : built.state_labels[violations[0].state] + "@" +
                        std::to_string(violations[0].time) + ": " +
                        violations[0].detail);
  }
  NcdTrace ncd = iterate_ncd(built.rg);
  DeletionTrace weak = iterate_deletion(built.rg.game, DomMode::Weak);
  EvalSessionExt session(built, oracle);
  auto survives = [&](int i, int s, int kk) {
    return weak_variant ? weak.survives(i, s, kk) : ncd.survives(i, s, kk);
  };
  auto make = [&](int kk, int i) {
    return f_macro(MacroKind::RatEfr, kk, i, false, Rat(), Rat(),
                   weak_variant);
  };
  // per-(state, time) claims
  for (int w = 0; w < built.num_states(); ++w) {
    BuiltStateInfo info = built_state_info_ext(built, w);
    if (weak_variant) {
      for (int p = 0; p < built.num_players(); ++p)
        if (!weak.survives(p, built.strat[w][p], info.level)) {
          add_claim(r, "weak-variant states in NWD", false,
                    built.state_labels[w]);
          return;
        }
    }
    for (int m = 0; m <= built.horizon; ++m) {
      for (int j = 0; j < built.num_players(); ++j) {
        if (j == info.mid_player) continue;
        bool ok;
        try {
          ok = session.ev(w, m, make(info.level, j));
        } catch (const DiamondUndecided& ex) {
          add_inconclusive(r, "per-state-time claims", ex.what());
          return;
        }
        if (!ok) {
          add_claim(r, "per-state-time claims", false,
                    built.state_labels[w] + "@" + std::to_string(m) +
                        " player " + built.rg.game.players[j]);
          return;
        }
      }
    }
  }
  add_claim(r, "per-state-time claims", true);
  if (weak_variant) add_claim(r, "weak-variant states in NWD", true);

  // membership biconditional over the built structure
  for (int i = 0; i < built.rg.game.num_players(); ++i) {
    for (int s = 0; s < built.rg.game.num_strategies(i); ++s) {
      for (int kk = 0; kk <= k; ++kk) {
        bool member = survives(i, s, kk);
        bool found = false;
        for (int w = 0; w < built.num_states() && !found; ++w) {
          if (built.strat[w][i] != s) continue;
          found = session.ev(w, 0, make(kk, i));
        }
        if (member != found) {
          add_claim(r, "membership biconditional", false,
                    built.rg.game.players[i] + ":" +
                        built.rg.game.strategies[i][s] + " k=" +
                        std::to_string(kk) +
                        (member ? " unsatisfied" : " oversatisfied"));
          return;
        }
      }
    }
  }
  add_claim(r, "membership biconditional", true);
}

BuiltStateInfo built_state_info_ext_impl(const std::string& label) {
  BuiltStateInfo info;
  std::istringstream is(label.substr(1));
  char comma = 0;
  is >> info.level >> comma >> info.mid_player;
  info.mid_player -= 1;
  return info;
}

}  // namespace

// Label decomposition shared with the normal-form helper.
BuiltStateInfo built_state_info_ext(const ExtEpistemicStructure& s, int state) {
  return built_state_info_ext_impl(s.state_labels[state]);
}

VerificationReport verify_theorem(const NormalFormGame& g,
                                  const std::string& game_id, int k,
                                  const std::string& theorem, int mutations) {
  Timer t;
  VerificationReport r;
  r.theorem = theorem;
  r.game_id = game_id;
  r.k = k;
  r.note = "formula=>membership checked on built + mutated structures only";
  NormalContext ctx(g);
  if (theorem == "charwd") {
    verify_charwd(r, ctx, k, mutations);
  } else if (theorem == "charwdg") {
    verify_charwdg(r, ctx, k, mutations);
  } else if (theorem == "charwdg1") {
    verify_charwdg1(r, ctx, k, mutations);
  } else if (theorem == "charsd") {
    verify_charsd(r, ctx, k, mutations);
  } else if (theorem == "charrat") {
    verify_charrat(r, ctx, k, mutations);
  } else if (theorem == "prop_grat") {
    verify_prop_grat(r, ctx, k);
  } else if (theorem == "lemma_ckchar") {
    verify_lemma_ckchar(r, ctx, k);
  } else {
    throw std::invalid_argument("unknown normal-form theorem: " + theorem);
  }
  r.seconds = t.seconds();
  return r;
}

VerificationReport verify_theorem_extensive(const ExtensiveFormGame& g,
                                            const std::string& game_id, int k,
                                            const std::string& theorem) {
  Timer t;
  VerificationReport r;
  r.theorem = theorem;
  r.game_id = game_id;
  r.k = k;
  ReducedGame rg = reduce(g);
  if (theorem == "charefr") {
    verify_charefr(r, g, k, false);
  } else if (theorem == "charefrwd") {
    verify_charefr(r, g, k, true);
  } else if (theorem == "prop_conddom") {
    verify_prop_conddom(r, rg);
  } else if (theorem == "lemma_pearce1") {
    verify_lemma_pearce1(r, rg);
  } else if (theorem == "lemma_pearce2") {
    verify_lemma_pearce2(r, rg);
  } else {
    throw std::invalid_argument("unknown extensive theorem: " + theorem);
  }
  r.seconds = t.seconds();
  return r;
}

BruteTrace brute_force_ncd(const ReducedGame& rg, long long guard) {
  if (rg.game.num_profiles() > guard)
    throw std::length_error("brute_force_ncd: size guard exceeded");
  BruteTrace trace;
  trace.rounds.push_back(rg.game.full_sets());
  while (true) {
    const StrategySets& cur = trace.rounds.back();
    StrategySets next(rg.game.num_players());
    bool changed = false;
    for (int p = 0; p < rg.game.num_players(); ++p) {
      OppProfiles opp = OppProfiles::enumerate(rg.game, p, cur);
      for (int s : cur[p]) {
        bool dominated = false;
        for (int I = 0;
             I < static_cast<int>(rg.tree.infosets[p].size()) && !dominated;
             ++I) {
          auto reach = reach_set(rg, p, s, I, opp);
          if (reach.empty()) continue;
          std::vector<int> base;
          for (int s2 = 0; s2 < rg.game.num_strategies(p); ++s2)
            if (rg.agrees_off_subtree(p, s2, s, I)) base.push_back(s2);
          OppProfiles restricted;
          restricted.player = p;
          for (int q : reach) restricted.items.push_back(opp.items[q]);
          dominated = oracle_dominated(rg.game, p, s, base, restricted,
                                       /*weak=*/false)
                          .dominated;
        }
        if (dominated)
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

ExtensiveFormGame random_extensive_game(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0xabcdef1234567890ull);
  ExtensiveFormGame g;
  int n = 2 + static_cast<int>(rng() % 2);
  for (int p = 0; p < n; ++p) g.players.push_back(std::to_string(p + 1));
  int depth = 2 + static_cast<int>(rng() % 2);
  depth = std::min(depth, n);  // one mover per depth level
  std::vector<int> branch(depth);
  for (int d = 0; d < depth; ++d)
    branch[d] = 2 + static_cast<int>(rng() % 2);
  // movers: a random permutation prefix
  std::vector<int> movers;
  for (int p = 0; p < n; ++p) movers.push_back(p);
  for (int d = n - 1; d > 0; --d)
    std::swap(movers[d], movers[rng() % (d + 1)]);
  movers.resize(depth);

  const char* action_names = "abc";
  auto grow = [&](auto&& self, int parent, int d) -> void {
    int v = static_cast<int>(g.nodes.size()) - 1;
    if (d == depth) {
      for (int p = 0; p < n; ++p)
        g.nodes[v].payoffs.push_back(
            Rat(static_cast<long long>(rng() % 9), 8));
      return;
    }
    g.nodes[v].mover = movers[d];
    for (int a = 0; a < branch[d]; ++a) {
      g.nodes.push_back({});
      int c = static_cast<int>(g.nodes.size()) - 1;
      g.nodes[c].parent = v;
      g.nodes[c].depth = d + 1;
      g.nodes[v].children.push_back({std::string(1, action_names[a]), c});
      self(self, v, d + 1);
    }
  };
  g.nodes.push_back({});
  grow(grow, -1, 0);

  // information sets: pool each depth level's nodes into one or two sets
  g.infosets.assign(n, {});
  std::vector<std::vector<int>> per_depth(depth);
  for (std::size_t v = 0; v < g.nodes.size(); ++v)
    if (!g.nodes[v].children.empty())
      per_depth[g.nodes[v].depth].push_back(static_cast<int>(v));
  for (int d = 0; d < depth; ++d) {
    int p = movers[d];
    const auto& nodes = per_depth[d];
    int mode = static_cast<int>(rng() % 3);
    if (mode == 0 || nodes.size() == 1) {
      for (int v : nodes) g.infosets[p].push_back({v});
    } else if (mode == 1) {
      g.infosets[p].push_back(nodes);
    } else {
      std::vector<int> a, b;
      for (int v : nodes) (rng() % 2 ? a : b).push_back(v);
      if (a.empty() || b.empty()) {
        g.infosets[p].push_back(nodes);
      } else {
        g.infosets[p].push_back(a);
        g.infosets[p].push_back(b);
      }
    }
  }
  return g;
}

std::string report_to_json_text(const VerificationReport& r) {
  nlohmann::json doc;
  doc["theorem"] = r.theorem;
  doc["game"] = r.game_id;
  doc["k"] = r.k;
  doc["seed"] = r.seed;
  doc["seconds"] = r.seconds;
  doc["note"] = r.note;
  nlohmann::json claims = nlohmann::json::array();
  for (const auto& c : r.claims) {
    nlohmann::json entry;
    entry["name"] = c.name;
    entry["pass"] = c.pass;
    entry["inconclusive"] = c.inconclusive;
    if (!c.counterexample.empty()) entry["counterexample"] = c.counterexample;
    claims.push_back(entry);
  }
  doc["claims"] = claims;
  doc["all_pass"] = r.all_pass();
  return doc.dump(2) + "\n";
}

std::string report_table(const std::vector<VerificationReport>& reports,
                         bool include_timing) {
  std::ostringstream os;
  os << "theorem      game                 k  result";
  if (include_timing) os << "  seconds";
  os << "\n-----------  -------------------  -  ------";
  if (include_timing) os << "  -------";
  os << "\n";
  for (const auto& r : reports) {
    bool inconclusive = false;
    for (const auto& c : r.claims) inconclusive |= c.inconclusive;
    os << r.theorem
       << std::string(std::max<int>(1, 13 - (int)r.theorem.size()), ' ')
       << r.game_id
       << std::string(std::max<int>(1, 21 - (int)r.game_id.size()), ' ')
       << r.k << "  "
       << (r.all_pass() ? "pass  " : inconclusive ? "inconc" : "FAIL  ");
    if (include_timing) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%7.2f", r.seconds);
      os << buf;
    }
    os << "\n";
    for (const auto& c : r.claims)
      if (!c.pass)
        os << "    " << c.name << ": " << c.counterexample << "\n";
  }
  return os.str();
}

std::vector<VerificationReport> run_suite(const SuiteOptions& opt) {
  // Independent (game, theorem) cells; EGT_VERIFY_THREADS > 1 evaluates them
  // in parallel.  The report order is fixed by the cell list, so the output
  // is identical either way.
  const char* normal_theorems[] = {"charrat", "charsd",   "charwd",
                                   "charwdg", "charwdg1", "prop_grat",
                                   "lemma_ckchar"};
  const char* ext_theorems[] = {"charefr", "charefrwd", "prop_conddom",
                                "lemma_pearce1", "lemma_pearce2"};
  struct Cell {
    bool extensive;
    std::uint64_t seed;
    std::string theorem;
  };
  std::vector<Cell> cells;
  for (int gi = 0; gi < opt.normal_games; ++gi)
    for (const char* theorem : normal_theorems)
      cells.push_back({false, opt.base_seed + gi, theorem});
  for (int gi = 0; gi < opt.extensive_games; ++gi)
    for (const char* theorem : ext_theorems)
      cells.push_back({true, opt.base_seed + gi, theorem});

  std::vector<VerificationReport> out(cells.size());
  auto run_cell = [&](std::size_t idx) {
    const Cell& cell = cells[idx];
    if (cell.extensive) {
      ExtensiveFormGame g = random_extensive_game(cell.seed);
      out[idx] = verify_theorem_extensive(
          g, "random-ext-" + std::to_string(cell.seed), opt.k, cell.theorem);
    } else {
      NormalFormGame g = random_game(cell.seed);
      out[idx] = verify_theorem(g, "random-" + std::to_string(cell.seed),
                                opt.k, cell.theorem, opt.mutations);
    }
    out[idx].seed = cell.seed;
  };

  int threads = 1;
  if (const char* env = std::getenv("EGT_VERIFY_THREADS"))
    threads = std::max(1, std::atoi(env));
  threads = std::min<int>(threads, static_cast<int>(cells.size()) + 1);
  if (threads <= 1) {
    for (std::size_t idx = 0; idx < cells.size(); ++idx) run_cell(idx);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t idx = next.fetch_add(1); idx < cells.size();
           idx = next.fetch_add(1))
        run_cell(idx);
    });
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace egt::verify
