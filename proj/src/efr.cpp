#include "egt/efr.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "egt/simplex.hpp"
#include "json.hpp"

namespace egt {

int ExtensiveFormGame::infoset_of(int p, int node) const {
  for (int I = 0; I < static_cast<int>(infosets[p].size()); ++I)
    for (int v : infosets[p][I])
      if (v == node) return I;
  return -1;
}

int ExtensiveFormGame::max_depth() const {
  int d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

std::vector<std::string> validate_extensive(const ExtensiveFormGame& g) {
  std::vector<std::string> report;
  if (g.players.empty()) report.push_back("no players");
  if (g.nodes.empty()) {
    report.push_back("empty tree");
    return report;
  }
  if (g.nodes[0].parent != -1) report.push_back("node 0 is not a root");
  std::vector<int> indeg(g.nodes.size(), 0);
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    const auto& n = g.nodes[v];
    std::set<std::string> labels;
    for (const auto& [a, c] : n.children) {
      if (c < 0 || c >= static_cast<int>(g.nodes.size())) {
        report.push_back("child index out of range at node " +
                         std::to_string(v));
        continue;
      }
      if (!labels.insert(a).second)
        report.push_back("duplicate action '" + a + "' at node " +
                         std::to_string(v));
      if (g.nodes[c].parent != static_cast<int>(v))
        report.push_back("parent link broken at node " + std::to_string(c));
      ++indeg[c];
    }
    if (n.children.empty()) {
      if (static_cast<int>(n.payoffs.size()) != g.num_players())
        report.push_back("leaf " + std::to_string(v) +
                         " lacks a payoff for every player");
      for (const Rat& u : n.payoffs)
        if (u.is_negative() || u > Rat::one())
          report.push_back("payoff out of [0,1] at leaf " + std::to_string(v));
    } else {
      if (n.mover < 0 || n.mover >= g.num_players())
        report.push_back("bad mover at node " + std::to_string(v));
    }
  }
  for (std::size_t v = 1; v < g.nodes.size(); ++v)
    if (indeg[v] != 1)
      report.push_back(indeg[v] == 0
                           ? "two roots (node " + std::to_string(v) +
                                 " unreachable from node 0)"
                           : "node " + std::to_string(v) + " has two parents");
  if (!report.empty()) return report;

  // Information sets: partition of each player's decision nodes, matching
  // movers and identical action label sequences inside a set.
  for (int p = 0; p < g.num_players(); ++p) {
    std::set<int> seen;
    for (const auto& iset : g.infosets[p]) {
      if (iset.empty()) {
        report.push_back("empty information set for player " + g.players[p]);
        continue;
      }
      const auto& first = g.nodes[iset[0]];
      for (int v : iset) {
        if (!seen.insert(v).second)
          report.push_back("node " + std::to_string(v) +
                           " in two information sets");
        const auto& n = g.nodes[v];
        if (n.children.empty() || n.mover != p) {
          report.push_back("node " + std::to_string(v) +
                           " does not belong to player " + g.players[p]);
          continue;
        }
        if (n.children.size() != first.children.size()) {
          report.push_back("action sets differ inside an information set of " +
                           g.players[p]);
          continue;
        }
        for (std::size_t a = 0; a < n.children.size(); ++a)
          if (n.children[a].first != first.children[a].first)
            report.push_back("action labels differ inside an information set of " +
                             g.players[p]);
      }
    }
    for (std::size_t v = 0; v < g.nodes.size(); ++v)
      if (!g.nodes[v].children.empty() && g.nodes[v].mover == p &&
          !seen.count(static_cast<int>(v)))
        report.push_back("decision node " + std::to_string(v) +
                         " of player " + g.players[p] +
                         " is in no information set");
  }
  if (!report.empty()) return report;

  // Perfect recall: all nodes of an information set share the player's own
  // (information set, action) history.
  for (int p = 0; p < g.num_players(); ++p) {
    auto own_history = [&](int v) {
      std::vector<std::pair<int, int>> hist;  // (infoset, action index)
      int cur = v;
      while (g.nodes[cur].parent >= 0) {
        int parent = g.nodes[cur].parent;
        if (g.nodes[parent].mover == p) {
          int a = -1;
          for (std::size_t idx = 0; idx < g.nodes[parent].children.size(); ++idx)
            if (g.nodes[parent].children[idx].second == cur)
              a = static_cast<int>(idx);
          hist.push_back({g.infoset_of(p, parent), a});
        }
        cur = parent;
      }
      std::reverse(hist.begin(), hist.end());
      return hist;
    };
    for (const auto& iset : g.infosets[p]) {
      auto ref = own_history(iset[0]);
      for (int v : iset)
        if (own_history(v) != ref) {
          report.push_back("perfect recall violated in an information set of " +
                           g.players[p]);
          break;
        }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Reduction to the strategic form

ReducedGame reduce(const ExtensiveFormGame& g) {
  auto report = validate_extensive(g);
  if (!report.empty())
    throw std::invalid_argument("invalid extensive game: " + report.front());
  ReducedGame rg;
  rg.tree = g;
  rg.game.players = g.players;
  const int n = g.num_players();

  for (int p = 0; p < n; ++p) {
    const auto& sets = g.infosets[p];
    const int m = static_cast<int>(sets.size());
    std::vector<int> counts(m);
    for (int I = 0; I < m; ++I)
      counts[I] = static_cast<int>(g.nodes[sets[I][0]].children.size());

    // A node is own-reachable when the player's earlier own choices allow it.
    auto canonical = [&](std::vector<int> act) {
      std::vector<char> reach(g.nodes.size(), 0);
      reach[0] = 1;
      for (std::size_t v = 0; v < g.nodes.size(); ++v) {
        if (!reach[v]) continue;
        const auto& node = g.nodes[v];
        for (std::size_t a = 0; a < node.children.size(); ++a) {
          if (node.mover == p &&
              act[g.infoset_of(p, static_cast<int>(v))] !=
                  static_cast<int>(a))
            continue;
          reach[node.children[a].second] = 1;
        }
      }
      for (int I = 0; I < m; ++I) {
        bool hit = false;
        for (int v : sets[I]) hit = hit || reach[v];
        if (!hit) act[I] = -1;
      }
      return act;
    };

    std::vector<std::vector<int>> reduced;
    std::vector<std::string> labels;
    std::vector<int> act(m, 0);
    bool more = !act.empty();
    if (m == 0) {
      reduced.push_back({});
      labels.push_back("-");
    }
    while (more) {
      auto canon = canonical(act);
      if (std::find(reduced.begin(), reduced.end(), canon) == reduced.end()) {
        std::string label;
        for (int I = 0; I < m; ++I) {
          if (canon[I] < 0) continue;
          if (!label.empty()) label += ".";
          label += g.nodes[sets[I][0]].children[canon[I]].first;
        }
        reduced.push_back(std::move(canon));
        labels.push_back(std::move(label));
      }
      int I = m - 1;
      while (I >= 0 && ++act[I] == counts[I]) act[I--] = 0;
      more = I >= 0;
    }
    rg.actions.push_back(std::move(reduced));
    rg.game.strategies.push_back(std::move(labels));
  }

  rg.game.payoffs.assign(rg.game.num_profiles(),
                         std::vector<Rat>(n));
  for (long long idx = 0; idx < rg.game.num_profiles(); ++idx) {
    Profile prof = rg.game.profile_at(idx);
    auto path = rg.path_of(prof);
    rg.game.payoffs[idx] = g.nodes[path.back()].payoffs;
  }
  return rg;
}

std::vector<int> ReducedGame::path_of(const Profile& prof) const {
  std::vector<int> path{0};
  while (!tree.nodes[path.back()].children.empty()) {
    int v = path.back();
    int p = tree.nodes[v].mover;
    int I = tree.infoset_of(p, v);
    int a = actions[p][prof[p]][I];
    if (a < 0) throw std::logic_error("reduced strategy hit a masked set");
    path.push_back(tree.nodes[v].children[a].second);
  }
  return path;
}

bool ReducedGame::reaches(const Profile& prof, int player, int infoset) const {
  return reach_time(prof, player, infoset) >= 0;
}

int ReducedGame::reach_time(const Profile& prof, int player,
                            int infoset) const {
  auto path = path_of(prof);
  for (std::size_t m = 0; m < path.size(); ++m)
    for (int v : tree.infosets[player][infoset])
      if (v == path[m]) return static_cast<int>(m);
  return -1;
}

std::vector<int> ReducedGame::at_or_below(int player, int infoset) const {
  std::vector<char> below(tree.nodes.size(), 0);
  for (int v : tree.infosets[player][infoset]) below[v] = 1;
  // children inherit the mark (nodes are not ordered, so iterate to fixpoint)
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
      if (below[v]) continue;
      int parent = tree.nodes[v].parent;
      if (parent >= 0 && below[parent]) {
        below[v] = 1;
        changed = true;
      }
    }
  }
  std::vector<int> out;
  for (int I = 0; I < static_cast<int>(tree.infosets[player].size()); ++I)
    for (int v : tree.infosets[player][I])
      if (below[v]) {
        out.push_back(I);
        break;
      }
  return out;
}

bool ReducedGame::agrees_off_subtree(int player, int s, int t,
                                     int infoset) const {
  auto sub = at_or_below(player, infoset);
  for (int I = 0; I < static_cast<int>(tree.infosets[player].size()); ++I) {
    if (std::find(sub.begin(), sub.end(), I) != sub.end()) continue;
    if (actions[player][s][I] != actions[player][t][I]) return false;
  }
  return true;
}

bool ReducedGame::agrees_above(int player, int s, int t, int infoset) const {
  // Own sets strictly above: those containing a proper ancestor of a node
  // of `infoset`.
  std::set<int> above;
  for (int v : tree.infosets[player][infoset]) {
    int cur = tree.nodes[v].parent;
    while (cur >= 0) {
      if (tree.nodes[cur].mover == player)
        above.insert(tree.infoset_of(player, cur));
      cur = tree.nodes[cur].parent;
    }
  }
  for (int I : above)
    if (actions[player][s][I] != actions[player][t][I]) return false;
  return true;
}

std::vector<int> reach_set(const ReducedGame& rg, int player, int strat,
                           int infoset, const OppProfiles& opp) {
  std::vector<int> out;
  for (int q = 0; q < opp.size(); ++q)
    if (rg.reaches(combine(opp.items[q], player, strat), player, infoset))
      out.push_back(q);
  return out;
}

std::vector<int> reach_set_mixed(const ReducedGame& rg, int player, int strat,
                                 const MixedStrategy& mix, int infoset,
                                 const OppProfiles& opp) {
  std::vector<int> out;
  for (int q : reach_set(rg, player, strat, infoset, opp)) {
    bool all = true;
    for (int s = 0; s < static_cast<int>(mix.weights.size()); ++s) {
      if (mix.weights[s].is_zero()) continue;
      if (!rg.reaches(combine(opp.items[q], player, s), player, infoset)) {
        all = false;
        break;
      }
    }
    if (all) out.push_back(q);
  }
  return out;
}

std::optional<CondWitness> conditionally_dominated(const ReducedGame& rg,
                                                   int player, int strat,
                                                   const StrategySets& sets,
                                                   CondVariant variant) {
  OppProfiles opp = OppProfiles::enumerate(rg.game, player, sets);
  const int num_sets =
      static_cast<int>(rg.tree.infosets[player].size());
  for (int I = 0; I < num_sets; ++I) {
    std::vector<int> r = reach_set(rg, player, strat, I, opp);
    if (r.empty()) continue;
    std::vector<int> base;
    for (int s = 0; s < rg.game.num_strategies(player); ++s) {
      bool ok;
      if (variant == CondVariant::CdPrime) {
        ok = rg.agrees_off_subtree(player, s, strat, I);
      } else {
        ok = true;
        for (int q : r)
          if (!rg.reaches(combine(opp.items[q], player, s), player, I)) {
            ok = false;
            break;
          }
      }
      if (ok) base.push_back(s);
    }
    OppProfiles restricted;
    restricted.player = player;
    for (int q : r) restricted.items.push_back(opp.items[q]);
    auto dom = dominated_by_mixed(rg.game, player, strat, restricted,
                                  DomMode::Strict, base);
    if (dom) return CondWitness{I, std::move(*dom)};
  }
  return std::nullopt;
}

const StrategySets& NcdTrace::at_round(int k) const {
  std::size_t idx = std::min<std::size_t>(std::max(k, 0), rounds.size() - 1);
  return rounds[idx];
}

bool NcdTrace::survives(int player, int strat, int k) const {
  for (int s : at_round(k)[player])
    if (s == strat) return true;
  return false;
}

NcdTrace iterate_ncd(const ReducedGame& rg) {
  NcdTrace trace;
  trace.rounds.push_back(rg.game.full_sets());
  while (true) {
    const StrategySets& cur = trace.rounds.back();
    StrategySets next(rg.game.num_players());
    bool changed = false;
    for (int p = 0; p < rg.game.num_players(); ++p) {
      for (int s : cur[p]) {
        if (conditionally_dominated(rg, p, s, cur, CondVariant::CdPrime))
          changed = true;
        else
          next[p].push_back(s);
      }
      if (next[p].empty())
        throw std::logic_error("conditional deletion emptied a strategy set");
    }
    if (!changed) break;
    trace.rounds.push_back(std::move(next));
  }
  trace.fixpoint_round = static_cast<int>(trace.rounds.size()) - 1;
  return trace;
}

namespace {

// Deterministic belief over the atoms in `support` (indices into opp) making
// `strat` a best response among `compare` conditional on that support:
// max-min weight, then lexicographic refinement.
std::optional<std::vector<Rat>> conditional_witness(
    const ReducedGame& rg, int player, int strat, const OppProfiles& opp,
    const std::vector<int>& support, const std::vector<int>& compare) {
  const NormalFormGame& g = rg.game;
  const int m = static_cast<int>(support.size());
  std::vector<LpRow> br_rows;
  for (int s : compare) {
    if (s == strat) continue;
    std::vector<Rat> row(m);
    for (int q = 0; q < m; ++q) {
      const Profile& tau = opp.items[support[q]];
      row[q] = g.payoff(player, combine(tau, player, strat)) -
               g.payoff(player, combine(tau, player, s));
    }
    br_rows.push_back({std::move(row), Rel::Ge, Rat::zero()});
  }
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
  for (int q = 0; q < m; ++q) {
    std::vector<Rat> r(m + 1);
    r[q] = Rat::one();
    r[m] = Rat(-1);
    lp.add_row(std::move(r), Rel::Ge, Rat::zero());
  }
  auto stage1 = solve_lp(lp);
  if (stage1.status != LpStatus::Optimal) return std::nullopt;
  Rat w = stage1.objective;

  LinearProgram ref;
  ref.num_vars = m;
  ref.objective.assign(m, Rat::zero());
  ref.add_row(std::vector<Rat>(m, Rat::one()), Rel::Eq, Rat::one());
  for (const auto& row : br_rows) ref.rows.push_back(row);
  for (int q = 0; q < m; ++q) {
    std::vector<Rat> r(m);
    r[q] = Rat::one();
    ref.add_row(std::move(r), Rel::Ge, w);
  }
  std::vector<Rat> x(m);
  for (int q = 0; q < m; ++q) {
    ref.objective.assign(m, Rat::zero());
    ref.objective[q] = Rat::one();
    auto res = solve_lp(ref);
    if (res.status != LpStatus::Optimal)
      throw std::logic_error("conditional witness refinement infeasible");
    x[q] = res.objective;
    std::vector<Rat> pin(m);
    pin[q] = Rat::one();
    ref.add_row(std::move(pin), Rel::Eq, x[q]);
  }
  return x;
}

// Preorder index of each node (deterministic tie-breaking for the witness
// construction).
std::vector<int> preorder_index(const ExtensiveFormGame& g) {
  std::vector<int> order(g.nodes.size(), -1);
  int next = 0;
  auto dfs = [&](auto&& self, int v) -> void {
    order[v] = next++;
    for (const auto& [a, c] : g.nodes[v].children) self(self, c);
  };
  dfs(dfs, 0);
  return order;
}

}  // namespace

Lps witness_lps(const ReducedGame& rg, int player, int strat,
                const OppProfiles& opp) {
  // Recover the product sets underlying `opp` to run the domination check.
  StrategySets sets(rg.game.num_players());
  for (int p = 0; p < rg.game.num_players(); ++p) {
    if (p == player) {
      sets[p].push_back(strat);
      continue;
    }
    std::set<int> vals;
    for (const auto& item : opp.items) vals.insert(item[p]);
    sets[p].assign(vals.begin(), vals.end());
  }
  if (conditionally_dominated(rg, player, strat, sets, CondVariant::CdPrime))
    throw std::invalid_argument(
        "strategy is conditionally dominated on the given sets");

  const int num_sets = static_cast<int>(rg.tree.infosets[player].size());
  auto pre = preorder_index(rg.tree);
  auto earliest = [&](int I) {
    int best = static_cast<int>(rg.tree.nodes.size());
    for (int v : rg.tree.infosets[player][I]) best = std::min(best, pre[v]);
    return best;
  };
  auto strictly_above = [&](int Ia, int Ib) {
    // Ia strictly above Ib: some node of Ib has a proper ancestor in Ia.
    for (int v : rg.tree.infosets[player][Ib]) {
      int cur = rg.tree.nodes[v].parent;
      while (cur >= 0) {
        for (int u : rg.tree.infosets[player][Ia])
          if (u == cur) return true;
        cur = rg.tree.nodes[cur].parent;
      }
    }
    return false;
  };

  std::vector<std::vector<int>> reach(num_sets);
  for (int I = 0; I < num_sets; ++I)
    reach[I] = reach_set(rg, player, strat, I, opp);

  Lps out;
  out.carrier_size = opp.size();
  auto covered = [&](const std::vector<int>& atoms) {
    for (const auto& level : out.levels)
      for (int a : atoms)
        if (level[a].is_positive()) return true;
    return atoms.empty();
  };

  while (true) {
    std::vector<int> pending;
    for (int I = 0; I < num_sets; ++I)
      if (!reach[I].empty() && !covered(reach[I])) pending.push_back(I);
    if (pending.empty()) break;
    int chosen = -1;
    for (int I : pending) {
      bool minimal = true;
      for (int J : pending)
        if (J != I && strictly_above(J, I)) { minimal = false; break; }
      if (!minimal) continue;
      if (chosen < 0 || earliest(I) < earliest(chosen)) chosen = I;
    }
    std::vector<int> compare;
    for (int s = 0; s < rg.game.num_strategies(player); ++s)
      if (rg.agrees_above(player, s, strat, chosen)) compare.push_back(s);
    auto mu = conditional_witness(rg, player, strat, opp, reach[chosen],
                                  compare);
    if (!mu)
      throw std::logic_error("lem:Pearce belief missing at a reachable set");
    std::vector<Rat> level(opp.size(), Rat::zero());
    for (std::size_t q = 0; q < reach[chosen].size(); ++q)
      level[reach[chosen][q]] = (*mu)[q];
    out.levels.push_back(std::move(level));
  }

  std::vector<int> uncovered;
  for (int a = 0; a < opp.size(); ++a)
    if (!covered({a})) uncovered.push_back(a);
  if (!uncovered.empty()) {
    std::vector<Rat> level(opp.size(), Rat::zero());
    Rat u = Rat(1) / Rat(static_cast<long long>(uncovered.size()));
    for (int a : uncovered) level[a] = u;
    out.levels.push_back(std::move(level));
  }
  if (out.levels.empty()) out = Lps::uniform(opp.size());
  return out;
}

Lps weak_witness_lps(const ReducedGame& rg, int player, int strat,
                     const OppProfiles& opp) {
  if (dominated_by_mixed(rg.game, player, strat, opp, DomMode::Weak))
    throw std::invalid_argument(
        "strategy is weakly dominated on the given sets");
  auto wit = best_response_witness(rg.game, player, strat, opp,
                                   SupportMode::Full);
  if (!wit) throw std::logic_error("undominated strategy lost its witness");
  Lps out;
  out.carrier_size = opp.size();
  out.levels.push_back(wit->weights);
  return out;
}

// ---------------------------------------------------------------------------
// Time-indexed structures

int ExtEpistemicStructure::state_index(const std::string& label) const {
  for (int w = 0; w < num_states(); ++w)
    if (state_labels[w] == label) return w;
  return -1;
}

int ExtEpistemicStructure::node_at(int state, int time) const {
  auto path = rg.path_of(strat[state]);
  std::size_t idx = std::min<std::size_t>(time, path.size() - 1);
  return path[idx];
}

namespace {

std::vector<Profile> profiles_of_sets(const NormalFormGame& g,
                                      const StrategySets& sets) {
  std::vector<Profile> out;
  Profile cur(g.num_players());
  std::vector<std::size_t> pos(g.num_players(), 0);
  for (int p = 0; p < g.num_players(); ++p)
    if (sets[p].empty()) return out;
  while (true) {
    for (int p = 0; p < g.num_players(); ++p) cur[p] = sets[p][pos[p]];
    out.push_back(cur);
    int p = g.num_players() - 1;
    while (p >= 0 && ++pos[p] == sets[p].size()) pos[p--] = 0;
    if (p < 0) break;
  }
  return out;
}

struct LevelIndex {
  std::vector<std::vector<Profile>> profiles;
  std::vector<int> offset;
  int total = 0;
  int players = 0;

  int state_of(int h, int mid, const Profile& prof) const {
    const auto& profs = profiles[h];
    for (std::size_t q = 0; q < profs.size(); ++q)
      if (profs[q] == prof)
        return offset[h] + mid * static_cast<int>(profs.size()) +
               static_cast<int>(q);
    throw std::logic_error("state_of: profile missing at level");
  }
};

LevelIndex index_levels(const NormalFormGame& g, int k,
                        const std::vector<StrategySets>& rounds_sat) {
  LevelIndex li;
  li.players = g.num_players();
  for (int h = 0; h <= k; ++h)
    li.profiles.push_back(profiles_of_sets(g, rounds_sat[h]));
  int id = 0;
  for (int h = 0; h <= k; ++h) {
    li.offset.push_back(id);
    id += g.num_players() * static_cast<int>(li.profiles[h].size());
  }
  li.total = id;
  return li;
}

// Core belief over opponent reduced profiles plus the target level.
struct Core {
  Lps lps;          // over the full opponent-profile enumeration
  int target = 0;   // level of the targeted middle-j states
};

ExtEpistemicStructure build_variant(const ExtensiveFormGame& g, int k,
                                    bool weak) {
  if (k < 0) throw std::invalid_argument("structure bound k must be >= 0");
  ExtEpistemicStructure s;
  s.rg = reduce(g);
  const NormalFormGame& ng = s.rg.game;
  s.kind = weak ? "efr-weak" : "efr";
  s.bound = k;
  s.horizon = g.max_depth();

  std::vector<StrategySets> rounds_sat;
  int fixpoint;
  if (weak) {
    DeletionTrace trace = iterate_deletion(ng, DomMode::Weak);
    for (int h = 0; h <= k + 1; ++h) rounds_sat.push_back(trace.at_round(h));
    fixpoint = trace.fixpoint_round;
  } else {
    NcdTrace trace = iterate_ncd(s.rg);
    for (int h = 0; h <= k + 1; ++h) rounds_sat.push_back(trace.at_round(h));
    fixpoint = trace.fixpoint_round;
  }
  auto survives = [&](int p, int strat, int h) {
    int eff = std::min(h, static_cast<int>(rounds_sat.size()) - 1);
    for (int x : rounds_sat[eff][p])
      if (x == strat) return true;
    return false;
  };

  LevelIndex li = index_levels(ng, k, rounds_sat);
  for (int h = 0; h <= k; ++h)
    for (int mid = 0; mid < ng.num_players(); ++mid)
      for (const Profile& prof : li.profiles[h]) {
        s.state_labels.push_back(built_state_label(ng, h, mid, prof));
        s.strat.push_back(prof);
      }

  std::vector<OppProfiles> full_opp(ng.num_players());
  for (int j = 0; j < ng.num_players(); ++j)
    full_opp[j] = OppProfiles::enumerate_full(ng, j);

  // Witness LPS of round h for (j, s), over the full opponent enumeration
  // (restricted rounds embed by zero padding).
  std::map<std::tuple<int, int, int>, Lps> witness_cache;
  auto witness = [&](int j, int snum, int h) -> const Lps& {
    int eff = std::min(h, fixpoint + 1);
    auto key = std::make_tuple(j, snum, eff);
    auto it = witness_cache.find(key);
    if (it != witness_cache.end()) return it->second;
    OppProfiles opp = OppProfiles::enumerate(ng, j, rounds_sat[eff - 1]);
    Lps local = weak ? weak_witness_lps(s.rg, j, snum, opp)
                     : witness_lps(s.rg, j, snum, opp);
    // re-index onto the full enumeration
    Lps embedded;
    embedded.carrier_size = full_opp[j].size();
    for (const auto& level : local.levels) {
      std::vector<Rat> row(full_opp[j].size(), Rat::zero());
      for (int q = 0; q < opp.size(); ++q) {
        if (level[q].is_zero()) continue;
        row[full_opp[j].index_of(opp.items[q])] = level[q];
      }
      embedded.levels.push_back(std::move(row));
    }
    return witness_cache.emplace(key, std::move(embedded)).first->second;
  };

  auto uniform_core = [&](int j) {
    return Lps::uniform(full_opp[j].size());
  };

  auto core_for = [&](int j, int h, int mid, const Profile& prof) -> Core {
    int snum = prof[j];
    if (h >= 1) {
      if (mid == j && survives(j, snum, h + 1))
        return {witness(j, snum, h + 1), h};
      return {witness(j, snum, h), h - 1};
    }
    if (survives(j, snum, 1)) return {witness(j, snum, 1), 0};
    return {uniform_core(j), 0};
  };

  const int porch = s.horizon + 1;
  s.beliefs.assign(ng.num_players(),
                   std::vector<std::vector<Lps>>(
                       li.total, std::vector<Lps>(porch)));

  for (int h = 0; h <= k; ++h) {
    for (int mid = 0; mid < ng.num_players(); ++mid) {
      for (const Profile& prof : li.profiles[h]) {
        int w = li.state_of(h, mid, prof);
        auto path = s.rg.path_of(prof);
        for (int j = 0; j < ng.num_players(); ++j) {
          Core core = core_for(j, h, mid, prof);
          int snum = prof[j];
          // Beliefs change only when j moves; otherwise they are copied
          // verbatim from the previous step (respects-conditioning).
          int last_move = -1;
          for (int m = 0; m < porch; ++m) {
            bool moves_now =
                m < static_cast<int>(path.size()) &&
                !s.rg.tree.nodes[path[m]].children.empty() &&
                s.rg.tree.nodes[path[m]].mover == j;
            if (moves_now) last_move = m;
            if (m > 0 && !moves_now) {
              s.beliefs[j][w][m] = s.beliefs[j][w][m - 1];
              continue;
            }
            Lps conditioned = core.lps;
            int infoset = -1;
            if (last_move >= 0) {
              infoset = s.rg.tree.infoset_of(j, path[last_move]);
              std::vector<int> r =
                  reach_set(s.rg, j, snum, infoset, full_opp[j]);
              conditioned = condition(core.lps, r);
            }
            // Extend over (state, time) atoms; each profile lands at the
            // time its own path enters the conditioning set (time 0 when
            // unconditioned).
            Lps ext;
            ext.carrier_size = li.total * porch;
            for (const auto& level : conditioned.levels) {
              std::vector<Rat> row(ext.carrier_size, Rat::zero());
              for (int q = 0; q < full_opp[j].size(); ++q) {
                if (level[q].is_zero()) continue;
                Profile target =
                    combine(full_opp[j].items[q], j, snum);
                int tstate = li.state_of(core.target, j, target);
                int ttime = 0;
                if (infoset >= 0)
                  ttime = s.rg.reach_time(target, j, infoset);
                row[tstate * porch + ttime] = level[q];
              }
              ext.levels.push_back(std::move(row));
            }
            s.beliefs[j][w][m] = std::move(ext);
          }
        }
      }
    }
  }
  return s;
}

}  // namespace

ExtEpistemicStructure build_efr_structure(const ExtensiveFormGame& g, int k) {
  return build_variant(g, k, false);
}

ExtEpistemicStructure build_efr_structure_weak(const ExtensiveFormGame& g,
                                               int k) {
  return build_variant(g, k, true);
}

// ---------------------------------------------------------------------------
// Appropriateness and conditioning checks

namespace {

bool same_lps(const Lps& a, const Lps& b) { return a == b; }

}  // namespace

std::vector<ExtViolation> check_appropriate_ext(
    const ExtEpistemicStructure& s) {
  std::vector<ExtViolation> out;
  const int n = s.num_players();
  const int states = s.num_states();
  const int porch = s.horizon + 1;
  const int atoms = states * porch;

  for (int p = 0; p < n; ++p) {
    for (int w = 0; w < states; ++w) {
      for (int m = 0; m < porch; ++m) {
        const Lps& lps = s.beliefs[p][w][m];
        if (lps.carrier_size != atoms || !validate_lps(lps).empty()) {
          out.push_back({1, p, w, m, "belief is not an LPS over state-times"});
          continue;
        }
        // Condition 2: own strategy certain at every level.
        for (int h = 0; h < lps.length(); ++h) {
          Rat mass;
          for (int a = 0; a < atoms; ++a) {
            if (lps.levels[h][a].is_zero()) continue;
            if (s.strat[a / porch][p] == s.strat[w][p])
              mass += lps.levels[h][a];
          }
          if (mass != Rat::one()) {
            out.push_back({2, p, w, m, "own-strategy mass " + mass.str() +
                                           " at level " + std::to_string(h)});
            break;
          }
        }
        // Condition 4: top-level certainty of the own LPS.
        Rat same;
        for (int a = 0; a < atoms; ++a) {
          if (lps.levels[0][a].is_zero()) continue;
          if (same_lps(s.beliefs[p][a / porch][a % porch], lps))
            same += lps.levels[0][a];
        }
        if (same != Rat::one())
          out.push_back({4, p, w, m, "own-belief mass " + same.str()});
        // Condition 5.
        int v = s.node_at(w, m);
        int I = s.rg.tree.nodes[v].children.empty()
                    ? -1
                    : (s.rg.tree.nodes[v].mover == p
                           ? s.rg.tree.infoset_of(p, v)
                           : -1);
        if (I >= 0) {
          for (int h = 0; h < lps.length(); ++h) {
            Rat mass;
            for (int a = 0; a < atoms; ++a) {
              if (lps.levels[h][a].is_zero()) continue;
              int node = s.node_at(a / porch, a % porch);
              if (s.rg.tree.infoset_of(p, node) == I &&
                  !s.rg.tree.nodes[node].children.empty() &&
                  s.rg.tree.nodes[node].mover == p)
                mass += lps.levels[h][a];
            }
            if (mass != Rat::one()) {
              out.push_back({5, p, w, m,
                             "information-set mass " + mass.str() +
                                 " at level " + std::to_string(h)});
              break;
            }
          }
        }
        if (m == 0) {
          for (int h = 0; h < lps.length(); ++h) {
            Rat mass;
            for (int a = 0; a < atoms; ++a)
              if (!lps.levels[h][a].is_zero() && a % porch == 0)
                mass += lps.levels[h][a];
            if (mass != Rat::one()) {
              out.push_back({5, p, w, 0,
                             "time-zero mass " + mass.str() + " at level " +
                                 std::to_string(h)});
              break;
            }
          }
        }
      }
      // Condition 6, the all-profiles reading; the detail records whether a
      // violating profile is even consistent with the state's history.
      const OppProfiles opp = OppProfiles::enumerate_full(s.rg.game, p);
      for (int m = 0; m + 1 < porch; ++m) {
        for (int q = 0; q < opp.size(); ++q) {
          auto positive = [&](const Lps& lps) {
            for (const auto& level : lps.levels)
              for (int a = 0; a < atoms; ++a) {
                if (level[a].is_zero()) continue;
                const Profile& tau = s.strat[a / porch];
                bool match = true;
                for (int p2 = 0; p2 < n; ++p2)
                  if (p2 != p && tau[p2] != opp.items[q][p2]) {
                    match = false;
                    break;
                  }
                if (match) return true;
              }
            return false;
          };
          if (positive(s.beliefs[p][w][m + 1]) &&
              !positive(s.beliefs[p][w][m])) {
            Profile full = combine(opp.items[q], p, s.strat[w][p]);
            int node = s.node_at(w, m + 1);
            bool consistent =
                s.rg.tree.nodes[node].children.empty() ||
                s.rg.reaches(full, s.rg.tree.nodes[node].mover,
                             s.rg.tree.infoset_of(s.rg.tree.nodes[node].mover,
                                                  node));
            out.push_back({6, p, w, m,
                           std::string("support grew between times; the new "
                                       "profile is ") +
                               (consistent ? "history-consistent"
                                           : "history-inconsistent")});
          }
        }
      }
    }
  }
  return out;
}

std::vector<ExtViolation> check_respects_conditioning(
    const ExtEpistemicStructure& s) {
  std::vector<ExtViolation> out;
  const int n = s.num_players();
  const int porch = s.horizon + 1;
  for (int p = 0; p < n; ++p) {
    for (int w = 0; w < s.num_states(); ++w) {
      for (int m = 1; m < porch; ++m) {
        int v = s.node_at(w, m);
        bool moves = !s.rg.tree.nodes[v].children.empty() &&
                     s.rg.tree.nodes[v].mover == p;
        if (!moves) {
          if (!(s.beliefs[p][w][m] == s.beliefs[p][w][m - 1]))
            out.push_back({0, p, w, m, "belief changed without a move"});
          continue;
        }
        int I = s.rg.tree.infoset_of(p, v);
        // Project both LPSs onto states and compare after conditioning the
        // earlier one on the states whose play reaches I.
        auto project = [&](const Lps& lps) {
          Lps st;
          st.carrier_size = s.num_states();
          for (const auto& level : lps.levels) {
            std::vector<Rat> row(s.num_states(), Rat::zero());
            for (int a = 0; a < lps.carrier_size; ++a)
              if (!level[a].is_zero()) row[a / porch] += level[a];
            st.levels.push_back(std::move(row));
          }
          return st;
        };
        std::vector<int> reach_states;
        for (int w2 = 0; w2 < s.num_states(); ++w2)
          if (s.rg.reaches(s.strat[w2], p, I)) reach_states.push_back(w2);
        Lps before = project(s.beliefs[p][w][m - 1]);
        Lps after = project(s.beliefs[p][w][m]);
        if (before.is_null(reach_states)) {
          out.push_back({0, p, w, m,
                         "conditioning event is null in the prior belief"});
          continue;
        }
        if (!(condition(before, reach_states) == after))
          out.push_back({0, p, w, m, "belief is not the conditioned prior"});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Extensive-form evaluation

namespace {

struct AtomKey {
  const Formula* f;
  int atom;
  bool operator==(const AtomKey&) const = default;
};
struct AtomKeyHash {
  std::size_t operator()(const AtomKey& k) const {
    return std::hash<const Formula*>()(k.f) * 1000003u +
           static_cast<std::size_t>(k.atom);
  }
};

class ExtEvaluator {
 public:
  ExtEvaluator(const ExtEpistemicStructure& s, const DiamondOracle& oracle,
               EvalTrace* trace)
      : s_(s), oracle_(oracle), trace_(trace), porch_(s.horizon + 1) {}

  bool ev(int state, int time, const FormulaPtr& f) {
    AtomKey key{f.get(), s_.atom(state, time)};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool value = compute(state, time, f);
    memo_.emplace(key, value);
    return value;
  }

 private:
  void note(const std::string& line) {
    if (trace_) trace_->lines.push_back(line);
  }

  const std::vector<char>& event(const FormulaPtr& f) {
    auto it = event_.find(f.get());
    if (it != event_.end()) return it->second;
    std::vector<char> v(s_.num_states() * porch_);
    for (int w = 0; w < s_.num_states(); ++w)
      for (int m = 0; m < porch_; ++m)
        v[s_.atom(w, m)] = ev(w, m, f) ? 1 : 0;
    return event_.emplace(f.get(), std::move(v)).first->second;
  }

  const FormulaPtr& expansion(const FormulaPtr& f) {
    auto it = expansion_.find(f.get());
    if (it != expansion_.end()) return it->second;
    return expansion_.emplace(f.get(), expand_macro(*f, s_.rg.game))
        .first->second;
  }

  Rat mass_at(const std::vector<Rat>& level, const std::vector<char>& ev) {
    Rat total;
    for (std::size_t a = 0; a < level.size(); ++a)
      if (ev[a] && !level[a].is_zero()) total += level[a];
    return total;
  }

  bool certain(const Lps& lps, const std::vector<char>& ev) {
    for (const auto& level : lps.levels)
      if (mass_at(level, ev) != Rat::one()) return false;
    return true;
  }

  bool positive_somewhere(const Lps& lps, const std::vector<char>& ev) {
    for (const auto& level : lps.levels)
      if (mass_at(level, ev).is_positive()) return true;
    return false;
  }

  std::vector<char> play_pairs(int except, const Profile& opp) {
    std::vector<char> v(s_.num_states() * porch_, 0);
    for (int w = 0; w < s_.num_states(); ++w) {
      bool match = true;
      for (int p = 0; p < s_.num_players(); ++p)
        if (p != except && s_.strat[w][p] != opp[p]) { match = false; break; }
      if (!match) continue;
      for (int m = 0; m < porch_; ++m) v[s_.atom(w, m)] = 1;
    }
    return v;
  }

  bool rat_at(int player, int state, int time) {
    int v = s_.node_at(state, time);
    const auto& node = s_.rg.tree.nodes[v];
    if (node.children.empty() || node.mover != player) return true;
    int I = s_.rg.tree.infoset_of(player, v);
    const Lps& lps = s_.beliefs[player][state][time];
    // Project the top level onto opponent reduced profiles.
    OppProfiles opp = OppProfiles::enumerate_full(s_.rg.game, player);
    std::vector<Rat> mu(opp.size(), Rat::zero());
    for (int a = 0; a < lps.carrier_size; ++a) {
      if (lps.levels[0][a].is_zero()) continue;
      mu[opp.index_of(s_.strat[a / porch_])] += lps.levels[0][a];
    }
    int mine = s_.strat[state][player];
    Rat eu_mine;
    for (int q = 0; q < opp.size(); ++q)
      if (!mu[q].is_zero())
        eu_mine += mu[q] * s_.rg.game.payoff(
                               player, combine(opp.items[q], player, mine));
    for (int other = 0; other < s_.rg.game.num_strategies(player); ++other) {
      if (other == mine) continue;
      if (!s_.rg.agrees_above(player, other, mine, I)) continue;
      Rat eu;
      for (int q = 0; q < opp.size(); ++q)
        if (!mu[q].is_zero())
          eu += mu[q] * s_.rg.game.payoff(
                            player, combine(opp.items[q], player, other));
      if (eu > eu_mine) return false;
    }
    return true;
  }

  bool eval_o(int state, int time, const Formula& o) {
    if (o.children.size() != 1)
      throw std::invalid_argument(
          "generalized O is not defined for extensive-form structures here");
    const int i = o.player;
    const Lps& lps = s_.beliefs[i][state][time];
    if (!certain(lps, event(o.children[0]))) return false;
    OppProfiles opp = OppProfiles::enumerate_full(s_.rg.game, i);
    for (int q = 0; q < opp.size(); ++q) {
      std::vector<FormulaPtr> atoms;
      for (int p = 0; p < s_.num_players(); ++p)
        if (p != i) atoms.push_back(f_play(p, opp.items[q][p]));
      FormulaPtr psi = f_and_all(std::move(atoms));
      DiamondAnswer guard = oracle_.query(f_and(o.children[0], psi));
      if (guard == DiamondAnswer::Unknown)
        throw DiamondUndecided(formula_to_string(s_.rg.game, psi));
      if (guard == DiamondAnswer::Unsat) continue;
      std::vector<char> pe = play_pairs(i, opp.items[q]);
      bool ok = o.prime ? mass_at(lps.levels[0], pe).is_positive()
                        : positive_somewhere(lps, pe);
      if (!ok) return false;
    }
    return true;
  }

  bool compute(int state, int time, const FormulaPtr& f) {
    switch (f->tag) {
      case Formula::Tag::True:
        return true;
      case Formula::Tag::Play:
        return s_.strat[state][f->player] == f->strat;
      case Formula::Tag::RatAtom:
        return rat_at(f->player, state, time);
      case Formula::Tag::Not:
        return !ev(state, time, f->children[0]);
      case Formula::Tag::And:
        return ev(state, time, f->children[0]) &&
               ev(state, time, f->children[1]);
      case Formula::Tag::B: {
        if (f->children.size() != 1)
          throw std::invalid_argument(
              "generalized B is not defined for extensive-form structures "
              "here");
        return certain(s_.beliefs[f->player][state][time],
                       event(f->children[0]));
      }
      case Formula::Tag::PB:
        return positive_somewhere(s_.beliefs[f->player][state][time],
                                  event(f->children[0]));
      case Formula::Tag::O:
        return eval_o(state, time, *f);
      case Formula::Tag::Diamond: {
        DiamondAnswer a = oracle_.query(f->children[0]);
        if (a == DiamondAnswer::Unknown)
          throw DiamondUndecided(
              formula_to_string(s_.rg.game, f->children[0]));
        return a == DiamondAnswer::Sat;
      }
      case Formula::Tag::Init:
        return ev(state, 0, f->children[0]);
      case Formula::Tag::G: {
        for (int m = time; m < porch_; ++m)
          if (!ev(state, m, f->children[0])) return false;
        return true;
      }
      case Formula::Tag::Macro:
        return ev(state, time, expansion(f));
      case Formula::Tag::Bd:
      case Formula::Tag::PBd:
      case Formula::Tag::Od:
        throw std::invalid_argument(
            "approximate operators are not defined for extensive-form "
            "structures");
    }
    throw std::logic_error("unhandled formula tag");
  }

  const ExtEpistemicStructure& s_;
  const DiamondOracle& oracle_;
  EvalTrace* trace_;
  int porch_;
  std::unordered_map<AtomKey, bool, AtomKeyHash> memo_;
  std::map<const Formula*, std::vector<char>> event_;
  std::map<const Formula*, FormulaPtr> expansion_;
};

}  // namespace

bool eval_efr(const ExtEpistemicStructure& s, int state, int time,
              const FormulaPtr& f, const DiamondOracle& oracle,
              EvalTrace* trace) {
  if (state < 0 || state >= s.num_states())
    throw std::invalid_argument("state index out of range");
  if (time < 0 || time > s.horizon)
    throw std::invalid_argument("time out of range");
  ExtEvaluator e(s, oracle, trace);
  return e.ev(state, time, f);
}

struct EvalSessionExt::Impl {
  const ExtEpistemicStructure& s;
  ExtEvaluator evaluator;
  std::vector<FormulaPtr> pinned;  // roots must outlive the address-keyed memo
  Impl(const ExtEpistemicStructure& s_, const DiamondOracle& oracle,
       EvalTrace* trace)
      : s(s_), evaluator(s_, oracle, trace) {}
};

EvalSessionExt::EvalSessionExt(const ExtEpistemicStructure& s,
                               const DiamondOracle& oracle, EvalTrace* trace)
    : impl_(std::make_unique<Impl>(s, oracle, trace)) {}

EvalSessionExt::~EvalSessionExt() = default;
EvalSessionExt::EvalSessionExt(EvalSessionExt&&) noexcept = default;

bool EvalSessionExt::ev(int state, int time, const FormulaPtr& f) {
  if (state < 0 || state >= impl_->s.num_states())
    throw std::invalid_argument("state index out of range");
  if (time < 0 || time > impl_->s.horizon)
    throw std::invalid_argument("time out of range");
  impl_->pinned.push_back(f);
  return impl_->evaluator.ev(state, time, f);
}

DiamondOracle make_efr_oracle(const ReducedGame& rg) {
  DiamondOracle oracle(rg.game);
  NcdTrace ncd = iterate_ncd(rg);
  oracle.set_ncd_rounds(ncd.rounds);
  return oracle;
}

// ---------------------------------------------------------------------------
// JSON

namespace {
// Ordered documents: the tree's action declaration order is semantic (it
// fixes the canonical strategy order), so round-trips must preserve it.
using json = nlohmann::ordered_json;
}

ExtensiveFormGame extensive_from_json_text(const std::string& text) {
  json doc = json::parse(text);
  ExtensiveFormGame g;
  for (const auto& p : doc.at("players")) {
    if (p.is_string())
      g.players.push_back(p.get<std::string>());
    else
      g.players.push_back(std::to_string(p.get<long long>()));
  }
  std::map<long long, int> id_map;
  for (const auto& nd : doc.at("nodes"))
    id_map.emplace(nd.at("id").get<long long>(),
                   static_cast<int>(id_map.size()));
  g.nodes.resize(id_map.size());
  for (const auto& nd : doc.at("nodes")) {
    int v = id_map.at(nd.at("id").get<long long>());
    auto& node = g.nodes[v];
    if (nd.contains("children")) {
      std::string mover = nd.at("mover").is_string()
                              ? nd.at("mover").get<std::string>()
                              : std::to_string(nd.at("mover").get<long long>());
      node.mover = -1;
      for (int p = 0; p < g.num_players(); ++p)
        if (g.players[p] == mover) node.mover = p;
      if (node.mover < 0)
        throw std::runtime_error("unknown mover " + mover);
      for (auto it = nd.at("children").begin(); it != nd.at("children").end();
           ++it) {
        int c = id_map.at(it.value().get<long long>());
        node.children.push_back({it.key(), c});
        g.nodes[c].parent = v;
      }
    } else {
      const auto& u = nd.at("payoffs");
      for (int p = 0; p < g.num_players(); ++p) {
        const auto& val = u.at(g.players[p]);
        if (val.is_number_integer()) {
          node.payoffs.push_back(Rat(val.get<long long>()));
        } else {
          auto r = Rat::parse(val.get<std::string>());
          if (!r) throw std::runtime_error("bad payoff");
          node.payoffs.push_back(*r);
        }
      }
    }
  }
  // depths
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    int d = 0, cur = static_cast<int>(v);
    while (g.nodes[cur].parent >= 0) {
      ++d;
      cur = g.nodes[cur].parent;
    }
    g.nodes[v].depth = d;
  }
  g.infosets.assign(g.num_players(), {});
  if (doc.contains("infosets")) {
    for (int p = 0; p < g.num_players(); ++p) {
      if (!doc.at("infosets").contains(g.players[p])) continue;
      for (const auto& iset : doc.at("infosets").at(g.players[p])) {
        std::vector<int> nodes;
        for (const auto& id : iset)
          nodes.push_back(id_map.at(id.get<long long>()));
        g.infosets[p].push_back(std::move(nodes));
      }
    }
  }
  // singleton sets for uncovered decision nodes
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    const auto& node = g.nodes[v];
    if (node.children.empty()) continue;
    if (g.infoset_of(node.mover, static_cast<int>(v)) < 0)
      g.infosets[node.mover].push_back({static_cast<int>(v)});
  }
  return g;
}

ExtensiveFormGame extensive_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return extensive_from_json_text(ss.str());
}

std::string extensive_to_json_text(const ExtensiveFormGame& g) {
  json doc;
  doc["players"] = g.players;
  json nodes = json::array();
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    json nd;
    nd["id"] = v;
    const auto& node = g.nodes[v];
    if (node.children.empty()) {
      json u = json::object();
      for (int p = 0; p < g.num_players(); ++p)
        u[g.players[p]] = node.payoffs[p].str();
      nd["payoffs"] = u;
    } else {
      nd["mover"] = g.players[node.mover];
      json ch = json::object();
      for (const auto& [a, c] : node.children) ch[a] = c;
      nd["children"] = ch;
    }
    nodes.push_back(nd);
  }
  doc["nodes"] = nodes;
  json infosets = json::object();
  for (int p = 0; p < g.num_players(); ++p) {
    json sets = json::array();
    for (const auto& iset : g.infosets[p]) sets.push_back(iset);
    infosets[g.players[p]] = sets;
  }
  doc["infosets"] = infosets;
  return doc.dump(2) + "\n";
}

std::string ext_structure_to_json_text(const ExtEpistemicStructure& s) {
  json doc;
  doc["kind"] = s.kind;
  doc["k"] = s.bound;
  doc["horizon"] = s.horizon;
  doc["game"] = json::parse(extensive_to_json_text(s.rg.tree));
  json states = json::array();
  for (int w = 0; w < s.num_states(); ++w) {
    json entry;
    entry["label"] = s.state_labels[w];
    json strat = json::object();
    for (int p = 0; p < s.num_players(); ++p)
      strat[s.rg.game.players[p]] =
          s.rg.game.strategies[p][s.strat[w][p]];
    entry["strat"] = strat;
    states.push_back(entry);
  }
  doc["states"] = states;
  json beliefs = json::object();
  const int porch = s.horizon + 1;
  for (int p = 0; p < s.num_players(); ++p) {
    json per_state = json::object();
    for (int w = 0; w < s.num_states(); ++w) {
      json per_time = json::object();
      for (int m = 0; m < porch; ++m) {
        json levels = json::array();
        for (const auto& level : s.beliefs[p][w][m].levels) {
          json entry = json::object();
          for (int a = 0; a < s.beliefs[p][w][m].carrier_size; ++a)
            if (!level[a].is_zero())
              entry[s.state_labels[a / porch] + "@" +
                    std::to_string(a % porch)] = level[a].str();
          levels.push_back(entry);
        }
        per_time[std::to_string(m)] = levels;
      }
      per_state[s.state_labels[w]] = per_time;
    }
    beliefs[s.rg.game.players[p]] = per_state;
  }
  doc["beliefs"] = beliefs;
  return doc.dump(2) + "\n";
}

}  // namespace egt

namespace egt {

ExtEpistemicStructure ext_structure_from_json_text(const std::string& text) {
  json doc = json::parse(text);
  ExtEpistemicStructure s;
  s.kind = doc.at("kind").get<std::string>();
  s.bound = doc.value("k", 0);
  s.horizon = doc.at("horizon").get<int>();
  s.rg = reduce(extensive_from_json_text(doc.at("game").dump()));
  for (const auto& entry : doc.at("states")) {
    s.state_labels.push_back(entry.at("label").get<std::string>());
    Profile prof(s.rg.game.num_players());
    for (int p = 0; p < s.rg.game.num_players(); ++p) {
      std::string label =
          entry.at("strat").at(s.rg.game.players[p]).get<std::string>();
      int idx = s.rg.game.strategy_index(p, label);
      if (idx < 0) throw std::runtime_error("unknown strategy " + label);
      prof[p] = idx;
    }
    s.strat.push_back(prof);
  }
  const int states = s.num_states();
  const int porch = s.horizon + 1;
  s.beliefs.assign(s.rg.game.num_players(),
                   std::vector<std::vector<Lps>>(states,
                                                 std::vector<Lps>(porch)));
  for (int p = 0; p < s.rg.game.num_players(); ++p) {
    const auto& per_state = doc.at("beliefs").at(s.rg.game.players[p]);
    for (int w = 0; w < states; ++w) {
      const auto& per_time = per_state.at(s.state_labels[w]);
      for (int m = 0; m < porch; ++m) {
        const auto& levels = per_time.at(std::to_string(m));
        Lps lps;
        lps.carrier_size = states * porch;
        for (const auto& level : levels) {
          std::vector<Rat> weights(lps.carrier_size, Rat::zero());
          for (auto it = level.begin(); it != level.end(); ++it) {
            std::string key = it.key();
            auto at = key.rfind('@');
            if (at == std::string::npos)
              throw std::runtime_error("bad state-time key " + key);
            int w2 = s.state_index(key.substr(0, at));
            int m2 = std::stoi(key.substr(at + 1));
            if (w2 < 0 || m2 < 0 || m2 > s.horizon)
              throw std::runtime_error("unknown state-time " + key);
            auto r = Rat::parse(it.value().get<std::string>());
            if (!r) throw std::runtime_error("bad weight");
            weights[w2 * porch + m2] = *r;
          }
          lps.levels.push_back(std::move(weights));
        }
        if (lps.levels.empty())
          throw std::runtime_error("empty LPS in extensive structure");
        s.beliefs[p][w][m] = std::move(lps);
      }
    }
  }
  return s;
}

ExtEpistemicStructure ext_structure_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ext_structure_from_json_text(ss.str());
}

}  // namespace egt
