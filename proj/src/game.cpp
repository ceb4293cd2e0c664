#include "egt/game.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace egt {

long long NormalFormGame::num_profiles() const {
  long long n = 1;
  for (const auto& s : strategies) n *= static_cast<long long>(s.size());
  return n;
}

long long NormalFormGame::profile_index(const Profile& s) const {
  long long idx = 0;
  for (int p = 0; p < num_players(); ++p) idx = idx * num_strategies(p) + s[p];
  return idx;
}

Profile NormalFormGame::profile_at(long long index) const {
  Profile s(num_players());
  for (int p = num_players() - 1; p >= 0; --p) {
    s[p] = static_cast<int>(index % num_strategies(p));
    index /= num_strategies(p);
  }
  return s;
}

const Rat& NormalFormGame::payoff(int player, const Profile& s) const {
  return payoffs[profile_index(s)][player];
}

int NormalFormGame::strategy_index(int player, const std::string& label) const {
  const auto& v = strategies[player];
  for (int k = 0; k < static_cast<int>(v.size()); ++k)
    if (v[k] == label) return k;
  return -1;
}

std::string NormalFormGame::profile_label(const Profile& s) const {
  std::string out = "(";
  for (int p = 0; p < num_players(); ++p) {
    if (p) out += ",";
    out += s[p] >= 0 ? strategies[p][s[p]] : "*";
  }
  return out + ")";
}

StrategySets NormalFormGame::full_sets() const {
  StrategySets sets(num_players());
  for (int p = 0; p < num_players(); ++p)
    for (int k = 0; k < num_strategies(p); ++k) sets[p].push_back(k);
  return sets;
}

bool MixedStrategy::is_pure() const { return pure_index() >= 0; }

int MixedStrategy::pure_index() const {
  int idx = -1;
  for (int k = 0; k < static_cast<int>(weights.size()); ++k) {
    if (weights[k].is_zero()) continue;
    if (weights[k] != Rat::one()) return -1;
    if (idx >= 0) return -1;
    idx = k;
  }
  return idx;
}

OppProfiles OppProfiles::enumerate(const NormalFormGame& g, int player,
                                   const StrategySets& sets) {
  OppProfiles out;
  out.player = player;
  Profile cur(g.num_players(), -1);
  // Mixed-radix enumeration over players != player in ascending order.
  std::vector<int> opp_players;
  for (int p = 0; p < g.num_players(); ++p)
    if (p != player) opp_players.push_back(p);
  std::vector<std::size_t> pos(opp_players.size(), 0);
  for (int p : opp_players)
    if (sets[p].empty()) return out;
  while (true) {
    for (std::size_t k = 0; k < opp_players.size(); ++k)
      cur[opp_players[k]] = sets[opp_players[k]][pos[k]];
    out.items.push_back(cur);
    int k = static_cast<int>(opp_players.size()) - 1;
    while (k >= 0 && ++pos[k] == sets[opp_players[k]].size()) pos[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

OppProfiles OppProfiles::enumerate_full(const NormalFormGame& g, int player) {
  return enumerate(g, player, g.full_sets());
}

int OppProfiles::index_of(const Profile& opp) const {
  for (int k = 0; k < size(); ++k) {
    bool same = true;
    for (std::size_t p = 0; p < opp.size(); ++p) {
      if (static_cast<int>(p) == player) continue;
      if (items[k][p] != opp[p]) { same = false; break; }
    }
    if (same) return k;
  }
  return -1;
}

Profile combine(const Profile& opp, int player, int strat) {
  Profile s = opp;
  s[player] = strat;
  return s;
}

Rat Belief::weight_of(const Profile& opp) const {
  int k = support.index_of(opp);
  return k >= 0 ? weights[k] : Rat::zero();
}

Rat expected_utility(const NormalFormGame& g, int player, int strat,
                     const Belief& belief) {
  Rat eu;
  for (int k = 0; k < belief.support.size(); ++k) {
    if (belief.weights[k].is_zero()) continue;
    eu += belief.weights[k] *
          g.payoff(player, combine(belief.support.items[k], player, strat));
  }
  return eu;
}

Rat mixed_payoff(const NormalFormGame& g, const MixedStrategy& mix,
                 const Profile& opp) {
  Rat u;
  for (int k = 0; k < static_cast<int>(mix.weights.size()); ++k) {
    if (mix.weights[k].is_zero()) continue;
    u += mix.weights[k] * g.payoff(mix.owner, combine(opp, mix.owner, k));
  }
  return u;
}

std::vector<std::string> validate_game(const NormalFormGame& g) {
  std::vector<std::string> report;
  if (g.players.empty()) {
    report.push_back("no players");
    return report;
  }
  if (g.strategies.size() != g.players.size())
    report.push_back("strategy table size does not match player count");
  for (int p = 0; p < static_cast<int>(g.strategies.size()); ++p) {
    if (g.strategies[p].empty())
      report.push_back("empty strategy set for player " + g.players[p]);
    for (int a = 0; a < static_cast<int>(g.strategies[p].size()); ++a)
      for (int b = a + 1; b < static_cast<int>(g.strategies[p].size()); ++b)
        if (g.strategies[p][a] == g.strategies[p][b])
          report.push_back("duplicate strategy label '" + g.strategies[p][a] +
                           "' for player " + g.players[p]);
  }
  if (!report.empty()) return report;

  long long want = g.num_profiles();
  if (static_cast<long long>(g.payoffs.size()) != want) {
    report.push_back("payoff map not total: have " +
                     std::to_string(g.payoffs.size()) + " entries, need " +
                     std::to_string(want));
    return report;
  }
  for (long long idx = 0; idx < want; ++idx) {
    const auto& row = g.payoffs[idx];
    Profile s = g.profile_at(idx);
    if (static_cast<int>(row.size()) != g.num_players()) {
      report.push_back("payoff entry at " + g.profile_label(s) +
                       " missing some player's utility");
      continue;
    }
    for (int p = 0; p < g.num_players(); ++p) {
      if (row[p].is_negative() || row[p] > Rat::one())
        report.push_back("payoff out of [0,1] at " + g.profile_label(s) +
                         " for player " + g.players[p] + ": " + row[p].str());
    }
  }
  return report;
}

namespace {

using nlohmann::json;

Rat rat_from_json(const json& v, const std::string& where) {
  if (v.is_number_integer())
    return Rat(static_cast<long long>(v.get<long long>()));
  if (v.is_string()) {
    auto r = Rat::parse(v.get<std::string>());
    if (r) return *r;
  }
  throw std::runtime_error("bad rational at " + where + ": " + v.dump());
}

}  // namespace

NormalFormGame game_from_json_text(const std::string& text) {
  json doc = json::parse(text);
  NormalFormGame g;
  for (const auto& p : doc.at("players")) {
    if (p.is_string())
      g.players.push_back(p.get<std::string>());
    else
      g.players.push_back(std::to_string(p.get<long long>()));
  }
  const auto& strat = doc.at("strategies");
  for (const auto& p : g.players) {
    if (!strat.contains(p))
      throw std::runtime_error("strategies missing for player " + p);
    std::vector<std::string> labels;
    for (const auto& s : strat.at(p)) labels.push_back(s.get<std::string>());
    g.strategies.push_back(std::move(labels));
  }
  g.payoffs.assign(g.num_profiles(), std::vector<Rat>(g.num_players()));
  std::vector<bool> seen(g.num_profiles(), false);
  for (const auto& entry : doc.at("payoffs")) {
    const auto& prof = entry.at("profile");
    Profile s(g.num_players());
    for (int p = 0; p < g.num_players(); ++p) {
      std::string label = prof.at(g.players[p]).get<std::string>();
      int k = g.strategy_index(p, label);
      if (k < 0)
        throw std::runtime_error("unknown strategy '" + label +
                                 "' for player " + g.players[p]);
      s[p] = k;
    }
    long long idx = g.profile_index(s);
    seen[idx] = true;
    const auto& u = entry.at("u");
    for (int p = 0; p < g.num_players(); ++p)
      g.payoffs[idx][p] =
          rat_from_json(u.at(g.players[p]), "u of " + g.profile_label(s));
  }
  for (long long idx = 0; idx < g.num_profiles(); ++idx)
    if (!seen[idx])
      throw std::runtime_error("payoff missing for profile " +
                               g.profile_label(g.profile_at(idx)));
  return g;
}

NormalFormGame game_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return game_from_json_text(ss.str());
}

std::string game_to_json_text(const NormalFormGame& g) {
  json doc;
  doc["players"] = g.players;
  json strat = json::object();
  for (int p = 0; p < g.num_players(); ++p) strat[g.players[p]] = g.strategies[p];
  doc["strategies"] = strat;
  json payoffs = json::array();
  for (long long idx = 0; idx < g.num_profiles(); ++idx) {
    Profile s = g.profile_at(idx);
    json entry;
    json prof = json::object();
    for (int p = 0; p < g.num_players(); ++p)
      prof[g.players[p]] = g.strategies[p][s[p]];
    entry["profile"] = prof;
    json u = json::object();
    for (int p = 0; p < g.num_players(); ++p)
      u[g.players[p]] = g.payoffs[idx][p].str();
    entry["u"] = u;
    payoffs.push_back(entry);
  }
  doc["payoffs"] = payoffs;
  return doc.dump(2) + "\n";
}

}  // namespace egt
