#include "egt/structures.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace egt {

int EpistemicStructure::state_index(const std::string& label) const {
  for (int k = 0; k < num_states(); ++k)
    if (state_labels[k] == label) return k;
  return -1;
}

std::vector<int> EpistemicStructure::strategy_event(int p, int s) const {
  std::vector<int> out;
  for (int w = 0; w < num_states(); ++w)
    if (strat[w][p] == s) out.push_back(w);
  return out;
}

int EpistemicStructure::max_lps_length() const {
  int len = 0;
  for (const auto& per_player : beliefs)
    for (const auto& lps : per_player) len = std::max(len, lps.length());
  return len;
}

std::string built_state_label(const NormalFormGame& g, int level, int player,
                              const Profile& prof) {
  std::ostringstream os;
  os << "(" << level << "," << (player + 1) << "," << g.profile_label(prof)
     << ")";
  return os.str();
}

namespace {

std::vector<Profile> profiles_of(const NormalFormGame& g,
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

// Shared scaffolding for the level-indexed constructions.
class TowerBuilder {
 public:
  TowerBuilder(const NormalFormGame& g, int k)
      : g_(g), k_(k), trace_(iterate_deletion(g, DomMode::Weak)) {
    for (int h = 0; h <= k_; ++h)
      level_profiles_.push_back(profiles_of(g_, trace_.at_round(h)));
    int id = 0;
    for (int h = 0; h <= k_; ++h) {
      level_offset_.push_back(id);
      id += g_.num_players() * static_cast<int>(level_profiles_[h].size());
    }
    total_states_ = id;
  }

  const NormalFormGame& game() const { return g_; }
  int total_states() const { return total_states_; }
  int num_levels() const { return k_ + 1; }
  const std::vector<Profile>& profiles(int h) const {
    return level_profiles_[h];
  }

  int state_of(int h, int mid, const Profile& prof) const {
    const auto& profs = level_profiles_[h];
    for (std::size_t q = 0; q < profs.size(); ++q)
      if (profs[q] == prof)
        return level_offset_[h] + mid * static_cast<int>(profs.size()) +
               static_cast<int>(q);
    throw std::logic_error("state_of: profile not present at level");
  }

  bool survives(int p, int s, int h) const { return trace_.survives(p, s, h); }

  // Full-support Pearce witness of round h >= 1 for (player, strat).
  const Belief& witness(int p, int s, int h) const {
    int eff = std::min(h, trace_.fixpoint_round + 1);
    auto key = std::make_tuple(p, s, eff);
    auto it = witness_cache_.find(key);
    if (it != witness_cache_.end()) return it->second;
    OppProfiles opp = OppProfiles::enumerate(g_, p, trace_.at_round(eff - 1));
    auto wit = best_response_witness(g_, p, s, opp, SupportMode::Full);
    if (!wit) throw std::logic_error("missing Pearce witness for a survivor");
    return witness_cache_.emplace(key, std::move(*wit)).first->second;
  }

  // Witness of round h for (j, s) extended to a measure over states at level
  // h-1 with middle index j and j's strategy pinned to s.
  std::vector<Rat> tower_level(int j, int s, int h) const {
    std::vector<Rat> out(total_states_, Rat::zero());
    const Belief& w = witness(j, s, h);
    for (int q = 0; q < w.support.size(); ++q) {
      if (w.weights[q].is_zero()) continue;
      Profile full = combine(w.support.items[q], j, s);
      out[state_of(h - 1, j, full)] = w.weights[q];
    }
    return out;
  }

  std::vector<Rat> point_mass(int state) const {
    std::vector<Rat> out(total_states_, Rat::zero());
    out[state] = Rat::one();
    return out;
  }

  // Deterministic level-0 point target for (j, s): the first state of the
  // own-strategy cluster, middle index = j itself or the first player != j.
  int level0_point_target(int j, int s, bool middle_own) const {
    Profile prof(g_.num_players());
    for (int p = 0; p < g_.num_players(); ++p)
      prof[p] = trace_.at_round(0)[p][0];
    prof[j] = s;
    int mid = middle_own ? j : (j == 0 ? 1 : 0);
    return state_of(0, mid, prof);
  }

  // Tower of witness levels (T(from,s), ..., T(1,s)) for player j, strategy s.
  std::vector<std::vector<Rat>> tower(int j, int s, int from) const {
    std::vector<std::vector<Rat>> levels;
    for (int h = from; h >= 1; --h) levels.push_back(tower_level(j, s, h));
    return levels;
  }

  // Player j's belief tower at state (h, mid, prof).  The probability and
  // approximate builders collapse it, the LPS builder keeps it.  Level-0
  // beliefs are forced: witness towers where condition 4 pins them from the
  // level above, deterministic point masses everywhere else (the point masses
  // falsify the coverage clauses, which the higher-level claims rely on).
  std::vector<std::vector<Rat>> belief_tower(int j, int h, int mid,
                                             const Profile& prof) const {
    int s = prof[j];
    if (h >= 1) {
      if (mid == j && survives(j, s, h + 1)) return tower(j, s, h + 1);
      return tower(j, s, h);
    }
    if (mid == j) {
      if (survives(j, s, 1)) return tower(j, s, 1);
      return {point_mass(level0_point_target(j, s, true))};
    }
    return {point_mass(level0_point_target(j, s, false))};
  }

 private:
  const NormalFormGame& g_;
  int k_;
  DeletionTrace trace_;
  std::vector<std::vector<Profile>> level_profiles_;
  std::vector<int> level_offset_;
  int total_states_ = 0;
  mutable std::map<std::tuple<int, int, int>, Belief> witness_cache_;
};

EpistemicStructure tower_structure(const NormalFormGame& g, int k,
                                   const std::string& kind, const Rat* delta) {
  if (k < 0) throw std::invalid_argument("structure bound k must be >= 0");
  auto report = validate_game(g);
  if (!report.empty())
    throw std::invalid_argument("invalid game: " + report.front());
  TowerBuilder tb(g, k);
  EpistemicStructure s;
  s.game = g;
  s.kind = kind;
  s.bound = k;
  s.beliefs.assign(g.num_players(), std::vector<Lps>(tb.total_states()));
  for (int h = 0; h < tb.num_levels(); ++h)
    for (int mid = 0; mid < g.num_players(); ++mid)
      for (const Profile& prof : tb.profiles(h)) {
        s.state_labels.push_back(built_state_label(g, h, mid, prof));
        s.strat.push_back(prof);
      }
  for (int h = 0; h < tb.num_levels(); ++h) {
    for (int mid = 0; mid < g.num_players(); ++mid) {
      for (const Profile& prof : tb.profiles(h)) {
        int w = tb.state_of(h, mid, prof);
        for (int j = 0; j < g.num_players(); ++j) {
          auto levels = tb.belief_tower(j, h, mid, prof);
          Lps lps;
          lps.carrier_size = tb.total_states();
          if (kind == "grat") {
            lps.levels = std::move(levels);
          } else if (kind == "ratzero") {
            lps.levels.push_back(std::move(levels.front()));
          } else {  // approx: collapse the tower with the delta schedule
            std::vector<Rat> mix(tb.total_states(), Rat::zero());
            Rat coef = Rat::one() - *delta;
            Rat power = Rat::one();
            for (std::size_t m = 0; m < levels.size(); ++m) {
              Rat weight = (m + 1 == levels.size()) ? power : power * coef;
              for (int a = 0; a < tb.total_states(); ++a)
                if (!levels[m][a].is_zero()) mix[a] += weight * levels[m][a];
              power *= *delta;
            }
            lps.levels.push_back(std::move(mix));
          }
          s.beliefs[j][w] = std::move(lps);
        }
      }
    }
  }
  return s;
}

}  // namespace

EpistemicStructure build_ratzero_structure(const NormalFormGame& g, int k) {
  return tower_structure(g, k, "ratzero", nullptr);
}

EpistemicStructure build_grat_structure(const NormalFormGame& g, int k) {
  return tower_structure(g, k, "grat", nullptr);
}

EpistemicStructure build_approx_structure(const NormalFormGame& g, int k,
                                          const Rat& delta) {
  if (!delta.is_positive() || delta >= Rat(1, 2))
    throw std::invalid_argument("delta must lie in (0, 1/2)");
  return tower_structure(g, k, "approx", &delta);
}

EpistemicStructure build_rationalizable_structure(const NormalFormGame& g) {
  auto report = validate_game(g);
  if (!report.empty())
    throw std::invalid_argument("invalid game: " + report.front());
  DeletionTrace strict = iterate_deletion(g, DomMode::Strict);
  const StrategySets& z = strict.survivors();
  EpistemicStructure s;
  s.game = g;
  s.kind = "rationalizable";
  auto profs = profiles_of(g, z);
  for (const Profile& prof : profs) {
    s.state_labels.push_back(g.profile_label(prof));
    s.strat.push_back(prof);
  }
  int total = static_cast<int>(profs.size());
  s.beliefs.assign(g.num_players(), std::vector<Lps>(total));
  for (int p = 0; p < g.num_players(); ++p) {
    OppProfiles opp = OppProfiles::enumerate(g, p, z);
    std::map<int, Belief> witness_by_strat;
    for (int s_idx : z[p]) {
      auto wit = best_response_witness(g, p, s_idx, opp, SupportMode::Any);
      if (!wit) throw std::logic_error("fixpoint strategy lost its witness");
      witness_by_strat.emplace(s_idx, std::move(*wit));
    }
    for (int w = 0; w < total; ++w) {
      const Belief& wit = witness_by_strat.at(s.strat[w][p]);
      std::vector<Rat> level(total, Rat::zero());
      for (int q = 0; q < wit.support.size(); ++q) {
        if (wit.weights[q].is_zero()) continue;
        Profile full = combine(wit.support.items[q], p, s.strat[w][p]);
        for (int w2 = 0; w2 < total; ++w2)
          if (s.strat[w2] == full) level[w2] = wit.weights[q];
      }
      s.beliefs[p][w] = Lps::single(std::move(level));
    }
  }
  return s;
}

BuiltStateInfo built_state_info(const EpistemicStructure& s, int state) {
  const std::string& label = s.state_labels[state];
  BuiltStateInfo info;
  if (label.size() < 4 || label[0] != '(')
    throw std::invalid_argument("not a level-indexed state label: " + label);
  std::istringstream is(label.substr(1));
  char comma = 0;
  is >> info.level >> comma >> info.mid_player;
  if (!is || comma != ',')
    throw std::invalid_argument("malformed state label: " + label);
  info.mid_player -= 1;
  return info;
}

std::vector<AppropriatenessViolation> check_appropriate(
    const EpistemicStructure& s) {
  std::vector<AppropriatenessViolation> out;
  const int n = s.num_players();
  const int states = s.num_states();
  for (int w = 0; w < states; ++w) {
    if (static_cast<int>(s.strat[w].size()) != n) {
      out.push_back({1, 0, w, "strategy profile has wrong arity"});
      return out;
    }
    for (int p = 0; p < n; ++p)
      if (s.strat[w][p] < 0 || s.strat[w][p] >= s.game.num_strategies(p)) {
        out.push_back({1, p, w, "strategy index out of range"});
        return out;
      }
  }
  for (int p = 0; p < n; ++p) {
    if (static_cast<int>(s.beliefs[p].size()) != states) {
      out.push_back({1, p, 0, "belief table has wrong size"});
      return out;
    }
    for (int w = 0; w < states; ++w) {
      const Lps& lps = s.beliefs[p][w];
      if (lps.carrier_size != states || !validate_lps(lps).empty()) {
        out.push_back({1, p, w, "belief is not an LPS over the state space"});
        continue;
      }
      // Condition 2: every level certain of the player's own strategy.
      for (int h = 0; h < lps.length(); ++h) {
        Rat own_mass;
        for (int w2 = 0; w2 < states; ++w2)
          if (s.strat[w2][p] == s.strat[w][p]) own_mass += lps.levels[h][w2];
        if (own_mass != Rat::one()) {
          out.push_back({2, p, w,
                         "level " + std::to_string(h) + " puts mass " +
                             own_mass.str() + " on the own-strategy event"});
          break;
        }
      }
      // Condition 4: top-level certainty of the player's own LPS.
      Rat same_mass;
      for (int w2 = 0; w2 < states; ++w2) {
        if (lps.levels[0][w2].is_zero()) continue;
        if (s.beliefs[p][w2] == lps) same_mass += lps.levels[0][w2];
      }
      if (same_mass != Rat::one())
        out.push_back({4, p, w,
                       "top level puts mass " + same_mass.str() +
                           " on the own-belief event"});
    }
  }
  return out;
}

namespace {

using nlohmann::json;

json lps_to_json(const EpistemicStructure& s, const Lps& lps) {
  json levels = json::array();
  for (const auto& level : lps.levels) {
    json entry = json::object();
    for (int w = 0; w < s.num_states(); ++w)
      if (!level[w].is_zero()) entry[s.state_labels[w]] = level[w].str();
    levels.push_back(entry);
  }
  return levels;
}

}  // namespace

std::string structure_to_json_text(const EpistemicStructure& s) {
  json doc;
  doc["kind"] = s.kind;
  doc["k"] = s.bound;
  doc["game"] = json::parse(game_to_json_text(s.game));
  json states = json::array();
  for (int w = 0; w < s.num_states(); ++w) {
    json entry;
    entry["label"] = s.state_labels[w];
    json strat = json::object();
    for (int p = 0; p < s.num_players(); ++p)
      strat[s.game.players[p]] = s.game.strategies[p][s.strat[w][p]];
    entry["strat"] = strat;
    states.push_back(entry);
  }
  doc["states"] = states;
  json beliefs = json::object();
  for (int p = 0; p < s.num_players(); ++p) {
    json per_state = json::object();
    for (int w = 0; w < s.num_states(); ++w)
      per_state[s.state_labels[w]] = lps_to_json(s, s.beliefs[p][w]);
    beliefs[s.game.players[p]] = per_state;
  }
  doc["beliefs"] = beliefs;
  return doc.dump(2) + "\n";
}

EpistemicStructure structure_from_json_text(const std::string& text) {
  json doc = json::parse(text);
  EpistemicStructure s;
  s.kind = doc.at("kind").get<std::string>();
  s.bound = doc.value("k", 0);
  s.game = game_from_json_text(doc.at("game").dump());
  for (const auto& entry : doc.at("states")) {
    s.state_labels.push_back(entry.at("label").get<std::string>());
    Profile prof(s.game.num_players());
    for (int p = 0; p < s.game.num_players(); ++p) {
      std::string label =
          entry.at("strat").at(s.game.players[p]).get<std::string>();
      int idx = s.game.strategy_index(p, label);
      if (idx < 0) throw std::runtime_error("unknown strategy " + label);
      prof[p] = idx;
    }
    s.strat.push_back(prof);
  }
  const int states = s.num_states();
  s.beliefs.assign(s.game.num_players(), std::vector<Lps>(states));
  for (int p = 0; p < s.game.num_players(); ++p) {
    const auto& per_state = doc.at("beliefs").at(s.game.players[p]);
    for (int w = 0; w < states; ++w) {
      const auto& levels = per_state.at(s.state_labels[w]);
      Lps lps;
      lps.carrier_size = states;
      for (const auto& level : levels) {
        std::vector<Rat> weights(states, Rat::zero());
        for (auto it = level.begin(); it != level.end(); ++it) {
          int w2 = s.state_index(it.key());
          if (w2 < 0) throw std::runtime_error("unknown state " + it.key());
          auto r = Rat::parse(it.value().get<std::string>());
          if (!r)
            throw std::runtime_error("bad weight " +
                                     it.value().get<std::string>());
          weights[w2] = *r;
        }
        lps.levels.push_back(std::move(weights));
      }
      if (lps.levels.empty())
        throw std::runtime_error("empty LPS for state " + s.state_labels[w]);
      s.beliefs[p][w] = std::move(lps);
    }
  }
  return s;
}

EpistemicStructure structure_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return structure_from_json_text(ss.str());
}

}  // namespace egt
