#ifndef EGT_GAME_HPP
#define EGT_GAME_HPP

#include <string>
#include <vector>

#include "egt/rat.hpp"

namespace egt {

// A pure strategy profile: strat[p] is an index into strategies[p].
using Profile = std::vector<int>;

// Per-player strategy index sets, sorted ascending (survivor sets and the like).
using StrategySets = std::vector<std::vector<int>>;

// Finite n-player game in strategic form with exact rational payoffs in [0,1].
// Players are indexed 0..n-1 internally; external ids are 1..n.
struct NormalFormGame {
  std::vector<std::string> players;                 // display names, "1".."n" by default
  std::vector<std::vector<std::string>> strategies; // per-player labels, declaration order
  std::vector<std::vector<Rat>> payoffs;            // [flat profile index][player]

  int num_players() const { return static_cast<int>(players.size()); }
  int num_strategies(int p) const { return static_cast<int>(strategies[p].size()); }

  long long num_profiles() const;
  long long profile_index(const Profile& s) const;
  Profile profile_at(long long index) const;

  const Rat& payoff(int player, const Profile& s) const;

  // -1 if the label is unknown for that player.
  int strategy_index(int player, const std::string& label) const;

  std::string profile_label(const Profile& s) const;

  StrategySets full_sets() const;
};

// Mixture over player `owner`'s strategies; weights indexed by strategy index.
struct MixedStrategy {
  int owner = 0;
  std::vector<Rat> weights;

  bool is_pure() const;
  // Index of the pure strategy if the mixture is degenerate, else -1.
  int pure_index() const;
};

// Opponent profiles of player i are profiles over all j != i.  They are
// enumerated in the canonical order: mixed-radix over players j != i in
// ascending order, least significant last, restricted to the given sets.
struct OppProfiles {
  int player = 0;
  std::vector<Profile> items;  // full-length profiles with items[k][player] == -1

  static OppProfiles enumerate(const NormalFormGame& g, int player,
                               const StrategySets& sets);
  static OppProfiles enumerate_full(const NormalFormGame& g, int player);

  int size() const { return static_cast<int>(items.size()); }
  // Position of `opp` in items, or -1.
  int index_of(const Profile& opp) const;
};

Profile combine(const Profile& opp, int player, int strat);

// Belief of `owner` over opponent profiles; weights aligned with `support`.
struct Belief {
  int owner = 0;
  OppProfiles support;          // enumeration the weights refer to
  std::vector<Rat> weights;     // same length as support.items

  Rat weight_of(const Profile& opp) const;
};

// Expected utility of pure strategy `strat` of `player` under `belief`.
Rat expected_utility(const NormalFormGame& g, int player, int strat,
                     const Belief& belief);
// Expected utility of a mixture under a pure opponent profile.
Rat mixed_payoff(const NormalFormGame& g, const MixedStrategy& mix,
                 const Profile& opp);

// Report-style validation; an empty result means the game is well formed.
std::vector<std::string> validate_game(const NormalFormGame& g);

// JSON game file format, see README.
NormalFormGame game_from_json_text(const std::string& text);
NormalFormGame game_from_json_file(const std::string& path);
std::string game_to_json_text(const NormalFormGame& g);

}  // namespace egt

#endif  // EGT_GAME_HPP
