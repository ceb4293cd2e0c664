#ifndef EGT_STRUCTURES_HPP
#define EGT_STRUCTURES_HPP

#include <string>
#include <vector>

#include "egt/dominance.hpp"
#include "egt/game.hpp"
#include "egt/lps.hpp"

namespace egt {

// Finite epistemic structure for a normal-form game: states with a strategy
// map and one LPS per (player, state) over the state space.  Probability
// structures are the length-1 special case.
struct EpistemicStructure {
  NormalFormGame game;
  std::string kind;  // ratzero | grat | approx | rationalizable | custom
  int bound = 0;     // the k the structure was built for (when applicable)

  std::vector<std::string> state_labels;
  std::vector<Profile> strat;              // strat[state]
  std::vector<std::vector<Lps>> beliefs;   // beliefs[player][state]

  int num_states() const { return static_cast<int>(state_labels.size()); }
  int num_players() const { return game.num_players(); }
  int state_index(const std::string& label) const;  // -1 if unknown

  // All states where player p plays strategy s.
  std::vector<int> strategy_event(int p, int s) const;

  int max_lps_length() const;
};

// Appropriateness per the normal-form conditions.  Condition 2 is checked with
// lexicographic mass 1 on the own-strategy event (every level); conditions
// 3-4 with top-level certainty of the player's own LPS, which coincides with
// the exact conditions on length-1 structures.
struct AppropriatenessViolation {
  int condition = 0;  // 1..4
  int player = 0;
  int state = 0;
  std::string detail;
};

std::vector<AppropriatenessViolation> check_appropriate(
    const EpistemicStructure& s);

// State labels of built structures are "(k,i,(s1,...,sn))" with player index
// i in 1..n; the rationalizable builder uses plain profile labels.
std::string built_state_label(const NormalFormGame& g, int level, int player,
                              const Profile& prof);

// Structure construction bound: states (k',i,sigma) for k' <= k, sigma
// surviving k' rounds of weak deletion; beliefs stack per-round Pearce
// witnesses (probability version keeps only the most important level).
EpistemicStructure build_ratzero_structure(const NormalFormGame& g, int k);
EpistemicStructure build_grat_structure(const NormalFormGame& g, int k);

// Single-measure variant mixing the tower levels with weights
// delta^m (1-delta) and residual delta^depth on the deepest level.
EpistemicStructure build_approx_structure(const NormalFormGame& g, int k,
                                          const Rat& delta);

// States are profiles of the strict-iteration fixpoint; beliefs come from
// deterministic any-support witnesses, own strategy fixed.
EpistemicStructure build_rationalizable_structure(const NormalFormGame& g);

// Decomposition of a built structure's state label.
struct BuiltStateInfo {
  int level = 0;
  int mid_player = 0;  // the i of (k', i, sigma)
};
// Valid for ratzero/grat/approx structures (states laid out level-major).
BuiltStateInfo built_state_info(const EpistemicStructure& s, int state);

std::string structure_to_json_text(const EpistemicStructure& s);
EpistemicStructure structure_from_json_text(const std::string& text);
EpistemicStructure structure_from_json_file(const std::string& path);

}  // namespace egt

#endif  // EGT_STRUCTURES_HPP
