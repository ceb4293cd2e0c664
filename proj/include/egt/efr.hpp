#ifndef EGT_EFR_HPP
#define EGT_EFR_HPP

#include <optional>
#include <string>
#include <vector>

#include "egt/dominance.hpp"
#include "egt/game.hpp"
#include "egt/logic.hpp"
#include "egt/lps.hpp"

namespace egt {

// Finite extensive-form game with information sets and perfect recall.
// Strategies are reduced pure strategies: an action for every own
// information set consistent with the player's earlier own actions.
struct ExtensiveFormGame {
  struct Node {
    int parent = -1;
    int mover = -1;                                   // -1 at leaves
    std::vector<std::pair<std::string, int>> children;  // action -> node
    std::vector<Rat> payoffs;                         // leaves only
    int depth = 0;
  };

  std::vector<std::string> players;
  std::vector<Node> nodes;  // nodes[0] is the root
  // infosets[p] partitions the decision nodes of player p.
  std::vector<std::vector<std::vector<int>>> infosets;

  int num_players() const { return static_cast<int>(players.size()); }
  // Information set of player p containing the node, or -1.
  int infoset_of(int p, int node) const;
  int max_depth() const;
};

std::vector<std::string> validate_extensive(const ExtensiveFormGame& g);

// Reduced strategies and the induced strategic form.  The reduced game's
// payoffs follow the unique path each profile induces.
struct ReducedGame {
  ExtensiveFormGame tree;
  NormalFormGame game;  // strategy labels are dot-joined action labels
  // actions[p][s][I] = action index at infoset I (-1 where unreachable by
  // the player's own earlier actions).
  std::vector<std::vector<std::vector<int>>> actions;

  // Path of nodes induced by a reduced profile, root to leaf.
  std::vector<int> path_of(const Profile& prof) const;
  bool reaches(const Profile& prof, int player, int infoset) const;
  // Time step at which the path enters the information set, or -1.
  int reach_time(const Profile& prof, int player, int infoset) const;

  // Own information sets at or below I (I included).
  std::vector<int> at_or_below(int player, int infoset) const;
  // Does s agree with t at every own information set NOT at or below I?
  bool agrees_off_subtree(int player, int s, int t, int infoset) const;
  // Does s agree with t at every own information set strictly above I?
  bool agrees_above(int player, int s, int t, int infoset) const;
};

ReducedGame reduce(const ExtensiveFormGame& g);

// Opponent profiles in sets that reach I together with strat (and, in the
// four-argument form of the definition, with every support strategy of the
// candidate mixture).
std::vector<int> reach_set(const ReducedGame& rg, int player, int strat,
                           int infoset, const OppProfiles& opp);
std::vector<int> reach_set_mixed(const ReducedGame& rg, int player, int strat,
                                 const MixedStrategy& mix, int infoset,
                                 const OppProfiles& opp);

enum class CondVariant { Cd, CdPrime };

struct CondWitness {
  int infoset = 0;
  MixedStrategy dominator;
};

// Conditional dominance of `strat` on the product sets (both definitions).
// Mixtures range over reduced strategies of the full strategy set.
std::optional<CondWitness> conditionally_dominated(const ReducedGame& rg,
                                                   int player, int strat,
                                                   const StrategySets& sets,
                                                   CondVariant variant);

struct NcdTrace {
  std::vector<StrategySets> rounds;
  int fixpoint_round = 0;
  const StrategySets& at_round(int k) const;
  bool survives(int player, int strat, int k) const;
};

NcdTrace iterate_ncd(const ReducedGame& rg);

// Full-support witness LPS over `opp` making `strat` an almost-best response
// conditional on every information set it can reach (lem. Pearce1 route).
// Throws when the strategy is conditionally dominated on the sets.
Lps witness_lps(const ReducedGame& rg, int player, int strat,
                const OppProfiles& opp);

// Constant LPS whose (single) level is the full-support Pearce belief; exists
// iff the strategy is not weakly dominated on the sets in the reduced game.
Lps weak_witness_lps(const ReducedGame& rg, int player, int strat,
                     const OppProfiles& opp);

// Time-indexed epistemic structure: per (player, state, time) an LPS over
// (state, time) pairs, atom index = state * (horizon+1) + time.
struct ExtEpistemicStructure {
  ReducedGame rg;
  std::string kind;  // efr | efr-weak
  int bound = 0;
  int horizon = 0;

  std::vector<std::string> state_labels;
  std::vector<Profile> strat;
  // beliefs[player][state][time]
  std::vector<std::vector<std::vector<Lps>>> beliefs;

  int num_states() const { return static_cast<int>(state_labels.size()); }
  int num_players() const { return rg.game.num_players(); }
  int atom(int state, int time) const { return state * (horizon + 1) + time; }
  int state_index(const std::string& label) const;
  // Node visited at time m under the state's profile (clamped at the leaf).
  int node_at(int state, int time) const;
};

struct ExtViolation {
  int condition = 0;  // 1..6
  int player = 0;
  int state = 0;
  int time = 0;
  std::string detail;
};

std::vector<ExtViolation> check_appropriate_ext(const ExtEpistemicStructure& s);
std::vector<ExtViolation> check_respects_conditioning(
    const ExtEpistemicStructure& s);

// Level-indexed construction over NCD survivors with witness-LPS beliefs
// conditioned on the mover's latest information set (time-synchronized).
ExtEpistemicStructure build_efr_structure(const ExtensiveFormGame& g, int k);
// Weak variant: states over NWD survivors of the reduced game, beliefs from
// weak_witness_lps.
ExtEpistemicStructure build_efr_structure_weak(const ExtensiveFormGame& g,
                                               int k);

// Model checker for extensive-form structures.
bool eval_efr(const ExtEpistemicStructure& s, int state, int time,
              const FormulaPtr& f, const DiamondOracle& oracle,
              EvalTrace* trace = nullptr);

// Memoizing session over one extensive structure (see logic::EvalSession).
class EvalSessionExt {
 public:
  EvalSessionExt(const ExtEpistemicStructure& s, const DiamondOracle& oracle,
                 EvalTrace* trace = nullptr);
  ~EvalSessionExt();
  EvalSessionExt(EvalSessionExt&&) noexcept;

  bool ev(int state, int time, const FormulaPtr& f);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Oracle wired with both the weak trace of the reduced game and the NCD trace.
DiamondOracle make_efr_oracle(const ReducedGame& rg);

ExtensiveFormGame extensive_from_json_text(const std::string& text);
ExtensiveFormGame extensive_from_json_file(const std::string& path);
std::string extensive_to_json_text(const ExtensiveFormGame& g);

std::string ext_structure_to_json_text(const ExtEpistemicStructure& s);
ExtEpistemicStructure ext_structure_from_json_text(const std::string& text);
ExtEpistemicStructure ext_structure_from_json_file(const std::string& path);

}  // namespace egt

#endif  // EGT_EFR_HPP
