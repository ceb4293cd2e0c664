#ifndef EGT_DOMINANCE_HPP
#define EGT_DOMINANCE_HPP

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "egt/game.hpp"
#include "egt/rat.hpp"

namespace egt {

enum class DomMode { Weak, Strict };
enum class SupportMode { Full, Any };

// Which strategies dominating mixtures may use.  FullSigma follows the RAT_i
// semantics (compare against any strategy in Sigma_i); Survivors restricts to
// the current round's sets.  The verify suite cross-checks both give the same
// traces on the corpus.
enum class MixtureBase { FullSigma, Survivors };

// Is `strat` dominated w.r.t. the opponent profiles `opp` by a mixture over
// `base`?  Exact LP; absence is exact.  Throws on an empty restriction set.
std::optional<MixedStrategy> dominated_by_mixed(
    const NormalFormGame& g, int player, int strat, const OppProfiles& opp,
    DomMode mode, const std::vector<int>& base);

// Base defaults to all of Sigma_i.
std::optional<MixedStrategy> dominated_by_mixed(const NormalFormGame& g,
                                                int player, int strat,
                                                const OppProfiles& opp,
                                                DomMode mode);

// Pearce witness belief: makes `strat` a best response among all of Sigma_i.
// Full mode requires strictly positive weight on every profile of `opp`.
// The returned belief maximizes the minimum weight and is then refined
// lexicographically in profile order, so it is unique and deterministic.
std::optional<Belief> best_response_witness(const NormalFormGame& g,
                                            int player, int strat,
                                            const OppProfiles& opp,
                                            SupportMode support);

// Existence-only variant (one LP, no lexicographic refinement).
bool best_response_witness_exists(const NormalFormGame& g, int player,
                                  int strat, const OppProfiles& opp,
                                  SupportMode support);

struct DeletionWitness {
  int round = 0;  // 1-based round of deletion
  MixedStrategy dominator;
};

struct DeletionTrace {
  DomMode mode = DomMode::Weak;
  std::vector<StrategySets> rounds;  // rounds[0] = full strategy sets
  // witnesses[player][strat] for every deleted strategy
  std::vector<std::map<int, DeletionWitness>> witnesses;
  int fixpoint_round = 0;

  const StrategySets& survivors() const { return rounds.back(); }
  // Sets after k rounds; saturates at the fixpoint.
  const StrategySets& at_round(int k) const;
  bool survives(int player, int strat, int k) const;
};

DeletionTrace iterate_deletion(const NormalFormGame& g, DomMode mode,
                               MixtureBase base = MixtureBase::FullSigma);

struct GapReport {
  std::optional<Rat> gap;
  std::map<std::tuple<int, int, int>, Rat> per_deletion_margins;  // (player,strat,round)
};

// Largest strict-improvement margin available for every deleted strategy,
// minimized over deletions; absent when weak iteration deletes nothing.
GapReport compute_gap(const NormalFormGame& g);

struct Epsilon0Report {
  Rat epsilon0;
  // (round k'', player, strat) -> full-support witness on NWD^{k''-1}
  std::map<std::tuple<int, int, int>, Belief> witness_beliefs;
};

// Minimum nonzero weight over all full-support Pearce witnesses used by the
// structure constructions, rounds 1..k.
Epsilon0Report compute_epsilon0(const NormalFormGame& g, int k);

std::string trace_to_json_text(const NormalFormGame& g,
                               const DeletionTrace& trace);

}  // namespace egt

#endif  // EGT_DOMINANCE_HPP
