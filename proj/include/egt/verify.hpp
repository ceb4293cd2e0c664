#ifndef EGT_VERIFY_HPP
#define EGT_VERIFY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "egt/efr.hpp"
#include "egt/game.hpp"
#include "egt/logic.hpp"
#include "egt/structures.hpp"
#include "egt/verify_oracle.hpp"

namespace egt::verify {

struct Claim {
  std::string name;
  bool pass = false;
  bool inconclusive = false;     // an unanswerable consistency query
  std::string counterexample;    // reproduction payload on failure
};

struct VerificationReport {
  std::string theorem;
  std::string game_id;
  int k = 0;
  std::uint64_t seed = 0;        // corpus seed when applicable
  std::vector<Claim> claims;
  double seconds = 0.0;
  // The formula=>membership direction is checked on the built structure and
  // a finite mutation battery only; this is an under-approximation.
  std::string note;

  bool all_pass() const;
};

// Seeded structure perturbations: belief reweightings, level swaps, state
// drops.  Arbitrary structures are fair game for the formula=>membership
// direction, which is a semantic fact about every structure.
EpistemicStructure mutate_structure(const EpistemicStructure& s,
                                    std::uint64_t seed);

// Decomposition of a level-indexed extensive state label.
BuiltStateInfo built_state_info_ext(const ExtEpistemicStructure& s, int state);

// Conditional-dominance survivors decided WITHOUT the simplex path:
// explicit information-set enumeration (dfn. cd') with the pinned systems
// solved by the vertex-enumeration engine.
BruteTrace brute_force_ncd(const ReducedGame& rg, long long guard = 10000);

// Theorem ids: charrat charsd charwd charwdg charwdg1 charefr charefrwd
//              prop_grat prop_conddom lemma_pearce1 lemma_pearce2 lemma_ckchar
VerificationReport verify_theorem(const NormalFormGame& g,
                                  const std::string& game_id, int k,
                                  const std::string& theorem,
                                  int mutations = 8);

VerificationReport verify_theorem_extensive(const ExtensiveFormGame& g,
                                            const std::string& game_id, int k,
                                            const std::string& theorem);

// Seeded random extensive games: depth <= 3, branching <= 3, one mover per
// depth level, optional pooled information sets.
ExtensiveFormGame random_extensive_game(std::uint64_t seed);

std::string report_to_json_text(const VerificationReport& r);
// Fixed-width table; timings are optional so that command-line output can
// stay byte-identical across runs.
std::string report_table(const std::vector<VerificationReport>& reports,
                         bool include_timing = true);

// The full suite over the seeded corpora; mirrors the acceptance criteria.
struct SuiteOptions {
  int normal_games = 40;
  int extensive_games = 20;
  int k = 3;
  int mutations = 4;
  std::uint64_t base_seed = 1;
};

std::vector<VerificationReport> run_suite(const SuiteOptions& opt);

}  // namespace egt::verify

#endif  // EGT_VERIFY_HPP
