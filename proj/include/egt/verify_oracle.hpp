#ifndef EGT_VERIFY_ORACLE_HPP
#define EGT_VERIFY_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "egt/game.hpp"
#include "egt/rat.hpp"

namespace egt::verify {

// Exact LP decided by basic-solution (vertex) enumeration with rational
// Gaussian elimination.  Deliberately shares no code with the simplex path;
// the two methods cross-check each other.  Feasible regions must be bounded.
struct OracleRow {
  std::vector<Rat> coeff;
  int rel = 0;  // -1: <=, 0: ==, +1: >=
  Rat rhs;
};

struct OracleLpResult {
  bool feasible = false;
  Rat objective;
  std::vector<Rat> x;
};

// max c.x subject to rows and x >= 0; var count guarded (small systems only).
OracleLpResult oracle_lp(int num_vars, const std::vector<Rat>& objective,
                         const std::vector<OracleRow>& rows);

// Is `strat` dominated (per mode) w.r.t. `opp` by a mixture over `base`?
// Decided by the vertex-enumeration route, margin maximization included.
struct OracleDomination {
  bool dominated = false;
  std::vector<Rat> mixture;  // over base, aligned with base order
  Rat margin;                // strict: min advantage; weak: total advantage
};

OracleDomination oracle_dominated(const NormalFormGame& g, int player,
                                  int strat, const std::vector<int>& base,
                                  const OppProfiles& opp, bool weak);

enum class DeletionMode { Weak, Strict };

struct DeletionWitnessKey {
  int player = 0;
  int strat = 0;
  int round = 0;  // round in which the strategy was deleted (1-based)
  bool operator==(const DeletionWitnessKey&) const = default;
};

struct BruteTrace {
  std::vector<StrategySets> rounds;  // rounds[0] = full sets
  int fixpoint_round = 0;
};

// Independent survivor computation (weak/strict) for small games.
// Throws std::length_error when the size guard (profile count) is exceeded.
BruteTrace brute_force_survivors(const NormalFormGame& g, DeletionMode mode,
                                 long long guard = 10000);

// Seeded random corpus per the verification protocol: 2-3 players, 2-4
// strategies each, payoffs uniform over {0, 1/8, ..., 1}.
NormalFormGame random_game(std::uint64_t seed);

}  // namespace egt::verify

#endif  // EGT_VERIFY_ORACLE_HPP
