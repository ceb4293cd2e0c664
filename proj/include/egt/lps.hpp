#ifndef EGT_LPS_HPP
#define EGT_LPS_HPP

#include <string>
#include <vector>

#include "egt/game.hpp"
#include "egt/rat.hpp"

namespace egt {

// Lexicographic probability sequence over a finite carrier 0..carrier_size-1.
// Every level is a probability distribution; level 0 is the most important.
struct Lps {
  int carrier_size = 0;
  std::vector<std::vector<Rat>> levels;  // levels[h][atom]

  int length() const { return static_cast<int>(levels.size()); }

  static Lps single(std::vector<Rat> level);
  static Lps uniform(int carrier_size);

  // Mass of the atom set at each level.
  std::vector<Rat> mass(const std::vector<int>& atoms) const;
  bool is_null(const std::vector<int>& atoms) const;  // mass is the zero vector

  // First level index giving the set positive mass; -1 encodes "infinity".
  int first_positive_level(const std::vector<int>& atoms) const;

  bool operator==(const Lps& other) const = default;
};

// Condition on U: keep the levels giving U positive mass, each renormalized.
// Carrier is unchanged (mass outside U becomes zero at every kept level).
// Throws std::domain_error when U is lexicographically null.
Lps condition(const Lps& lps, const std::vector<int>& U);

// First-level conditional probability mu(V | U)_0.
Rat first_conditional(const Lps& lps, const std::vector<int>& V,
                      const std::vector<int>& U);

enum class Order { Less, Equal, Greater };

// Lexicographic comparison of per-level expected-utility tuples of two own
// strategies under an LPS over opponent profiles (atom k = opp.items[k]).
Order lex_compare_eu(const NormalFormGame& g, int player, int strat_a,
                     int strat_b, const OppProfiles& opp, const Lps& lps);

// E dominates F: the first level giving E positive mass strictly precedes F's
// (min over the empty set counts as infinity).
bool dominates_event(const Lps& lps, const std::vector<int>& E,
                     const std::vector<int>& F);

// Blume-Brandenburger-Dekel: every atom of E gets positive mass somewhere and
// strictly earlier than any level giving an atom of F positive mass.
bool infinitely_more_likely(const Lps& lps, const std::vector<int>& E,
                            const std::vector<int>& F);

// E is assumed iff it is infinitely more likely than its complement.
bool assumes(const Lps& lps, const std::vector<int>& E);

// Malformed-LPS report (levels not summing to 1, negative weights, ...).
std::vector<std::string> validate_lps(const Lps& lps);

}  // namespace egt

#endif  // EGT_LPS_HPP
