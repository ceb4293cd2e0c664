#include "egt/lps.hpp"

#include <stdexcept>

namespace egt {

Lps Lps::single(std::vector<Rat> level) {
  Lps l;
  l.carrier_size = static_cast<int>(level.size());
  l.levels.push_back(std::move(level));
  return l;
}

Lps Lps::uniform(int carrier_size) {
  if (carrier_size <= 0) throw std::domain_error("uniform LPS: empty carrier");
  return single(std::vector<Rat>(carrier_size,
                                 Rat(1) / Rat(carrier_size)));
}

std::vector<Rat> Lps::mass(const std::vector<int>& atoms) const {
  std::vector<Rat> out(length());
  for (int h = 0; h < length(); ++h)
    for (int a : atoms) out[h] += levels[h][a];
  return out;
}

bool Lps::is_null(const std::vector<int>& atoms) const {
  for (const Rat& m : mass(atoms))
    if (!m.is_zero()) return false;
  return true;
}

int Lps::first_positive_level(const std::vector<int>& atoms) const {
  auto m = mass(atoms);
  for (int h = 0; h < length(); ++h)
    if (m[h].is_positive()) return h;
  return -1;
}

Lps condition(const Lps& lps, const std::vector<int>& U) {
  std::vector<bool> in_u(lps.carrier_size, false);
  for (int a : U) in_u[a] = true;
  auto m = lps.mass(U);
  Lps out;
  out.carrier_size = lps.carrier_size;
  for (int h = 0; h < lps.length(); ++h) {
    if (!m[h].is_positive()) continue;
    std::vector<Rat> level(lps.carrier_size);
    for (int a = 0; a < lps.carrier_size; ++a)
      if (in_u[a]) level[a] = lps.levels[h][a] / m[h];
    out.levels.push_back(std::move(level));
  }
  if (out.levels.empty())
    throw std::domain_error("conditioning on lexicographically null event");
  return out;
}

Rat first_conditional(const Lps& lps, const std::vector<int>& V,
                      const std::vector<int>& U) {
  Lps cond = condition(lps, U);
  std::vector<bool> in_v(lps.carrier_size, false);
  for (int a : V) in_v[a] = true;
  Rat p;
  for (int a = 0; a < lps.carrier_size; ++a)
    if (in_v[a]) p += cond.levels[0][a];
  return p;
}

Order lex_compare_eu(const NormalFormGame& g, int player, int strat_a,
                     int strat_b, const OppProfiles& opp, const Lps& lps) {
  for (int h = 0; h < lps.length(); ++h) {
    Rat ua, ub;
    for (int k = 0; k < opp.size(); ++k) {
      if (lps.levels[h][k].is_zero()) continue;
      ua += lps.levels[h][k] *
            g.payoff(player, combine(opp.items[k], player, strat_a));
      ub += lps.levels[h][k] *
            g.payoff(player, combine(opp.items[k], player, strat_b));
    }
    if (ua < ub) return Order::Less;
    if (ua > ub) return Order::Greater;
  }
  return Order::Equal;
}

bool dominates_event(const Lps& lps, const std::vector<int>& E,
                     const std::vector<int>& F) {
  int le = lps.first_positive_level(E);
  int lf = lps.first_positive_level(F);
  if (le < 0) return false;       // min over empty set is infinity
  if (lf < 0) return true;
  return le < lf;
}

bool infinitely_more_likely(const Lps& lps, const std::vector<int>& E,
                            const std::vector<int>& F) {
  for (int e : E) {
    int le = lps.first_positive_level({e});
    if (le < 0) return false;
    for (int f : F) {
      int lf = lps.first_positive_level({f});
      if (lf >= 0 && lf <= le) return false;
    }
  }
  return true;
}

bool assumes(const Lps& lps, const std::vector<int>& E) {
  std::vector<bool> in_e(lps.carrier_size, false);
  for (int a : E) in_e[a] = true;
  std::vector<int> complement;
  for (int a = 0; a < lps.carrier_size; ++a)
    if (!in_e[a]) complement.push_back(a);
  return infinitely_more_likely(lps, E, complement);
}

std::vector<std::string> validate_lps(const Lps& lps) {
  std::vector<std::string> report;
  if (lps.levels.empty()) report.push_back("LPS has no levels");
  for (int h = 0; h < lps.length(); ++h) {
    if (static_cast<int>(lps.levels[h].size()) != lps.carrier_size) {
      report.push_back("level " + std::to_string(h) + " has wrong carrier");
      continue;
    }
    Rat total;
    for (const Rat& w : lps.levels[h]) {
      if (w.is_negative())
        report.push_back("negative weight at level " + std::to_string(h));
      total += w;
    }
    if (total != Rat::one())
      report.push_back("level " + std::to_string(h) + " sums to " +
                       total.str() + ", not 1");
  }
  return report;
}

}  // namespace egt
