#include "egt/simplex.hpp"

#include <cassert>
#include <stdexcept>

namespace egt {

namespace {

// Dense tableau: rows 0..m-1 are constraints, row m is the objective row in
// reduced-profit form (rhs of row m is minus the current objective value).
class Tableau {
 public:
  Tableau(int m, int n) : m_(m), n_(n), cells_((m + 1) * (n + 1)) {}

  Rat& at(int r, int c) { return cells_[r * (n_ + 1) + c]; }
  const Rat& at(int r, int c) const { return cells_[r * (n_ + 1) + c]; }
  Rat& rhs(int r) { return at(r, n_); }
  int rows() const { return m_; }
  int cols() const { return n_; }

  void pivot(int pr, int pc) {
    Rat inv = Rat::one() / at(pr, pc);
    for (int c = 0; c <= n_; ++c) at(pr, c) *= inv;
    for (int r = 0; r <= m_; ++r) {
      if (r == pr || at(r, pc).is_zero()) continue;
      Rat f = at(r, pc);
      for (int c = 0; c <= n_; ++c) at(r, c) -= f * at(pr, c);
    }
  }

 private:
  int m_, n_;
  std::vector<Rat> cells_;
};

// Bland's rule: entering = lowest-index eligible column (scanned up to
// col_limit), leaving = best ratio with ties by lowest basis index.
// Returns false at optimality, throws std::overflow_error when unbounded.
bool simplex_step(Tableau& t, std::vector<int>& basis, int col_limit) {
  int m = t.rows();
  int enter = -1;
  for (int c = 0; c < col_limit; ++c) {
    if (t.at(m, c).is_positive()) { enter = c; break; }
  }
  if (enter < 0) return false;
  int leave = -1;
  Rat best;
  for (int r = 0; r < m; ++r) {
    if (!t.at(r, enter).is_positive()) continue;
    Rat ratio = t.rhs(r) / t.at(r, enter);
    if (leave < 0 || ratio < best ||
        (ratio == best && basis[r] < basis[leave])) {
      leave = r;
      best = ratio;
    }
  }
  if (leave < 0) throw std::overflow_error("simplex: unbounded");
  t.pivot(leave, enter);
  basis[leave] = enter;
  return true;
}

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  const int m = static_cast<int>(lp.rows.size());
  const int n = lp.num_vars;

  std::vector<std::vector<Rat>> a(m, std::vector<Rat>(n));
  std::vector<Rat> b(m);
  std::vector<Rel> rel(m);
  for (int r = 0; r < m; ++r) {
    assert(static_cast<int>(lp.rows[r].coeff.size()) == n);
    a[r] = lp.rows[r].coeff;
    b[r] = lp.rows[r].rhs;
    rel[r] = lp.rows[r].rel;
    if (b[r].is_negative()) {
      for (auto& v : a[r]) v = -v;
      b[r] = -b[r];
      if (rel[r] == Rel::Le) rel[r] = Rel::Ge;
      else if (rel[r] == Rel::Ge) rel[r] = Rel::Le;
    }
  }
  int slack_count = 0, art_count = 0;
  for (int r = 0; r < m; ++r) {
    if (rel[r] != Rel::Eq) ++slack_count;
    if (rel[r] != Rel::Le) ++art_count;
  }
  const int total = n + slack_count + art_count;
  const int art_base = n + slack_count;

  Tableau t(m, total);
  std::vector<int> basis(m, -1);
  int next_slack = n, next_art = art_base;
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) t.at(r, c) = a[r][c];
    t.rhs(r) = b[r];
    if (rel[r] == Rel::Le) {
      t.at(r, next_slack) = Rat::one();
      basis[r] = next_slack++;
    } else if (rel[r] == Rel::Ge) {
      t.at(r, next_slack++) = Rat(-1);
      t.at(r, next_art) = Rat::one();
      basis[r] = next_art++;
    } else {
      t.at(r, next_art) = Rat::one();
      basis[r] = next_art++;
    }
  }

  // Phase 1: maximize minus the sum of artificials.
  if (art_count > 0) {
    for (int r = 0; r < m; ++r) {
      if (basis[r] < art_base) continue;
      for (int c = 0; c <= total; ++c) t.at(m, c) += t.at(r, c);
    }
    for (int c = art_base; c < total; ++c) t.at(m, c) = Rat::zero();
    while (simplex_step(t, basis, total)) {}
    if (t.rhs(m).is_positive()) return {LpStatus::Infeasible, Rat::zero(), {}};
    // Any artificial still basic sits at level zero.  Pivot it out where
    // possible; a row with no usable column is redundant and stays inert
    // (all its non-artificial coefficients are zero).
    for (int r = 0; r < m; ++r) {
      if (basis[r] < art_base) continue;
      int pc = -1;
      for (int c = 0; c < art_base; ++c)
        if (!t.at(r, c).is_zero()) { pc = c; break; }
      if (pc >= 0) {
        t.pivot(r, pc);
        basis[r] = pc;
      }
    }
    for (int c = 0; c <= total; ++c) t.at(m, c) = Rat::zero();
  }

  // Phase 2 objective row: reduced profits relative to the current basis.
  for (int c = 0; c < n; ++c) t.at(m, c) = lp.objective[c];
  for (int r = 0; r < m; ++r) {
    if (basis[r] >= art_base || basis[r] >= n) continue;
    Rat cb = lp.objective[basis[r]];
    if (cb.is_zero()) continue;
    for (int c = 0; c <= total; ++c) t.at(m, c) -= cb * t.at(r, c);
  }

  try {
    // Artificial columns sit beyond art_base and are never eligible again.
    while (simplex_step(t, basis, art_base)) {}
  } catch (const std::overflow_error&) {
    return {LpStatus::Unbounded, Rat::zero(), {}};
  }

  LpResult res;
  res.status = LpStatus::Optimal;
  res.x.assign(n, Rat::zero());
  for (int r = 0; r < m; ++r)
    if (basis[r] < n) res.x[basis[r]] = t.rhs(r);
  res.objective = -t.rhs(m);
  return res;
}

}  // namespace egt
