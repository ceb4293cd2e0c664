#ifndef EGT_SIMPLEX_HPP
#define EGT_SIMPLEX_HPP

#include <vector>

#include "egt/rat.hpp"

namespace egt {

enum class Rel { Le, Eq, Ge };

struct LpRow {
  std::vector<Rat> coeff;
  Rel rel = Rel::Le;
  Rat rhs;
};

// max c^T x  subject to  rows, x >= 0.  Exact rational arithmetic throughout.
struct LinearProgram {
  int num_vars = 0;
  std::vector<Rat> objective;
  std::vector<LpRow> rows;

  void add_row(std::vector<Rat> coeff, Rel rel, Rat rhs) {
    rows.push_back({std::move(coeff), rel, std::move(rhs)});
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Rat objective;
  std::vector<Rat> x;
};

// Two-phase primal simplex with Bland's rule (no cycling, fully deterministic).
LpResult solve_lp(const LinearProgram& lp);

}  // namespace egt

#endif  // EGT_SIMPLEX_HPP
