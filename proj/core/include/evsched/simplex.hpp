#pragma once

#include <utility>
#include <vector>

namespace evsched::lp {

enum class Sense { le, ge, eq };

enum class Status { optimal, infeasible, unbounded, iteration_limit };

struct Row {
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
  Sense sense = Sense::le;
  double rhs = 0.0;
};

// min c'x  subject to  rows, lower <= x <= upper. Lower bounds must be
// finite; +infinity upper bounds are allowed.
struct Problem {
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> rows;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int add_var(double cost, double lo, double hi);
  void add_row(Sense sense, double rhs, std::vector<std::pair<int, double>> terms);
};

struct Solution {
  Status status = Status::infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

// Dense two-phase primal simplex with bounded variables. Deterministic:
// Dantzig pricing with lowest-index tie-breaks, Bland's rule after a
// stall threshold.
Solution solve(const Problem& problem);

}  // namespace evsched::lp
