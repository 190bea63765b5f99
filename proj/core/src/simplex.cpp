#include "evsched/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evsched/errors.hpp"

namespace evsched::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-11;

enum class VarState : unsigned char { basic, at_lower, at_upper };

// Full-tableau simplex over the equality system [A | slack | artificial].
// Nonbasic variables rest at one of their bounds; basic values are kept in
// a separate vector and updated on every move.
class Tableau {
 public:
  explicit Tableau(const Problem& p) : m_(static_cast<int>(p.rows.size())) {
    n_struct_ = p.num_vars();
    int n_slack = 0;
    for (const auto& r : p.rows)
      if (r.sense != Sense::eq) ++n_slack;
    ncols_ = n_struct_ + n_slack + m_;
    lower_ = p.lower;
    upper_ = p.upper;
    cost_.assign(static_cast<size_t>(ncols_), 0.0);
    for (int j = 0; j < n_struct_; ++j) cost_[j] = p.objective[j];
    lower_.resize(static_cast<size_t>(ncols_), 0.0);
    upper_.resize(static_cast<size_t>(ncols_), kInf);

    tab_.assign(static_cast<size_t>(m_) * ncols_, 0.0);
    basis_.resize(static_cast<size_t>(m_));
    state_.assign(static_cast<size_t>(ncols_), VarState::at_lower);
    value_.assign(static_cast<size_t>(m_), 0.0);

    int slack = n_struct_;
    art_begin_ = n_struct_ + n_slack;
    for (int i = 0; i < m_; ++i) {
      const Row& row = p.rows[static_cast<size_t>(i)];
      double* t = row_ptr(i);
      for (auto [j, a] : row.terms) t[j] += a;
      double rhs = row.rhs;
      if (row.sense == Sense::le) {
        t[slack++] = 1.0;
      } else if (row.sense == Sense::ge) {
        t[slack++] = -1.0;
      }
      // residual with every structural at its lower bound, slacks at 0
      double r = rhs;
      for (int j = 0; j < n_struct_; ++j) r -= t[j] * lower_[static_cast<size_t>(j)];
      if (r < 0.0) {
        for (int j = 0; j < ncols_; ++j) t[j] = -t[j];
        r = -r;
      }
      const int art = art_begin_ + i;
      t[art] = 1.0;
      basis_[static_cast<size_t>(i)] = art;
      state_[static_cast<size_t>(art)] = VarState::basic;
      value_[static_cast<size_t>(i)] = r;
    }
  }

  Solution run(const Problem& p) {
    Solution sol;
    // phase 1: drive the artificial variables to zero
    std::vector<double> phase1(static_cast<size_t>(ncols_), 0.0);
    for (int j = art_begin_; j < ncols_; ++j) phase1[static_cast<size_t>(j)] = 1.0;
    Status st = optimize(phase1);
    if (st == Status::iteration_limit) {
      sol.status = st;
      return sol;
    }
    double infeas = 0.0;
    for (int i = 0; i < m_; ++i)
      if (basis_[static_cast<size_t>(i)] >= art_begin_) infeas += value_[static_cast<size_t>(i)];
    if (infeas > 1e-7) {
      sol.status = Status::infeasible;
      return sol;
    }
    // pin artificials at zero for phase 2
    for (int j = art_begin_; j < ncols_; ++j) upper_[static_cast<size_t>(j)] = 0.0;

    st = optimize(cost_);
    sol.status = st;
    if (st != Status::optimal) return sol;

    std::vector<double> x(static_cast<size_t>(ncols_));
    for (int j = 0; j < ncols_; ++j)
      x[static_cast<size_t>(j)] =
          state_[static_cast<size_t>(j)] == VarState::at_upper ? upper_[static_cast<size_t>(j)]
                                                               : lower_[static_cast<size_t>(j)];
    for (int i = 0; i < m_; ++i)
      x[static_cast<size_t>(basis_[static_cast<size_t>(i)])] = value_[static_cast<size_t>(i)];
    sol.x.assign(x.begin(), x.begin() + p.num_vars());
    sol.objective = 0.0;
    for (int j = 0; j < p.num_vars(); ++j)
      sol.objective += p.objective[static_cast<size_t>(j)] * sol.x[static_cast<size_t>(j)];
    return sol;
  }

 private:
  double* row_ptr(int i) { return tab_.data() + static_cast<size_t>(i) * ncols_; }

  // Reduced costs for the given cost vector under the current basis.
  std::vector<double> reduced_costs(const std::vector<double>& c) const {
    std::vector<double> d = c;
    for (int i = 0; i < m_; ++i) {
      const double cb = c[static_cast<size_t>(basis_[static_cast<size_t>(i)])];
      if (cb == 0.0) continue;
      const double* t = tab_.data() + static_cast<size_t>(i) * ncols_;
      for (int j = 0; j < ncols_; ++j) d[static_cast<size_t>(j)] -= cb * t[j];
    }
    return d;
  }

  Status optimize(const std::vector<double>& c) {
    std::vector<double> d = reduced_costs(c);
    const long bland_after = 2000 + 64L * m_;
    const long max_iter = 400000;
    for (long iter = 0; iter < max_iter; ++iter) {
      const bool bland = iter > bland_after;
      int enter = -1;
      double best = 0.0;
      for (int j = 0; j < ncols_; ++j) {
        if (state_[static_cast<size_t>(j)] == VarState::basic) continue;
        if (lower_[static_cast<size_t>(j)] == upper_[static_cast<size_t>(j)]) continue;
        const double dj = d[static_cast<size_t>(j)];
        double viol = 0.0;
        if (state_[static_cast<size_t>(j)] == VarState::at_lower && dj < -kCostTol)
          viol = -dj;
        else if (state_[static_cast<size_t>(j)] == VarState::at_upper && dj > kCostTol)
          viol = dj;
        if (viol > 0.0) {
          if (bland) {
            enter = j;
            break;
          }
          if (viol > best + 1e-15) {
            best = viol;
            enter = j;
          }
        }
      }
      if (enter < 0) return Status::optimal;

      const double sigma = state_[static_cast<size_t>(enter)] == VarState::at_lower ? 1.0 : -1.0;
      double delta = upper_[static_cast<size_t>(enter)] - lower_[static_cast<size_t>(enter)];
      int leave_row = -1;
      bool leave_at_upper = false;
      for (int i = 0; i < m_; ++i) {
        const double alpha = sigma * tab_[static_cast<size_t>(i) * ncols_ + enter];
        const int bi = basis_[static_cast<size_t>(i)];
        double limit;
        bool hits_upper;
        if (alpha > kPivotTol) {
          limit = (value_[static_cast<size_t>(i)] - lower_[static_cast<size_t>(bi)]) / alpha;
          hits_upper = false;
        } else if (alpha < -kPivotTol) {
          if (upper_[static_cast<size_t>(bi)] == kInf) continue;
          limit = (value_[static_cast<size_t>(i)] - upper_[static_cast<size_t>(bi)]) / alpha;
          hits_upper = true;
        } else {
          continue;
        }
        if (limit < -1e-12) limit = 0.0;
        if (limit < delta - 1e-12) {
          delta = limit;
          leave_row = i;
          leave_at_upper = hits_upper;
        } else if (bland && leave_row >= 0 && limit <= delta + 1e-12 &&
                   basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leave_row)]) {
          leave_row = i;
          leave_at_upper = hits_upper;
        }
      }
      if (delta == kInf) return Status::unbounded;

      if (leave_row < 0) {
        // bound flip: the entering variable runs to its opposite bound
        for (int i = 0; i < m_; ++i)
          value_[static_cast<size_t>(i)] -=
              sigma * delta * tab_[static_cast<size_t>(i) * ncols_ + enter];
        state_[static_cast<size_t>(enter)] =
            sigma > 0.0 ? VarState::at_upper : VarState::at_lower;
        continue;
      }

      // update basic values, then pivot the tableau
      for (int i = 0; i < m_; ++i)
        value_[static_cast<size_t>(i)] -=
            sigma * delta * tab_[static_cast<size_t>(i) * ncols_ + enter];
      const int leave = basis_[static_cast<size_t>(leave_row)];
      const double enter_from = state_[static_cast<size_t>(enter)] == VarState::at_lower
                                    ? lower_[static_cast<size_t>(enter)]
                                    : upper_[static_cast<size_t>(enter)];
      value_[static_cast<size_t>(leave_row)] = enter_from + sigma * delta;
      state_[static_cast<size_t>(leave)] =
          leave_at_upper ? VarState::at_upper : VarState::at_lower;
      if (leave >= art_begin_) upper_[static_cast<size_t>(leave)] = 0.0;  // never re-enters
      state_[static_cast<size_t>(enter)] = VarState::basic;
      basis_[static_cast<size_t>(leave_row)] = enter;

      double* pr = row_ptr(leave_row);
      const double inv = 1.0 / pr[enter];
      for (int j = 0; j < ncols_; ++j) pr[j] *= inv;
      pr[enter] = 1.0;  // guard against roundoff on the pivot element
      for (int i = 0; i < m_; ++i) {
        if (i == leave_row) continue;
        double* ri = row_ptr(i);
        const double f = ri[enter];
        if (f == 0.0) continue;
        for (int j = 0; j < ncols_; ++j) ri[j] -= f * pr[j];
        ri[enter] = 0.0;
      }
      const double df = d[static_cast<size_t>(enter)];
      if (df != 0.0) {
        for (int j = 0; j < ncols_; ++j) d[static_cast<size_t>(j)] -= df * pr[j];
        d[static_cast<size_t>(enter)] = 0.0;
      }
    }
    return Status::iteration_limit;
  }

  int m_;
  int n_struct_ = 0;
  int ncols_ = 0;
  int art_begin_ = 0;
  std::vector<double> tab_;
  std::vector<double> cost_;
  std::vector<double> lower_, upper_;
  std::vector<int> basis_;
  std::vector<VarState> state_;
  std::vector<double> value_;
};

}  // namespace

int Problem::add_var(double cost, double lo, double hi) {
  if (!(lo <= hi)) throw evsched::ParameterError("lp: variable lower bound above upper bound");
  if (!std::isfinite(lo)) throw evsched::ParameterError("lp: lower bounds must be finite");
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  return static_cast<int>(objective.size()) - 1;
}

void Problem::add_row(Sense sense, double rhs, std::vector<std::pair<int, double>> terms) {
  rows.push_back(Row{std::move(terms), sense, rhs});
}

Solution solve(const Problem& problem) {
  Tableau t(problem);
  return t.run(problem);
}

}  // namespace evsched::lp
