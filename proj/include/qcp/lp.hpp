#pragma once

// Dense bounded-variable revised simplex (two phases) returning primal and
// dual solutions. The LpBackend interface allows plugging in another solver.

#include "qcp/core.hpp"

#include <algorithm>
#include <memory>
#include <vector>

namespace qcp {

enum class Sense { ge, eq, le };

enum class LpStatus { optimal, infeasible, unbounded, numerical_failure };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

/// min objective^T x  s.t.  row_i(constraint_matrix) x (sense_i) rhs_i,  lower <= x <= upper
struct LinearProgram {
  Vector objective;
  Matrix constraint_matrix;
  Vector rhs;
  std::vector<Sense> constraint_sense;
  Vector lower;
  Vector upper;

  /// Empty LP over n free variables.
  static LinearProgram free_variables(Eigen::Index n) {
    LinearProgram lp;
    lp.objective = Vector::Zero(n);
    lp.constraint_matrix = Matrix(0, n);
    lp.rhs = Vector(0);
    lp.lower = Vector::Constant(n, -kInf);
    lp.upper = Vector::Constant(n, kInf);
    return lp;
  }

  Eigen::Index variables() const { return objective.size(); }
  Eigen::Index constraints() const { return constraint_matrix.rows(); }

  void add_row(const Vector& a, Sense sense, double rhs_value) {
    constraint_matrix.conservativeResize(constraint_matrix.rows() + 1, Eigen::NoChange);
    constraint_matrix.row(constraint_matrix.rows() - 1) = a.transpose();
    rhs.conservativeResize(rhs.size() + 1);
    rhs[rhs.size() - 1] = rhs_value;
    constraint_sense.push_back(sense);
  }

  void add_rows(const Matrix& a, Sense sense, const Vector& r) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) add_row(a.row(i).transpose(), sense, r[i]);
  }

  void validate() const {
    const Eigen::Index n = objective.size();
    require(constraint_matrix.cols() == n && lower.size() == n && upper.size() == n,
            ErrorKind::invalid_argument, "LP: variable dimensions inconsistent");
    require(rhs.size() == constraint_matrix.rows() &&
                static_cast<Eigen::Index>(constraint_sense.size()) == constraint_matrix.rows(),
            ErrorKind::invalid_argument, "LP: row dimensions inconsistent");
    require(objective.allFinite() && constraint_matrix.allFinite() && rhs.allFinite(),
            ErrorKind::invalid_argument, "LP: non-finite coefficient");
    for (Eigen::Index j = 0; j < n; ++j)
      require(!(lower[j] > upper[j]) && lower[j] < kInf && upper[j] > -kInf, ErrorKind::invalid_argument,
              "LP: invalid variable bounds");
  }
};

struct LpSolution {
  LpStatus status = LpStatus::numerical_failure;
  Vector x;
  Vector duals;          // one multiplier per row; >= rows carry duals >= 0, <= rows <= 0
  Vector reduced_costs;  // objective - A^T duals
  double objective_value = 0.0;
  int iterations = 0;

  bool optimal() const { return status == LpStatus::optimal; }
};

class LpBackend {
 public:
  virtual ~LpBackend() = default;
  virtual LpSolution solve(const LinearProgram& lp) = 0;
};

class SimplexSolver final : public LpBackend {
 public:
  explicit SimplexSolver(double feasibility_tol = feasibility_tolerance()) : tol_(feasibility_tol) {}

  LpSolution solve(const LinearProgram& lp) override {
    lp.validate();
    setup(lp);
    LpSolution out;

    // Phase 1: minimize the sum of artificials.
    Vector c1 = Vector::Zero(N_);
    for (Eigen::Index i = 0; i < m_; ++i)
      if (up_[art(i)] > 0.0) c1[art(i)] = 1.0;
    auto st = run(c1, false);
    out.iterations = iterations_;
    if (st == Run::failure) return fail(out);
    double infeas = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) infeas += x_[art(i)];
    if (infeas > tol_ * std::max(1.0, inf_norm(lp.rhs))) {
      out.status = LpStatus::infeasible;
      return out;
    }
    for (Eigen::Index i = 0; i < m_; ++i) {
      lo_[art(i)] = 0.0;
      up_[art(i)] = 0.0;
      if (!is_basic_[art(i)]) x_[art(i)] = 0.0;
    }
    drive_out_artificials();

    // Phase 2.
    Vector c2 = Vector::Zero(N_);
    c2.head(n_) = lp.objective;
    st = run(c2, true);
    out.iterations = iterations_;
    if (st == Run::failure) return fail(out);
    if (st == Run::unbounded) {
      out.status = LpStatus::unbounded;
      return out;
    }
    if (!refactor()) return fail(out);
    recompute_basic();

    out.x = x_.head(n_);
    const Vector cB = basic_costs(c2);
    out.duals = Binv_.transpose() * cB;
    out.reduced_costs = lp.objective - lp.constraint_matrix.transpose() * out.duals;
    out.objective_value = lp.objective.dot(out.x);
    out.status = certify(lp, out) ? LpStatus::optimal : LpStatus::numerical_failure;
    return out;
  }

 private:
  enum class Run { optimal, unbounded, failure };

  static constexpr double kPivotTol = 1e-9;
  static constexpr double kCostTol = 1e-9;
  static constexpr int kRefactorEvery = 50;

  Eigen::Index slack(Eigen::Index i) const { return n_ + i; }
  Eigen::Index art(Eigen::Index i) const { return n_ + m_ + i; }

  void setup(const LinearProgram& lp) {
    n_ = lp.variables();
    m_ = lp.constraints();
    N_ = n_ + 2 * m_;
    A_ = &lp.constraint_matrix;
    b_ = lp.rhs;
    lo_ = Vector(N_);
    up_ = Vector(N_);
    x_ = Vector::Zero(N_);
    sigma_ = Vector::Ones(m_);
    is_basic_.assign(static_cast<std::size_t>(N_), false);
    basis_.assign(static_cast<std::size_t>(m_), 0);
    iterations_ = 0;

    lo_.head(n_) = lp.lower;
    up_.head(n_) = lp.upper;
    for (Eigen::Index j = 0; j < n_; ++j) {
      if (std::isfinite(lo_[j])) x_[j] = lo_[j];
      else if (std::isfinite(up_[j])) x_[j] = up_[j];
    }
    const Vector r = b_ - lp.constraint_matrix * x_.head(n_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Eigen::Index s = slack(i);
      switch (lp.constraint_sense[static_cast<std::size_t>(i)]) {
        case Sense::ge: lo_[s] = -kInf; up_[s] = 0.0; break;
        case Sense::le: lo_[s] = 0.0; up_[s] = kInf; break;
        case Sense::eq: lo_[s] = 0.0; up_[s] = 0.0; break;
      }
      const Eigen::Index a = art(i);
      if (r[i] >= lo_[s] && r[i] <= up_[s]) {
        set_basic(i, s);
        x_[s] = r[i];
        lo_[a] = up_[a] = 0.0;
        x_[a] = 0.0;
      } else {
        const double sbar = std::clamp(r[i], lo_[s], up_[s]);
        x_[s] = sbar;
        sigma_[i] = r[i] > sbar ? 1.0 : -1.0;
        lo_[a] = 0.0;
        up_[a] = kInf;
        set_basic(i, a);
        x_[a] = std::abs(r[i] - sbar);
      }
    }
    Binv_ = Matrix::Identity(m_, m_);
    for (Eigen::Index i = 0; i < m_; ++i)
      if (basis_[static_cast<std::size_t>(i)] == art(i)) Binv_(i, i) = sigma_[i];
  }

  void set_basic(Eigen::Index row, Eigen::Index j) {
    basis_[static_cast<std::size_t>(row)] = j;
    is_basic_[static_cast<std::size_t>(j)] = true;
  }

  Vector column(Eigen::Index j) const {
    if (j < n_) return A_->col(j);
    Vector e = Vector::Zero(m_);
    if (j < n_ + m_) e[j - n_] = 1.0;
    else e[j - n_ - m_] = sigma_[j - n_ - m_];
    return e;
  }

  /// B^{-1} times column j.
  Vector ftran(Eigen::Index j) const {
    if (j < n_) return Binv_ * A_->col(j);
    if (j < n_ + m_) return Binv_.col(j - n_);
    return sigma_[j - n_ - m_] * Binv_.col(j - n_ - m_);
  }

  Vector basic_costs(const Vector& c) const {
    Vector cB(m_);
    for (Eigen::Index i = 0; i < m_; ++i) cB[i] = c[basis_[static_cast<std::size_t>(i)]];
    return cB;
  }

  bool refactor() {
    if (m_ == 0) return true;
    Matrix B(m_, m_);
    for (Eigen::Index i = 0; i < m_; ++i) B.col(i) = column(basis_[static_cast<std::size_t>(i)]);
    Eigen::PartialPivLU<Matrix> lu(B);
    if (!(lu.rcond() > 1e-13)) return false;
    Binv_ = lu.inverse();
    return Binv_.allFinite();
  }

  void recompute_basic() {
    Vector rhs = b_;
    for (Eigen::Index j = 0; j < N_; ++j) {
      if (is_basic_[static_cast<std::size_t>(j)] || x_[j] == 0.0) continue;
      if (j < n_) rhs -= x_[j] * A_->col(j);
      else if (j < n_ + m_) rhs[j - n_] -= x_[j];
      else rhs[j - n_ - m_] -= sigma_[j - n_ - m_] * x_[j];
    }
    const Vector xB = Binv_ * rhs;
    for (Eigen::Index i = 0; i < m_; ++i) x_[basis_[static_cast<std::size_t>(i)]] = xB[i];
  }

  void pivot(Eigen::Index row, Eigen::Index entering, const Vector& alpha) {
    const Eigen::RowVectorXd prow = Binv_.row(row) / alpha[row];
    Binv_.noalias() -= alpha * prow;
    Binv_.row(row) = prow;
    is_basic_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(row)])] = false;
    set_basic(row, entering);
  }

  Run run(const Vector& c, bool phase2) {
    const int limit = 20000 + 50 * static_cast<int>(m_ + n_);
    const int bland_after = 2 * static_cast<int>(m_ + n_);
    int degenerate = 0;
    bool bland = false;
    int since_refactor = 0;
    for (;;) {
      if (++iterations_ > limit) return Run::failure;
      if (since_refactor >= kRefactorEvery) {
        if (!refactor()) return Run::failure;
        recompute_basic();
        since_refactor = 0;
      }
      const Vector y = Binv_.transpose() * basic_costs(c);
      const double cscale = std::max(1.0, inf_norm(c));

      // Pricing.
      const Vector dx = c.head(n_) - A_->transpose() * y;
      Eigen::Index q = -1;
      double best = 0.0;
      int dir = 0;
      for (Eigen::Index j = 0; j < N_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)] || lo_[j] == up_[j]) continue;
        double d;
        if (j < n_) d = dx[j];
        else if (j < n_ + m_) d = c[j] - y[j - n_];
        else d = c[j] - sigma_[j - n_ - m_] * y[j - n_ - m_];
        const bool can_up = x_[j] < up_[j];
        const bool can_down = x_[j] > lo_[j];
        int jd = 0;
        if (d < -kCostTol * cscale && can_up) jd = 1;
        else if (d > kCostTol * cscale && can_down) jd = -1;
        if (jd == 0) continue;
        if (bland) {
          q = j;
          dir = jd;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
          dir = jd;
        }
      }
      if (q < 0) return Run::optimal;

      const Vector alpha = ftran(q);
      // Ratio test: basic i moves by -dir * alpha_i * theta.
      double theta = up_[q] - lo_[q];  // bound flip
      Eigen::Index leave = -1;
      double leave_mag = 0.0;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double rate = -dir * alpha[i];
        if (std::abs(alpha[i]) < kPivotTol) continue;
        const Eigen::Index bj = basis_[static_cast<std::size_t>(i)];
        double lim;
        if (rate < 0.0) {
          if (!std::isfinite(lo_[bj])) continue;
          lim = std::max(0.0, (x_[bj] - lo_[bj]) / -rate);
        } else {
          if (!std::isfinite(up_[bj])) continue;
          lim = std::max(0.0, (up_[bj] - x_[bj]) / rate);
        }
        const bool better = lim < theta - 1e-12 ||
                            (leave >= 0 && lim <= theta + 1e-12 &&
                             (bland ? bj < basis_[static_cast<std::size_t>(leave)]
                                    : std::abs(alpha[i]) > leave_mag));
        if (better) {
          theta = std::min(theta, lim);
          leave = i;
          leave_mag = std::abs(alpha[i]);
        }
      }
      if (!std::isfinite(theta)) {
        if (phase2) return Run::unbounded;
        return Run::failure;  // phase 1 is bounded below by zero
      }

      x_[q] += dir * theta;
      for (Eigen::Index i = 0; i < m_; ++i) x_[basis_[static_cast<std::size_t>(i)]] -= dir * theta * alpha[i];
      if (leave >= 0) {
        const Eigen::Index bj = basis_[static_cast<std::size_t>(leave)];
        // snap the leaving variable onto the bound it reached
        x_[bj] = (-dir * alpha[leave] < 0.0) ? lo_[bj] : up_[bj];
        pivot(leave, q, alpha);
        ++since_refactor;
      } else {
        x_[q] = dir > 0 ? up_[q] : lo_[q];
      }

      if (theta <= 1e-12) {
        if (++degenerate > bland_after) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
    }
  }

  void drive_out_artificials() {
    for (Eigen::Index r = 0; r < m_; ++r) {
      const Eigen::Index bj = basis_[static_cast<std::size_t>(r)];
      if (bj < n_ + m_) continue;
      for (Eigen::Index j = 0; j < n_ + m_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)]) continue;
        const Vector alpha = ftran(j);
        if (std::abs(alpha[r]) > 1e-7) {
          const double shift = x_[bj] / alpha[r];  // artificial is ~0; keep the system consistent
          for (Eigen::Index i = 0; i < m_; ++i) x_[basis_[static_cast<std::size_t>(i)]] -= shift * alpha[i];
          x_[j] += shift;
          x_[bj] = 0.0;
          pivot(r, j, alpha);
          break;
        }
      }
    }
  }

  bool certify(const LinearProgram& lp, const LpSolution& s) const {
    const double xs = std::max(1.0, inf_norm(s.x));
    const double ptol = 10.0 * tol_ * std::max({1.0, inf_norm(lp.rhs), xs});
    const Vector ax = lp.constraint_matrix * s.x;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double slack_i = ax[i] - lp.rhs[i];
      const Sense sense = lp.constraint_sense[static_cast<std::size_t>(i)];
      if (sense != Sense::le && slack_i < -ptol) return false;
      if (sense != Sense::ge && slack_i > ptol) return false;
    }
    for (Eigen::Index j = 0; j < n_; ++j)
      if (s.x[j] < lp.lower[j] - ptol || s.x[j] > lp.upper[j] + ptol) return false;

    // Dual feasibility and the bound-aware dual objective.
    const double dscale = std::max({1.0, inf_norm(lp.objective), inf_norm(s.duals)});
    const double dtol = 10.0 * tol_ * dscale;
    double dual_obj = lp.rhs.dot(s.duals);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Sense sense = lp.constraint_sense[static_cast<std::size_t>(i)];
      if (sense == Sense::ge && s.duals[i] < -dtol) return false;
      if (sense == Sense::le && s.duals[i] > dtol) return false;
    }
    for (Eigen::Index j = 0; j < n_; ++j) {
      const double d = s.reduced_costs[j];
      if (d > dtol) {
        if (!std::isfinite(lp.lower[j])) return false;
        dual_obj += d * lp.lower[j];
      } else if (d < -dtol) {
        if (!std::isfinite(lp.upper[j])) return false;
        dual_obj += d * lp.upper[j];
      } else {
        dual_obj += d * s.x[j];
      }
    }
    const double gap_scale = std::max({1.0, std::abs(s.objective_value), std::abs(dual_obj)});
    return std::abs(s.objective_value - dual_obj) <= 1e-6 * gap_scale;
  }

  LpSolution fail(LpSolution& out) const {
    out.status = LpStatus::numerical_failure;
    return out;
  }

  double tol_;
  Eigen::Index n_ = 0, m_ = 0, N_ = 0;
  const Matrix* A_ = nullptr;
  Vector b_, lo_, up_, x_, sigma_;
  std::vector<bool> is_basic_;
  std::vector<Eigen::Index> basis_;
  Matrix Binv_;
  int iterations_ = 0;
};

inline LpSolution solve_lp(const LinearProgram& lp) {
  SimplexSolver solver;
  return solver.solve(lp);
}

}  // namespace qcp
