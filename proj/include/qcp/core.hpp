#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Default feasibility tolerance shared by the LP backend and the solvers.
inline constexpr double kFeasTol = 1e-7;
/// Vertices closer than this (infinity norm, scaled by magnitude) are merged.
inline constexpr double kMergeTol = 1e-7;
/// Strict threshold for "phi < 0" style tests.
inline constexpr double kStrictTol = 1e-9;

enum class ErrorKind {
  invalid_argument,
  infeasible,          // S is empty, or a point is not in the image
  assumption_violated, // (B) or another solver precondition fails
  non_solid_cone,
  non_pointed_cone,
  empty_polyhedron,
  lineality,
  numerical,
  contract,            // objective or caller broke a documented contract
  parse,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::assumption_violated: return "assumption_violated";
    case ErrorKind::non_solid_cone: return "non_solid_cone";
    case ErrorKind::non_pointed_cone: return "non_pointed_cone";
    case ErrorKind::empty_polyhedron: return "empty_polyhedron";
    case ErrorKind::lineality: return "lineality";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::contract: return "contract";
    case ErrorKind::parse: return "parse";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Feasibility tolerance, overridable through QCP_LP_TOL.
inline double feasibility_tolerance() {
  static const double tol = [] {
    if (const char* env = std::getenv("QCP_LP_TOL")) {
      char* end = nullptr;
      const double v = std::strtod(env, &end);
      if (end != env && v > 0.0 && std::isfinite(v)) return v;
    }
    return kFeasTol;
  }();
  return tol;
}

inline double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

/// Magnitude used to turn absolute tolerances into relative ones.
inline double scale_of(const Vector& v) { return std::max(1.0, inf_norm(v)); }

inline bool lex_less(const Vector& a, const Vector& b) {
  const Eigen::Index n = std::min(a.size(), b.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return a.size() < b.size();
}

inline bool nearly_equal(const Vector& a, const Vector& b, double tol = kMergeTol) {
  if (a.size() != b.size()) return false;
  return inf_norm(a - b) <= tol * std::max(scale_of(a), scale_of(b));
}

inline Matrix columns_to_matrix(const std::vector<Vector>& cols, Eigen::Index rows) {
  Matrix m(rows, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = cols[j];
  return m;
}

inline Eigen::Index matrix_rank(const Matrix& m, double threshold = 1e-10) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::FullPivLU<Matrix> lu(m);
  lu.setThreshold(threshold);
  return lu.rank();
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace qcp
