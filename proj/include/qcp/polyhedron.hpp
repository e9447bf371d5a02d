#pragma once

// Polyhedra and polyhedral cones in H-, V- and P-representation, plus an
// incremental double-description engine that keeps the V-representation of
// an outer approximation synchronized while half-spaces are added.

#include "qcp/core.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

namespace qcp {

/// {y : normals * y >= offsets}
struct HPolyhedron {
  Matrix normals;
  Vector offsets;

  HPolyhedron() = default;
  HPolyhedron(Matrix n, Vector o) : normals(std::move(n)), offsets(std::move(o)) { validate(); }

  Eigen::Index dim() const { return normals.cols(); }
  Eigen::Index rows() const { return normals.rows(); }

  void validate() const {
    require(normals.cols() >= 1, ErrorKind::invalid_argument, "H-representation needs dimension >= 1");
    require(normals.rows() == offsets.size(), ErrorKind::invalid_argument,
            "H-representation: normals/offsets row mismatch");
    require(normals.allFinite() && offsets.allFinite(), ErrorKind::invalid_argument,
            "H-representation has non-finite entries");
  }

  bool contains(const Vector& y, double tol = kFeasTol) const {
    if (rows() == 0) return true;
    const Vector slack = normals * y - offsets;
    return slack.minCoeff() >= -tol * scale_of(y);
  }

  void add_row(const Vector& w, double gamma) {
    normals.conservativeResize(normals.rows() + 1, Eigen::NoChange);
    normals.row(normals.rows() - 1) = w.transpose();
    offsets.conservativeResize(offsets.size() + 1);
    offsets[offsets.size() - 1] = gamma;
  }
};

/// conv(points) + cone(directions)
struct VPolyhedron {
  std::vector<Vector> points;
  std::vector<Vector> directions;

  void validate() const {
    require(!points.empty(), ErrorKind::invalid_argument, "V-representation needs at least one point");
    const Eigen::Index q = points.front().size();
    for (const auto& p : points)
      require(p.size() == q && p.allFinite(), ErrorKind::invalid_argument, "V-representation: bad point");
    for (const auto& d : directions)
      require(d.size() == q && inf_norm(d) > 0.0, ErrorKind::invalid_argument,
              "V-representation: directions must be nonzero");
  }
};

/// {x : exists u, A x + B u >= b}
struct PPolyhedron {
  Matrix A;
  Matrix B;
  Vector b;

  Eigen::Index dim() const { return A.cols(); }
  Eigen::Index aux_dim() const { return B.cols(); }

  void validate() const {
    require(A.rows() == B.rows() && A.rows() == b.size(), ErrorKind::invalid_argument,
            "P-representation: row counts of A, B, b differ");
    require(A.allFinite() && B.allFinite() && b.allFinite(), ErrorKind::invalid_argument,
            "P-representation has non-finite entries");
  }
};

namespace detail {

class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}

  std::size_t size() const { return size_; }
  void push_back(bool v) {
    if (size_ % 64 == 0) words_.push_back(0);
    ++size_;
    if (v) set(size_ - 1);
  }
  void set(std::size_t i) { words_[i / 64] |= (std::uint64_t{1} << (i % 64)); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }
  Bitset operator&(const Bitset& o) const {
    Bitset r(*this);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= o.words_[i];
    return r;
  }
  bool subset_of(const Bitset& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if ((words_[i] & ~o.words_[i]) != 0) return false;
    return true;
  }

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Extreme ray of a pointed cone together with the set of tight constraint rows.
struct Ray {
  std::uint64_t id = 0;
  Vector r;
  Bitset tight;
};

inline void normalize_ray(Vector& r) {
  const double n = inf_norm(r);
  if (n > 0.0) r /= n;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (std::abs(r[i]) < 1e-14) r[i] = 0.0;
}

/// Double-description engine for a pointed cone {r : rows * r >= 0}.
class ConeEnumerator {
 public:
  static constexpr double kTight = 1e-9;

  struct StepReport {
    std::size_t removed = 0;
    std::size_t added = 0;
    std::size_t on_hyperplane = 0;
    double min_removed_violation = kInf;  // smallest |row . r| over removed rays
  };

  ConeEnumerator() = default;

  /// `normalize_prefix` is the number of leading coordinates used to scale
  /// rows; for homogenized polyhedra this excludes the offset coordinate so
  /// that tightness is measured relative to the geometry, not the offset.
  static ConeEnumerator from_rows(const Matrix& rows, Eigen::Index normalize_prefix) {
    ConeEnumerator e;
    e.dim_ = rows.cols();
    e.prefix_ = normalize_prefix;
    const Eigen::Index d = e.dim_;

    std::vector<Vector> normalized;
    normalized.reserve(static_cast<std::size_t>(rows.rows()));
    for (Eigen::Index i = 0; i < rows.rows(); ++i) normalized.push_back(e.normalize_row(rows.row(i).transpose()));

    // Greedy choice of d linearly independent rows for the initial simplicial cone.
    std::vector<std::size_t> basis;
    Matrix ortho(d, 0);
    for (std::size_t i = 0; i < normalized.size() && static_cast<Eigen::Index>(basis.size()) < d; ++i) {
      Vector v = normalized[i];
      for (Eigen::Index k = 0; k < ortho.cols(); ++k) v -= ortho.col(k).dot(v) * ortho.col(k);
      for (Eigen::Index k = 0; k < ortho.cols(); ++k) v -= ortho.col(k).dot(v) * ortho.col(k);
      const double nv = v.norm();
      if (nv > 1e-9 * std::max(1.0, normalized[i].norm())) {
        ortho.conservativeResize(Eigen::NoChange, ortho.cols() + 1);
        ortho.col(ortho.cols() - 1) = v / nv;
        basis.push_back(i);
      }
    }
    if (static_cast<Eigen::Index>(basis.size()) < d)
      throw Error(ErrorKind::lineality, "constraint system has a nontrivial lineality space");

    Matrix mb(d, d);
    for (Eigen::Index k = 0; k < d; ++k) mb.row(k) = normalized[basis[static_cast<std::size_t>(k)]].transpose();
    const Matrix inv = mb.fullPivLu().inverse();

    for (std::size_t k = 0; k < basis.size(); ++k) e.rows_.push_back(normalized[basis[k]]);
    for (Eigen::Index j = 0; j < d; ++j) {
      Ray ray;
      ray.id = e.next_id_++;
      ray.r = inv.col(j);
      normalize_ray(ray.r);
      ray.tight = Bitset(0);
      for (Eigen::Index k = 0; k < d; ++k) ray.tight.push_back(k != j);
      e.rays_.push_back(std::move(ray));
    }

    std::vector<bool> used(normalized.size(), false);
    for (auto i : basis) used[i] = true;
    for (std::size_t i = 0; i < normalized.size(); ++i)
      if (!used[i]) e.add_normalized_row(normalized[i]);
    return e;
  }

  Eigen::Index dim() const { return dim_; }
  const std::vector<Ray>& rays() const { return rays_; }
  std::size_t row_count() const { return rows_.size(); }

  StepReport add_row(const Vector& row) { return add_normalized_row(normalize_row(row)); }

 private:
  Vector normalize_row(const Vector& row) const {
    double n = prefix_ > 0 ? inf_norm(row.head(prefix_)) : 0.0;
    if (n == 0.0) n = inf_norm(row);
    require(n > 0.0, ErrorKind::invalid_argument, "zero constraint row");
    return row / n;
  }

  StepReport add_normalized_row(const Vector& a) {
    StepReport report;
    const std::size_t new_index = rows_.size();
    rows_.push_back(a);

    std::vector<double> val(rays_.size());
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < rays_.size(); ++i) {
      val[i] = a.dot(rays_[i].r);
      if (val[i] > kTight) {
        pos.push_back(i);
      } else if (val[i] < -kTight) {
        neg.push_back(i);
      } else {
        ++report.on_hyperplane;
      }
    }
    for (std::size_t i = 0; i < rays_.size(); ++i) rays_[i].tight.push_back(std::abs(val[i]) <= kTight);
    if (neg.empty()) return report;

    const std::size_t need = dim_ >= 2 ? static_cast<std::size_t>(dim_ - 2) : 0;
    std::vector<Ray> fresh;
    for (auto p : pos) {
      for (auto n : neg) {
        Bitset common = rays_[p].tight & rays_[n].tight;  // includes the new bit: false for both
        if (common.count() < need) continue;
        bool adjacent = true;
        for (std::size_t k = 0; k < rays_.size() && adjacent; ++k) {
          if (k == p || k == n) continue;
          if (common.subset_of(rays_[k].tight)) adjacent = false;
        }
        if (!adjacent) continue;
        Ray ray;
        ray.r = val[p] * rays_[n].r - val[n] * rays_[p].r;
        normalize_ray(ray.r);
        common.set(new_index);
        ray.tight = std::move(common);
        fresh.push_back(std::move(ray));
      }
    }

    std::vector<Ray> kept;
    kept.reserve(rays_.size() - neg.size() + fresh.size());
    for (std::size_t i = 0; i < rays_.size(); ++i) {
      if (val[i] < -kTight) {
        report.min_removed_violation = std::min(report.min_removed_violation, -val[i]);
        ++report.removed;
      } else {
        kept.push_back(std::move(rays_[i]));
      }
    }
    for (auto& ray : fresh) {
      const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const Ray& k) {
        return inf_norm(k.r - ray.r) <= kMergeTol;
      });
      if (duplicate) continue;
      ray.id = next_id_++;
      kept.push_back(std::move(ray));
      ++report.added;
    }
    rays_ = std::move(kept);
    return report;
  }

  Eigen::Index dim_ = 0;
  Eigen::Index prefix_ = 0;
  std::uint64_t next_id_ = 0;
  std::vector<Vector> rows_;
  std::vector<Ray> rays_;
};

}  // namespace detail

/// Generators of the cone {v : M^T v >= 0}; M is q x k. Handles a nontrivial
/// lineality space by returning +/- a basis of it next to the extreme rays of
/// the pointed part.
inline Matrix extreme_generators(const Matrix& M) {
  const Eigen::Index q = M.rows();
  std::vector<Vector> gens;
  Matrix range_basis(q, 0);
  Matrix kernel_basis;
  if (M.cols() == 0 || inf_norm(Eigen::Map<const Vector>(M.data(), M.size())) == 0.0) {
    kernel_basis = Matrix::Identity(q, q);
  } else {
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU);
    const Vector& s = svd.singularValues();
    const double cutoff = 1e-10 * std::max(1.0, s[0]);
    Eigen::Index r = 0;
    while (r < s.size() && s[r] > cutoff) ++r;
    range_basis = svd.matrixU().leftCols(r);
    kernel_basis = svd.matrixU().rightCols(q - r);
  }
  const Eigen::Index r = range_basis.cols();
  if (r > 0) {
    const Matrix rows = M.transpose() * range_basis;  // constraints in range coordinates
    auto e = detail::ConeEnumerator::from_rows(rows, r);
    for (const auto& ray : e.rays()) gens.push_back(range_basis * ray.r);
  }
  for (Eigen::Index k = 0; k < kernel_basis.cols(); ++k) {
    gens.push_back(kernel_basis.col(k));
    gens.push_back(-kernel_basis.col(k));
  }
  for (auto& g : gens) detail::normalize_ray(g);
  return columns_to_matrix(gens, q);
}

/// Ordering cone C = {Y lambda : lambda >= 0} = {y : Z^T y >= 0}.
struct PolyCone {
  Matrix Y;  // q x o generators
  Matrix Z;  // q x p inequality normals

  PolyCone() = default;
  PolyCone(Matrix y, Matrix z) : Y(std::move(y)), Z(std::move(z)) {
    require(Y.rows() == Z.rows(), ErrorKind::invalid_argument, "cone: Y and Z have different row counts");
  }

  static PolyCone from_generators(const Matrix& Y) { return PolyCone(Y, extreme_generators(Y)); }
  static PolyCone from_inequalities(const Matrix& Z) { return PolyCone(extreme_generators(Z), Z); }
  static PolyCone nonnegative_orthant(Eigen::Index q) {
    return PolyCone(Matrix::Identity(q, q), Matrix::Identity(q, q));
  }
  static PolyCone trivial(Eigen::Index q) { return from_generators(Matrix(q, 0)); }

  Eigen::Index dim() const { return Y.rows(); }
  bool is_solid() const { return matrix_rank(Y) == dim(); }
  bool is_pointed() const { return matrix_rank(Z) == dim(); }

  bool contains(const Vector& y, double tol = kFeasTol) const {
    if (Z.cols() == 0) return true;
    return (Z.transpose() * y).minCoeff() >= -tol * scale_of(y);
  }

  /// Every generator satisfies the inequality description.
  bool is_consistent(double tol = kFeasTol) const {
    for (Eigen::Index j = 0; j < Y.cols(); ++j)
      if (!contains(Y.col(j), tol)) return false;
    return true;
  }
};

/// C+ = {y* : y^T y* >= 0 for all y in C}; generator and inequality roles swap.
inline PolyCone positive_dual(const PolyCone& cone) { return PolyCone(cone.Z, cone.Y); }

/// A point c with Z^T c > 0 and |c_q| = 1. The caller handles c_q = -1 by
/// switching to (-C, -P, -c).
inline Vector cone_interior_point(const PolyCone& cone) {
  const Eigen::Index q = cone.dim();
  require(q >= 1, ErrorKind::invalid_argument, "cone of dimension 0");
  if (!cone.is_solid()) throw Error(ErrorKind::non_solid_cone, "ordering cone has empty interior");
  Vector c = cone.Y.rowwise().sum() / static_cast<double>(cone.Y.cols());
  if (std::abs(c[q - 1]) <= 1e-12 * scale_of(c)) {
    for (Eigen::Index j = 0; j < cone.Y.cols(); ++j) {
      if (std::abs(cone.Y(q - 1, j)) > 1e-12 * scale_of(cone.Y.col(j))) {
        c += 0.5 * cone.Y.col(j) * inf_norm(c) / inf_norm(cone.Y.col(j));
        break;
      }
    }
  }
  return c / std::abs(c[q - 1]);
}

inline bool is_interior(const PolyCone& cone, const Vector& c) {
  if (cone.Z.cols() == 0) return true;
  return (cone.Z.transpose() * c).minCoeff() > 1e-12 * scale_of(c);
}

/// Shrinking outer approximation: an H-representation with a synchronized
/// vertex/direction set and the set of vertices already confirmed to lie in
/// the target image.
class OuterApprox {
 public:
  struct Vertex {
    std::uint64_t id;
    Vector point;
  };

  struct CutReport {
    std::size_t removed = 0;
    std::size_t added = 0;
    std::size_t on_hyperplane = 0;
    double min_removed_violation = kInf;
  };

  OuterApprox() = default;

  /// Bootstraps the vertex set of `h` from scratch.
  static OuterApprox from_hrep(const HPolyhedron& h) {
    h.validate();
    OuterApprox o;
    o.hrep_ = h;
    const Eigen::Index q = h.dim();
    Matrix rows(h.rows() + 1, q + 1);
    rows.setZero();
    rows(0, q) = 1.0;  // s >= 0
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      rows.block(i + 1, 0, 1, q) = h.normals.row(i);
      rows(i + 1, q) = -h.offsets[i];
    }
    o.dd_ = detail::ConeEnumerator::from_rows(rows, q);
    if (o.vertex_count() == 0) throw Error(ErrorKind::empty_polyhedron, "polyhedron is empty");
    return o;
  }

  Eigen::Index dim() const { return hrep_.dim(); }
  const HPolyhedron& hrep() const { return hrep_; }

  std::vector<Vertex> vertices() const {
    std::vector<Vertex> out;
    for (const auto& ray : dd_.rays()) {
      const double s = ray.r[dim()];
      if (s > kPointThreshold) out.push_back({ray.id, ray.r.head(dim()) / s});
    }
    return out;
  }

  std::vector<Vector> vertex_points() const {
    std::vector<Vector> out;
    for (auto& v : vertices()) out.push_back(std::move(v.point));
    return out;
  }

  std::vector<Vector> directions() const {
    std::vector<Vector> out;
    for (const auto& ray : dd_.rays()) {
      if (ray.r[dim()] <= kPointThreshold) {
        Vector d = ray.r.head(dim());
        detail::normalize_ray(d);
        out.push_back(std::move(d));
      }
    }
    return out;
  }

  std::size_t vertex_count() const {
    return static_cast<std::size_t>(std::count_if(dd_.rays().begin(), dd_.rays().end(),
                                                  [&](const detail::Ray& r) { return r.r[dim()] > kPointThreshold; }));
  }

  VPolyhedron to_vrep() const { return VPolyhedron{vertex_points(), directions()}; }

  /// Intersects with {y : w^T y >= gamma}. Strong guarantee: on error the
  /// approximation is left unchanged.
  CutReport cut(const Vector& w, double gamma) {
    require(w.size() == dim(), ErrorKind::invalid_argument, "cut normal has wrong dimension");
    require(w.allFinite() && std::isfinite(gamma), ErrorKind::invalid_argument, "cut is not finite");
    Vector row(dim() + 1);
    row.head(dim()) = w;
    row[dim()] = -gamma;
    detail::ConeEnumerator next = dd_;
    const auto step = next.add_row(row);
    const bool has_point = std::any_of(next.rays().begin(), next.rays().end(),
                                       [&](const detail::Ray& r) { return r.r[dim()] > kPointThreshold; });
    if (!has_point) throw Error(ErrorKind::empty_polyhedron, "cut leaves an empty polyhedron");
    dd_ = std::move(next);
    hrep_.add_row(w, gamma);
    std::set<std::uint64_t> alive;
    for (const auto& r : dd_.rays()) alive.insert(r.id);
    for (auto it = processed_.begin(); it != processed_.end();) {
      it = alive.count(*it) ? std::next(it) : processed_.erase(it);
    }
    return CutReport{step.removed, step.added, step.on_hyperplane, step.min_removed_violation};
  }

  void mark_processed(std::uint64_t id) { processed_.insert(id); }
  bool is_processed(std::uint64_t id) const { return processed_.count(id) > 0; }
  const std::set<std::uint64_t>& processed() const { return processed_; }

 private:
  static constexpr double kPointThreshold = 1e-13;

  HPolyhedron hrep_;
  detail::ConeEnumerator dd_;
  std::set<std::uint64_t> processed_;
};

inline OuterApprox add_halfspace(OuterApprox approx, const Vector& w, double gamma) {
  approx.cut(w, gamma);
  return approx;
}

/// V-representation of a nonempty pointed polyhedron.
inline VPolyhedron dd_convert(const HPolyhedron& h) { return OuterApprox::from_hrep(h).to_vrep(); }

/// {y : normals * y >= 0} with generators.
inline PolyCone recession_cone(const HPolyhedron& h) {
  h.validate();
  const Matrix Z = h.normals.transpose();
  return PolyCone(extreme_generators(Z), Z);
}

}  // namespace qcp
