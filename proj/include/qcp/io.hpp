#pragma once

// JSON (de)serialization: polyhedra and cones, problem files, results.
// Matrices are dense row-major arrays of arrays.

#include "qcp/problems.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace qcp {

using json = nlohmann::json;

namespace io {

inline json from_matrix(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json from_vector(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

/// Extended reals: +-inf are written as the strings "inf" / "-inf".
inline json from_extended(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

inline double to_extended(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw Error(ErrorKind::parse, "invalid extended real '" + s + "'");
  }
  if (!j.is_number()) throw Error(ErrorKind::parse, "expected a number");
  return j.get<double>();
}

inline json from_extended_vector(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(from_extended(v[i]));
  return a;
}

inline Vector to_extended_vector(const json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorKind::parse, std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = to_extended(j[i]);
  return v;
}

inline Vector to_vector(const json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorKind::parse, std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorKind::parse, std::string(what) + ": expected numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

/// `cols` is used when the array is empty (zero rows).
inline Matrix to_matrix(const json& j, const char* what, Eigen::Index cols = 0) {
  if (!j.is_array()) throw Error(ErrorKind::parse, std::string(what) + ": expected an array of rows");
  if (j.empty()) return Matrix(0, cols);
  const std::size_t c = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != c)
      throw Error(ErrorKind::parse, std::string(what) + ": rows must be arrays of equal length");
    for (std::size_t k = 0; k < c; ++k) {
      if (!j[i][k].is_number()) throw Error(ErrorKind::parse, std::string(what) + ": expected numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
    }
  }
  return m;
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::parse, std::string("missing field '") + key + "'");
  return j.at(key);
}

inline int int_field(const json& j, const char* key, std::optional<int> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw Error(ErrorKind::parse, std::string("missing field '") + key + "'");
  }
  if (!j.at(key).is_number_integer()) throw Error(ErrorKind::parse, std::string("field '") + key + "' must be an integer");
  return j.at(key).get<int>();
}

}  // namespace io

// --- polyhedra --------------------------------------------------------------

inline json to_json(const HPolyhedron& h) {
  return json{{"normals", io::from_matrix(h.normals)}, {"offsets", io::from_vector(h.offsets)}};
}
inline HPolyhedron hpolyhedron_from_json(const json& j) {
  return HPolyhedron(io::to_matrix(io::field(j, "normals"), "normals"), io::to_vector(io::field(j, "offsets"), "offsets"));
}

inline json to_json(const VPolyhedron& v) {
  json pts = json::array(), dirs = json::array();
  for (const auto& p : v.points) pts.push_back(io::from_vector(p));
  for (const auto& d : v.directions) dirs.push_back(io::from_vector(d));
  return json{{"points", pts}, {"directions", dirs}};
}
inline VPolyhedron vpolyhedron_from_json(const json& j) {
  VPolyhedron v;
  for (const auto& p : io::field(j, "points")) v.points.push_back(io::to_vector(p, "points"));
  if (j.contains("directions"))
    for (const auto& d : j.at("directions")) v.directions.push_back(io::to_vector(d, "directions"));
  v.validate();
  return v;
}

inline json to_json(const PPolyhedron& p) {
  return json{{"A", io::from_matrix(p.A)}, {"B", io::from_matrix(p.B)}, {"b", io::from_vector(p.b)}};
}
inline PPolyhedron ppolyhedron_from_json(const json& j) {
  PPolyhedron p;
  p.A = io::to_matrix(io::field(j, "A"), "A");
  p.b = io::to_vector(io::field(j, "b"), "b");
  p.B = j.contains("B") ? io::to_matrix(j.at("B"), "B") : Matrix(p.A.rows(), 0);
  if (p.B.rows() == 0 && p.A.rows() > 0) p.B = Matrix(p.A.rows(), 0);
  p.validate();
  return p;
}

inline json to_json(const PolyCone& c) { return json{{"Y", io::from_matrix(c.Y)}, {"Z", io::from_matrix(c.Z)}}; }
/// Either field may be omitted; the missing one is computed.
inline PolyCone polycone_from_json(const json& j, Eigen::Index q) {
  const bool hasY = j.contains("Y"), hasZ = j.contains("Z");
  if (hasY && hasZ) {
    Matrix Y = io::to_matrix(j.at("Y"), "Y"), Z = io::to_matrix(j.at("Z"), "Z");
    if (Y.size() == 0) Y = Matrix(q, 0);
    if (Z.size() == 0) Z = Matrix(q, 0);
    return PolyCone(Y, Z);
  }
  if (hasY) {
    Matrix Y = io::to_matrix(j.at("Y"), "Y");
    if (Y.size() == 0) Y = Matrix(q, 0);
    return PolyCone::from_generators(Y);
  }
  if (hasZ) return PolyCone::from_inequalities(io::to_matrix(j.at("Z"), "Z"));
  throw Error(ErrorKind::parse, "cone needs Y or Z");
}

// --- problem files ----------------------------------------------------------

/// A problem ready to solve plus the map from a solver result to the
/// solution of the original formulation (identity except for DC families).
struct LoadedProblem {
  std::string family;
  QcpProblem problem;
  std::function<Vector(const QcpResult&)> solution = [](const QcpResult& r) { return r.x; };
  json instance;
};

inline json lmp_to_json(const LmpInstance& inst) {
  return json{{"family", "lmp"},       {"A", io::from_matrix(inst.A)}, {"b", io::from_vector(inst.b)},
              {"l", io::from_extended_vector(inst.l)}, {"u", io::from_extended_vector(inst.u)}, {"C", io::from_matrix(inst.C)},
              {"d", io::from_vector(inst.d)}};
}

inline LmpInstance lmp_from_json(const json& j) {
  if (j.contains("seed") && !j.contains("A"))
    return gen_lmp_random(io::int_field(j, "q"), io::int_field(j, "m"), io::int_field(j, "n"),
                          static_cast<std::uint64_t>(io::int_field(j, "seed")));
  LmpInstance inst;
  inst.A = io::to_matrix(io::field(j, "A"), "A");
  inst.b = io::to_vector(io::field(j, "b"), "b");
  inst.C = io::to_matrix(io::field(j, "C"), "C");
  const Eigen::Index n = inst.A.cols();
  inst.l = j.contains("l") ? io::to_extended_vector(j.at("l"), "l") : Vector::Constant(n, -kInf);
  inst.u = j.contains("u") ? io::to_extended_vector(j.at("u"), "u") : Vector::Constant(n, kInf);
  inst.d = j.contains("d") ? io::to_vector(j.at("d"), "d") : Vector::Zero(inst.C.rows());
  return inst;
}

/// Builtin objectives for raw problems: product (params d), neg_squared_norm,
/// example41, nonsolid, linear (params w), constant (params value).
inline Objective builtin_objective(const std::string& name, const json& params, Eigen::Index q) {
  Objective f;
  f.description = name;
  if (name == "product") {
    const Vector d = params.contains("d") ? io::to_vector(params.at("d"), "d") : Vector::Zero(q);
    f.eval = [d](const Vector& y) {
      double p = 1.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] + d[i] < 0.0) return -kInf;
        p *= y[i] + d[i];
      }
      return p;
    };
  } else if (name == "neg_squared_norm") {
    f.eval = [](const Vector& y) { return -y.squaredNorm(); };
  } else if (name == "example41") {
    f = make_example_41().f;
  } else if (name == "nonsolid") {
    f = make_nonsolid_example().f;
  } else if (name == "linear") {
    const Vector w = io::to_vector(io::field(params, "w"), "w");
    f.eval = [w](const Vector& y) { return w.dot(y); };
  } else if (name == "constant") {
    const double v = io::to_extended(io::field(params, "value"));
    f.eval = [v](const Vector&) { return v; };
  } else {
    throw Error(ErrorKind::parse, "unknown objective '" + name + "'");
  }
  return f;
}

inline LoadedProblem dc_loaded(const DcInstance& dc, std::string family, int q) {
  LoadedProblem lp;
  lp.family = std::move(family);
  lp.problem = make_dc_primal(dc);
  const auto recover = dc.recover;
  lp.solution = [recover, q](const QcpResult& r) { return recover(r.y.head(q)); };
  return lp;
}

inline LoadedProblem load_problem(const json& j) {
  const std::string family = io::field(j, "family").get<std::string>();
  LoadedProblem out;
  if (family == "lmp") {
    out.problem = make_lmp(lmp_from_json(j));
  } else if (family == "cqp") {
    const int q = io::int_field(j, "q"), n = io::int_field(j, "n");
    out.problem = j.contains("seed") ? make_cqp_seeded(q, n, static_cast<std::uint64_t>(io::int_field(j, "seed")))
                                     : make_cqp(q, n);
    if (j.contains("P")) out.problem.vlp.P = io::to_matrix(j.at("P"), "P");
    require(out.problem.vlp.P.rows() == q && out.problem.vlp.P.cols() == n, ErrorKind::parse, "cqp: P has wrong shape");
  } else if (family == "dc_primal" || family == "dc_dual") {
    const int q = io::int_field(j, "q");
    out = dc_loaded(make_dc_chain(q, family == "dc_dual"), family, q);
  } else if (family == "boundary") {
    const int q = io::int_field(j, "q"), m = io::int_field(j, "m");
    std::optional<double> c;
    if (j.contains("c")) c = j.at("c").get<double>();
    out = dc_loaded(make_boundary_example(q, m, c).dc, family, q);
  } else if (family == "example41") {
    out.problem = make_example_41();
  } else if (family == "nonsolid") {
    out.problem = make_nonsolid_example();
  } else if (family == "raw_qcp") {
    QcpProblem p;
    p.vlp.P = io::to_matrix(io::field(j, "P"), "P");
    p.vlp.A = io::to_matrix(io::field(j, "A"), "A", p.vlp.P.cols());
    p.vlp.b = io::to_vector(io::field(j, "b"), "b");
    p.vlp.cone = polycone_from_json(io::field(j, "cone"), p.vlp.P.rows());
    if (j.contains("c")) p.vlp.c = io::to_vector(j.at("c"), "c");
    const json& obj = io::field(j, "objective");
    p.f = builtin_objective(io::field(obj, "name").get<std::string>(), obj.value("params", json::object()),
                            p.vlp.P.rows());
    out.problem = std::move(p);
  } else {
    throw Error(ErrorKind::parse, "unknown family '" + family + "'");
  }
  out.family = family;
  out.instance = j;
  return out;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, "malformed JSON in '" + path + "': " + e.what());
  }
}

// --- results ----------------------------------------------------------------

inline json result_to_json(const QcpResult& r, const Vector& solution, double wall_time) {
  return json{{"status", "ok"},
              {"algorithm", r.algorithm},
              {"value", io::from_extended(r.value)},
              {"argument", io::from_vector(solution)},
              {"x", io::from_vector(r.x)},
              {"y", io::from_vector(r.y)},
              {"iterations", r.iterations},
              {"lp_solves", r.lp_solves},
              {"failed_cuts", r.failed_cuts},
              {"lifted", r.lifted},
              {"flipped", r.flipped},
              {"wall_time", wall_time}};
}

/// Inverse of result_to_json for the solver fields (history is not stored).
inline QcpResult result_from_json(const json& j) {
  if (io::field(j, "status").get<std::string>() != "ok") throw Error(ErrorKind::parse, "result is an error record");
  QcpResult r;
  r.algorithm = io::field(j, "algorithm").get<std::string>();
  r.value = io::to_extended(io::field(j, "value"));
  r.x = io::to_vector(io::field(j, "x"), "x");
  r.y = io::to_vector(io::field(j, "y"), "y");
  r.iterations = io::int_field(j, "iterations");
  r.lp_solves = io::int_field(j, "lp_solves");
  r.failed_cuts = io::int_field(j, "failed_cuts");
  r.lifted = io::field(j, "lifted").get<bool>();
  r.flipped = io::field(j, "flipped").get<bool>();
  return r;
}

inline json error_to_json(const std::string& kind, const std::string& message) {
  return json{{"status", "error"}, {"kind", kind}, {"message", message}};
}

}  // namespace qcp
