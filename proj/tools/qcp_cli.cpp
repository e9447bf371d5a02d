// qcp_cli: solve, generate and benchmark quasi-concave problems.
//
//   qcp_cli solve --builtin example41 --algorithm primal
//   qcp_cli solve --input lmp.json --algorithm dual --log it.csv --dump-approx plots/ex
//   qcp_cli gen lmp --q 2 --m 20 --n 30 --seed 1 --output lmp.json
//   qcp_cli bench lmp --grid 2:20:30,3:50:30 --seeds 1-10
//
// Exit codes: 0 success, 1 solver failure, 2 usage or parse error.

#include "qcp/qcp.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

namespace {

using namespace qcp;

constexpr int kExitSolver = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorKind k) {
  return (k == ErrorKind::parse || k == ErrorKind::invalid_argument) ? kExitUsage : kExitSolver;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + tok + "'");
    }
  }
  return out;
}

int parse_int(const std::string& tok) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw UsageError("not an integer: '" + tok + "'");
  }
}

/// "1-10" or "1,2,5" (or a mix: "1-3,7").
std::vector<int> parse_seeds(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const auto dash = tok.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(parse_int(tok));
    } else {
      const int lo = parse_int(tok.substr(0, dash)), hi = parse_int(tok.substr(dash + 1));
      if (hi < lo) throw UsageError("empty seed range '" + tok + "'");
      for (int k = lo; k <= hi; ++k) out.push_back(k);
    }
  }
  if (out.empty()) throw UsageError("empty seed list");
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot write '" + path + "'");
  os << text;
}

// --- instance generation -----------------------------------------------------

struct GenParams {
  int q = 2, m = 20, n = 30, seed = 1;
  bool seed_given = false;
  std::optional<double> c;
};

json generate_instance(const std::string& family, const GenParams& g) {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw UsageError(msg);
  };
  if (family == "lmp") {
    need(g.q >= 1 && g.m >= 1 && g.n >= 1, "lmp needs --q, --m, --n >= 1");
    json j = lmp_to_json(gen_lmp_random(g.q, g.m, g.n, static_cast<std::uint64_t>(g.seed)));
    j["q"] = g.q;
    j["m"] = g.m;
    j["n"] = g.n;
    j["seed"] = g.seed;
    return j;
  }
  if (family == "cqp") {
    need(g.q >= 1 && g.n >= g.q, "cqp needs 1 <= --q <= --n");
    const QcpProblem p = g.seed_given ? make_cqp_seeded(g.q, g.n, static_cast<std::uint64_t>(g.seed))
                                      : make_cqp(g.q, g.n);
    json j{{"family", "cqp"}, {"q", g.q}, {"n", g.n}, {"P", io::from_matrix(p.vlp.P)}};
    if (g.seed_given) j["seed"] = g.seed;
    return j;
  }
  if (family == "dc_primal" || family == "dc_dual") {
    need(g.q >= 2, family + " needs --q >= 2");
    return json{{"family", family}, {"q", g.q}};
  }
  if (family == "boundary") {
    need(g.q >= 1 && g.m >= 1, "boundary needs --q, --m >= 1");
    json j{{"family", "boundary"}, {"q", g.q}, {"m", g.m}};
    if (g.c) j["c"] = *g.c;
    return j;
  }
  if (family == "example41" || family == "nonsolid") return json{{"family", family}};
  throw UsageError("unknown family '" + family + "'");
}

// --- solve -------------------------------------------------------------------

struct SolveConfig {
  std::string algorithm = "primal";
  std::string builtin, input, output, log, dump_approx, c;
  GenParams gen;
};

/// Writes the vertices and extreme directions of an outer set as CSV.
void dump_approx_csv(const std::string& path, const OuterApprox& O) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot write '" + path + "'");
  os.precision(17);
  const Eigen::Index q = O.dim();
  os << "kind";
  for (Eigen::Index i = 0; i < q; ++i) os << ",y" << i + 1;
  os << "\n";
  for (const auto& v : O.vertex_points()) {
    os << "vertex";
    for (Eigen::Index i = 0; i < q; ++i) os << "," << v[i];
    os << "\n";
  }
  for (const auto& d : O.directions()) {
    os << "direction";
    for (Eigen::Index i = 0; i < q; ++i) os << "," << d[i];
    os << "\n";
  }
}

using Observer = std::function<void(const OuterApprox&, const IterationRecord&)>;

Observer make_dumper(const std::string& prefix, const std::string& tag) {
  if (prefix.empty()) return {};
  return [prefix, tag](const OuterApprox& O, const IterationRecord& rec) {
    dump_approx_csv(prefix + "_" + tag + "_" + std::to_string(rec.iteration) + ".csv", O);
  };
}

/// The VLP the Benson algorithms run on: lifted when the cone is not solid,
/// c chosen, normalized and oriented so that c_q = 1.
VlpProblem prepare_vlp(const QcpProblem& p, bool& flipped) {
  QcpProblem work = p;
  if (!work.vlp.cone.is_pointed()) throw Error(ErrorKind::non_pointed_cone, "ordering cone is not pointed");
  if (!work.vlp.cone.is_solid()) work = lift_problem(work).lifted;
  if (work.vlp.c.size() == 0) work.vlp.c = cone_interior_point(work.vlp.cone);
  const double cq = work.vlp.c[work.vlp.q() - 1];
  require(cq != 0.0, ErrorKind::invalid_argument, "interior point must have c_q != 0");
  work.vlp.c /= std::abs(cq);
  flipped = cq < 0.0;
  if (flipped) work = flip_orientation(work);
  return work.vlp;
}

json points_json(const std::vector<Vector>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(io::from_vector(p));
  return a;
}

json run_solve(const SolveConfig& cfg) {
  if (cfg.builtin.empty() == cfg.input.empty()) throw UsageError("give exactly one of --builtin or --input");
  const json instance = cfg.input.empty() ? generate_instance(cfg.builtin, cfg.gen) : read_json_file(cfg.input);
  LoadedProblem loaded = load_problem(instance);
  if (!cfg.c.empty()) {
    const auto c = parse_doubles(cfg.c);
    if (static_cast<Eigen::Index>(c.size()) != loaded.problem.vlp.q())
      throw UsageError("--c must have " + std::to_string(loaded.problem.vlp.q()) + " entries");
    loaded.problem.vlp.c = Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
  }

  std::vector<IterationRecord> log;
  json out;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

  if (cfg.algorithm == "benson-primal" || cfg.algorithm == "benson-dual") {
    bool flipped = false;
    const VlpProblem vlp = prepare_vlp(loaded.problem, flipped);
    BensonOptions opts;
    if (cfg.algorithm == "benson-primal") {
      opts.observer = make_dumper(cfg.dump_approx, "primal");
      const PrimalImage img = benson_primal(vlp, initial_outer_approx(vlp), opts);
      log = img.log;
      out = json{{"status", "ok"},         {"algorithm", cfg.algorithm},       {"vertices", points_json(img.vertices)},
                 {"directions", points_json(img.directions)}, {"preimages", points_json(img.preimages)},
                 {"iterations", img.iterations}, {"lp_solves", img.lp_solves}, {"hrep", to_json(img.approx.hrep())}};
    } else {
      opts.observer = make_dumper(cfg.dump_approx, "dual");
      const DualImage img = benson_dual(vlp, opts);
      log = img.log;
      out = json{{"status", "ok"},         {"algorithm", cfg.algorithm}, {"vertices", points_json(img.vertices)},
                 {"iterations", img.iterations}, {"lp_solves", img.lp_solves}, {"hrep", to_json(img.approx.hrep())}};
    }
    out["c"] = io::from_vector(vlp.c);
    out["flipped"] = flipped;
    out["lifted"] = vlp.q() != loaded.problem.vlp.q();
    out["wall_time"] = elapsed();
  } else {
    Algorithm alg;
    if (cfg.algorithm == "primal") alg = Algorithm::primal;
    else if (cfg.algorithm == "dual") alg = Algorithm::dual;
    else if (cfg.algorithm == "dual-se") alg = Algorithm::dual_se;
    else throw UsageError("unknown algorithm '" + cfg.algorithm + "'");
    QcpOptions opts;
    opts.primal_observer = make_dumper(cfg.dump_approx, "primal");
    opts.dual_observer = make_dumper(cfg.dump_approx, "dual");
    const QcpResult r = solve_qcp(loaded.problem, alg, opts);
    const double wall = elapsed();
    log = r.history;
    out = result_to_json(r, loaded.solution(r), wall);
  }
  out["family"] = loaded.family;

  if (!cfg.log.empty()) {
    std::ofstream os(cfg.log);
    if (!os) throw UsageError("cannot write '" + cfg.log + "'");
    write_iteration_log_csv(os, log);
  }
  return out;
}

// --- bench -------------------------------------------------------------------

struct BenchCell {
  int q = 0, m = 0, n = 0;
};

std::vector<BenchCell> parse_grid(const std::string& family, const std::string& grid) {
  std::vector<BenchCell> cells;
  std::stringstream ss(grid);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::vector<int> parts;
    std::stringstream ts(tok);
    std::string p;
    while (std::getline(ts, p, ':')) parts.push_back(parse_int(p));
    BenchCell c;
    if (family == "lmp" && parts.size() == 3) c = {parts[0], parts[1], parts[2]};
    else if (family == "cqp" && parts.size() == 2) c = {parts[0], 0, parts[1]};
    else if ((family == "dc_primal" || family == "dc_dual") && parts.size() == 1) c = {parts[0], 0, 0};
    else throw UsageError("bad grid cell '" + tok + "' for family " + family);
    cells.push_back(c);
  }
  if (cells.empty()) throw UsageError("empty grid");
  return cells;
}

struct BenchRun {
  bool ok = false;
  double time = 0.0;
  int iterations = 0, lp_solves = 0, failed_cuts = 0;
  std::string error;
};

BenchRun bench_one(const std::string& family, const BenchCell& cell, int seed, Algorithm alg) {
  BenchRun run;
  try {
    GenParams g;
    g.q = cell.q;
    g.m = cell.m;
    g.n = cell.n;
    g.seed = seed;
    g.seed_given = true;
    const LoadedProblem lp = load_problem(generate_instance(family, g));
    const auto t0 = std::chrono::steady_clock::now();
    const QcpResult r = solve_qcp(lp.problem, alg);
    run.time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    run.iterations = r.iterations;
    run.lp_solves = r.lp_solves;
    run.failed_cuts = r.failed_cuts;
    run.ok = true;
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  return run;
}

std::string run_bench(const std::string& family, const std::string& grid, const std::string& seeds_arg,
                      const std::string& algorithms, int jobs) {
  const auto cells = parse_grid(family, grid);
  const auto seeds = parse_seeds(seeds_arg);
  std::vector<Algorithm> algs;
  {
    std::stringstream ss(algorithms);
    std::string a;
    while (std::getline(ss, a, ',')) {
      if (a == "primal") algs.push_back(Algorithm::primal);
      else if (a == "dual") algs.push_back(Algorithm::dual);
      else if (a == "dual-se") algs.push_back(Algorithm::dual_se);
      else throw UsageError("unknown algorithm '" + a + "'");
    }
    if (algs.empty()) throw UsageError("empty algorithm list");
  }
  if (jobs < 1) throw UsageError("--jobs must be >= 1");

  struct Task {
    std::size_t cell, alg;
    int seed;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (std::size_t a = 0; a < algs.size(); ++a)
      for (int s : seeds) tasks.push_back({c, a, s});
  std::vector<BenchRun> runs(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < tasks.size();)
      runs[k] = bench_one(family, cells[tasks[k].cell], tasks[k].seed, algs[tasks[k].alg]);
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream os;
  os << "family,q,m,n,algorithm,instances,failures,mean_time_s,mean_iterations,mean_lp_solves,mean_failed_cuts\n";
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t a = 0; a < algs.size(); ++a) {
      int ok = 0, failed = 0;
      double t = 0, it = 0, lp = 0, fc = 0;
      for (std::size_t k = 0; k < tasks.size(); ++k) {
        if (tasks[k].cell != c || tasks[k].alg != a) continue;
        const BenchRun& r = runs[k];
        if (!r.ok) {
          ++failed;
          std::cerr << "bench: " << family << " q=" << cells[c].q << " seed=" << tasks[k].seed << " "
                    << to_string(algs[a]) << " failed: " << r.error << "\n";
          continue;
        }
        ++ok;
        t += r.time;
        it += r.iterations;
        lp += r.lp_solves;
        fc += r.failed_cuts;
      }
      const double d = ok > 0 ? ok : 1;
      os << family << "," << cells[c].q << "," << cells[c].m << "," << cells[c].n << "," << to_string(algs[a]) << ","
         << ok + failed << "," << failed << "," << t / d << "," << it / d << "," << lp / d << "," << fc / d << "\n";
    }
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outer-approximation solver for quasi-concave minimization over polyhedra"};
  app.require_subcommand(1);
  double tolerance = 0.0;
  app.add_option("--tolerance", tolerance, "feasibility tolerance (overrides QCP_LP_TOL)")
      ->check(CLI::PositiveNumber);

  SolveConfig cfg;
  auto* solve = app.add_subcommand("solve", "solve one instance and print result JSON");
  solve->add_option("--algorithm", cfg.algorithm)
      ->check(CLI::IsMember({"primal", "dual", "dual-se", "benson-primal", "benson-dual"}));
  solve->add_option("--builtin", cfg.builtin,
                    "example41, nonsolid, lmp, cqp, dc_primal, dc_dual or boundary (sized by --q/--m/--n/--seed)");
  solve->add_option("--input", cfg.input, "problem JSON file");
  solve->add_option("--output", cfg.output, "result JSON file (default: stdout)");
  solve->add_option("--log", cfg.log, "CSV iteration log");
  solve->add_option("--dump-approx", cfg.dump_approx, "path prefix for per-iteration vertex CSV dumps");
  solve->add_option("--c", cfg.c, "interior point of the cone, comma-separated");
  solve->add_option("--tolerance", tolerance)->check(CLI::PositiveNumber);
  solve->add_option("--q", cfg.gen.q);
  solve->add_option("--m", cfg.gen.m);
  solve->add_option("--n", cfg.gen.n);
  auto* solve_seed = solve->add_option("--seed", cfg.gen.seed);

  std::string gen_family, gen_output;
  GenParams gen;
  double gen_c = 0.0;
  auto* genc = app.add_subcommand("gen", "write a problem instance JSON");
  genc->add_option("family", gen_family, "lmp, cqp, dc_primal, dc_dual, boundary, example41, nonsolid")->required();
  genc->add_option("--q", gen.q);
  genc->add_option("--m", gen.m);
  genc->add_option("--n", gen.n);
  auto* gen_seed = genc->add_option("--seed", gen.seed);
  auto* gen_c_opt = genc->add_option("--c", gen_c, "boundary penalty constant");
  genc->add_option("--output", gen_output);

  std::string bench_family, grid, seeds, algorithms = "primal,dual,dual-se", bench_output;
  int jobs = 1;
  auto* bench = app.add_subcommand("bench", "batch statistics as CSV");
  bench->add_option("family", bench_family, "lmp, cqp, dc_primal or dc_dual")->required();
  bench->add_option("--grid", grid, "cells: q:m:n (lmp), q:n (cqp), q (dc)")->required();
  bench->add_option("--seeds", seeds, "e.g. 1-10 or 1,4,7")->required();
  bench->add_option("--algorithms", algorithms);
  bench->add_option("--jobs", jobs, "instances solved concurrently");
  bench->add_option("--output", bench_output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  if (tolerance > 0.0) setenv("QCP_LP_TOL", std::to_string(tolerance).c_str(), 1);

  std::string output_path;
  try {
    if (*solve) {
      output_path = cfg.output;
      cfg.gen.seed_given = solve_seed->count() > 0;
      write_text(cfg.output, run_solve(cfg).dump(2) + "\n");
    } else if (*genc) {
      output_path = gen_output;
      gen.seed_given = gen_seed->count() > 0;
      if (gen_c_opt->count() > 0) gen.c = gen_c;
      write_text(gen_output, generate_instance(gen_family, gen).dump(2) + "\n");
    } else if (*bench) {
      output_path = bench_output;
      write_text(bench_output, run_bench(bench_family, grid, seeds, algorithms, jobs));
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    std::cout << error_to_json("usage", e.what()).dump() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    const json err = error_to_json(to_string(e.kind()), e.what());
    std::cerr << "error: " << e.what() << "\n";
    std::cout << err.dump() << "\n";
    if (*solve && !output_path.empty() && output_path != "-") {
      std::ofstream os(output_path);
      os << err.dump(2) << "\n";
    }
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cout << error_to_json("internal", e.what()).dump() << "\n";
    return kExitSolver;
  }
}
