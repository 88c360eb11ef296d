// Command-line front end: single solves with Monte Carlo replication,
// Chebyshev-center runs, strategy comparisons and alpha sweeps.  All
// randomness is derived from (--seed, stream id), so identical invocations
// produce byte-identical output files.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "haug/block.hpp"
#include "haug/chebyshev.hpp"
#include "haug/config.hpp"
#include "haug/oracles.hpp"
#include "haug/sampling.hpp"
#include "haug/solver.hpp"

namespace fs = std::filesystem;
using namespace haug;

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitMaxIter = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInput = 4;

// Stream id used to generate synthetic clouds, disjoint from the
// replication streams 0..R-1.
constexpr std::uint64_t kCloudStream = 0xC10D;

std::string replication_suffix(int r) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", r);
  return buf;
}

// Forwards every thin-th row to a CSV sink; thin = 1 keeps the full trace.
class ThinningTraceSink : public TraceSink {
 public:
  ThinningTraceSink(const std::string& path, long thin) : csv_(path), thin_(thin) {}
  void row(const TraceRecord& rec) override {
    if (rec.n % thin_ == 0) csv_.row(rec);
  }

 private:
  CsvTraceSink csv_;
  long thin_;
};

struct SolveFlags {
  std::string config_path;
  std::string out_dir;
  bool have_seed = false;
  std::uint64_t seed = 0;
  int replications = 0;  // 0: from config
  long max_iter = 0;     // 0: from config
  double tol = 0.0;      // 0: from config
};

void apply_overrides(ProblemConfig& cfg, const SolveFlags& f) {
  if (f.have_seed) cfg.seed = f.seed;
  if (f.replications > 0) cfg.replications = f.replications;
  if (f.max_iter > 0) cfg.stopping.max_iter = f.max_iter;
  if (f.tol > 0.0) {
    cfg.stopping.tol_step = f.tol;
    cfg.stopping.tol_res = f.tol;
  }
  cfg.validate();
}

struct ReplicationOutcome {
  SolveResult result;
  double residual = 0.0;
};

// Runs cfg.replications independent solves (stream ids 0..R-1), writing
// trace_XXX.csv and result_XXX.txt per replication, concurrently when the
// host has the cores for it.
int cmd_solve(const SolveFlags& flags) {
  ProblemConfig cfg = load_config(flags.config_path);
  apply_overrides(cfg, flags);
  fs::create_directories(flags.out_dir);

  const BlockProblem problem{cfg.build_family(), cfg.build_distribution()};
  const Vec x0 = cfg.start_point();
  const int R = cfg.replications;

  std::vector<ReplicationOutcome> outcomes(R);
  std::vector<std::exception_ptr> errors(R);
  std::atomic<int> next{0};

  auto run_one = [&](int r) {
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(r));
    CsvTraceSink trace((fs::path(flags.out_dir) /
                        ("trace_" + replication_suffix(r) + ".csv"))
                           .string());
    BlockRunOptions opt;
    opt.solver.stop = cfg.stopping;
    opt.solver.trace = &trace;
    ReplicationOutcome& out = outcomes[r];
    out.result = run_block_solver(problem, x0, cfg.block, rng, opt);
    out.residual = feasibility_residual(problem.family, out.result.state.iterate);

    ResultRecord rec;
    rec.add("replication", static_cast<long>(r));
    rec.add("seed", cfg.seed);
    rec.add("stream", static_cast<std::uint64_t>(r));
    rec.add("status", to_string(out.result.status));
    rec.add("iterations", out.result.state.n);
    rec.add("final", out.result.state.iterate);
    rec.add("anchor_dist", out.result.state.anchor_dist);
    rec.add("cum_sq_step", out.result.state.cum_sq_step);
    rec.add("empty_cut_count", out.result.state.empty_cut_count);
    rec.add("feasibility_residual", out.residual);
    rec.save((fs::path(flags.out_dir) / ("result_" + replication_suffix(r) + ".txt"))
                 .string());
  };

  auto worker = [&] {
    for (int r = next.fetch_add(1); r < R; r = next.fetch_add(1)) {
      try {
        run_one(r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int extra = std::min<int>(R, static_cast<int>(hw)) - 1;
  std::vector<std::thread> pool;
  for (int t = 0; t < extra; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (int r = 0; r < R; ++r) {
    if (errors[r]) std::rethrow_exception(errors[r]);
  }

  int converged = 0;
  ResultRecord summary;
  summary.add("replications", static_cast<long>(R));
  summary.add("seed", cfg.seed);
  for (int r = 0; r < R; ++r) {
    const ReplicationOutcome& out = outcomes[r];
    converged += out.result.status == SolveStatus::Converged;
    const std::string p = "replication_" + replication_suffix(r);
    summary.add(p + "_status", to_string(out.result.status));
    summary.add(p + "_iterations", out.result.state.n);
    summary.add(p + "_feasibility_residual", out.residual);
  }
  summary.add("converged", static_cast<long>(converged));
  summary.save((fs::path(flags.out_dir) / "summary.txt").string());
  std::printf("%s: %d/%d replications converged\n", flags.config_path.c_str(),
              converged, R);
  return converged == R ? kExitConverged : kExitMaxIter;
}

struct ChebyshevFlags {
  std::string cloud_path;
  long random_count = 0;  // generate instead of reading
  std::string out_dir;
  double alpha = 200.0;
  std::uint64_t seed = 0;
  long max_iter = 400000000;
  double tol = 1e-8;
  // Near the fixed point only one or two cuts still bite, so a draw misses the
  // active cut with probability about (p-1)/p.  The window has to be long
  // enough that a run of all-quiet draws is overwhelmingly evidence of an
  // actual freeze: at p = 100 cones, 0.99^5000 ~ 1e-22 per window.
  int window = 5000;
  int block_size = 1;
  long trace_every = 0;  // 0: no trace file
};

int cmd_chebyshev(const ChebyshevFlags& flags) {
  fs::create_directories(flags.out_dir);
  std::vector<Vec> cloud;
  if (flags.random_count > 0) {
    RngStream cloud_rng(flags.seed, kCloudStream);
    cloud = random_cloud(static_cast<std::size_t>(flags.random_count), 2, cloud_rng);
    write_cloud_csv((fs::path(flags.out_dir) / "cloud.csv").string(), cloud);
  } else {
    cloud = read_cloud_csv(flags.cloud_path);
  }

  ChebyshevProblem prob{cloud, flags.alpha};
  BlockConfig cfg = BlockConfig::with_block_size(flags.block_size);
  StoppingRule stop;
  stop.tol_step = flags.tol;
  stop.tol_res = flags.tol;
  stop.window = flags.window;
  stop.max_iter = flags.max_iter;

  std::unique_ptr<ThinningTraceSink> trace;
  if (flags.trace_every > 0) {
    trace = std::make_unique<ThinningTraceSink>(
        (fs::path(flags.out_dir) / "trace.csv").string(), flags.trace_every);
  }

  RngStream rng(flags.seed, 0);
  SolveResult details;
  const BallEstimate est =
      solve_chebyshev(prob, cfg, rng, stop, trace.get(), &details);

  ResultRecord rec;
  rec.add("alpha", flags.alpha);
  rec.add("seed", flags.seed);
  rec.add("cloud_size", static_cast<long>(cloud.size()));
  rec.add("status", to_string(details.status));
  rec.add("iterations", details.state.n);
  rec.add("center", est.center);
  rec.add("radius", est.radius);
  rec.add("coverage_violation", est.coverage_violation);
  if (cloud.front().size() == 2) {
    const BallEstimate exact = miniball_oracle(cloud);
    rec.add("miniball_center", exact.center);
    rec.add("miniball_radius", exact.radius);
    rec.add("center_distance", (est.center - exact.center).norm());
  }
  rec.save((fs::path(flags.out_dir) / "result.txt").string());

  // Plot data: label,x,y,radius rows; radius only on the center row.
  {
    std::FILE* f = std::fopen((fs::path(flags.out_dir) / "plot.csv").string().c_str(), "wb");
    if (!f) throw ConfigError("cannot write plot file");
    std::fputs("label,x,y,radius\n", f);
    for (const Vec& pt : cloud) {
      std::fprintf(f, "point,%s,%s,\n", format_double(pt(0)).c_str(),
                   pt.size() > 1 ? format_double(pt(1)).c_str() : "");
    }
    std::fprintf(f, "center,%s,%s,%s\n", format_double(est.center(0)).c_str(),
                 est.center.size() > 1 ? format_double(est.center(1)).c_str() : "",
                 format_double(est.radius).c_str());
    std::fclose(f);
  }

  std::printf("center (%s) radius %s, coverage violation %s, %ld iterations\n",
              [&] {
                std::string s;
                for (Eigen::Index i = 0; i < est.center.size(); ++i) {
                  if (i) s += ", ";
                  s += format_double(est.center(i));
                }
                return s;
              }()
                  .c_str(),
              format_double(est.radius).c_str(),
              format_double(est.coverage_violation).c_str(), details.state.n);
  return details.status == SolveStatus::Converged ? kExitConverged : kExitMaxIter;
}

struct CompareFlags {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> strategies;
  bool have_seed = false;
  std::uint64_t seed = 0;
  int replications = 0;
  long max_iter = 0;
  double tol = 0.0;
};

// Per-strategy aggregate of a comparison run.
struct StrategySummary {
  std::string name;
  int converged = 0;
  std::vector<long> iterations;
  double worst_residual = 0.0;
  double mean_gap = 0.0;  // activation gap averaged over sets and replications
};

int cmd_compare(const CompareFlags& flags) {
  SolveFlags base;
  base.have_seed = flags.have_seed;
  base.seed = flags.seed;
  base.replications = flags.replications;
  base.max_iter = flags.max_iter;
  base.tol = flags.tol;
  ProblemConfig cfg = load_config(flags.config_path);
  apply_overrides(cfg, base);
  fs::create_directories(flags.out_dir);

  const std::vector<FqneOperator> family = cfg.build_family();
  const IndexDistribution dist = cfg.build_distribution();
  const Vec x0 = cfg.start_point();
  const std::size_t p = family.size();

  std::vector<StrategySummary> table;
  for (const std::string& name : flags.strategies) {
    if (name != "cyclic" && name != "randomized" && name != "block") {
      throw ConfigError("unknown strategy '" + name + "'");
    }
    StrategySummary row;
    row.name = name;
    double gap_sum = 0.0;
    long gap_count = 0;
    for (int r = 0; r < cfg.replications; ++r) {
      MemoryTraceSink trace;
      SolverOptions sopt;
      sopt.stop = cfg.stopping;
      sopt.trace = &trace;
      RngStream rng(cfg.seed, static_cast<std::uint64_t>(r));
      SolveResult res;
      if (name == "cyclic") {
        res = run_cyclic_haugazeau(family, x0, sopt);
      } else if (name == "randomized") {
        res = run_randomized_single(family, IndexDistribution::uniform(p), x0, rng, sopt);
      } else {
        BlockRunOptions ropt;
        ropt.solver = sopt;
        res = run_block_solver(BlockProblem{family, dist}, x0, cfg.block, rng, ropt);
      }
      row.converged += res.status == SolveStatus::Converged;
      row.iterations.push_back(res.state.n);
      row.worst_residual =
          std::max(row.worst_residual, feasibility_residual(family, res.state.iterate));

      std::vector<std::uint64_t> draws;
      for (const TraceRecord& rec : trace.rows()) {
        draws.insert(draws.end(), rec.sampled_indices.begin(),
                     rec.sampled_indices.end());
      }
      const IndexDistribution gap_dist =
          name == "block" ? dist : IndexDistribution::uniform(p);
      for (std::size_t s = 0; s < p; ++s) {
        const WaitingTimeStats st = waiting_time_stats(gap_dist, s, draws);
        if (st.activations > 1) {
          gap_sum += st.mean_gap;
          gap_count += 1;
        }
      }
      if (name == "cyclic") break;  // deterministic: one replication tells all
    }
    row.mean_gap = gap_count > 0 ? gap_sum / static_cast<double>(gap_count) : 0.0;
    table.push_back(std::move(row));
  }

  ResultRecord rec;
  rec.add("config", flags.config_path);
  rec.add("seed", cfg.seed);
  rec.add("replications", static_cast<long>(cfg.replications));
  std::printf("%-12s %12s %14s %16s %10s\n", "strategy", "converged", "median iters",
              "max residual", "mean gap");
  for (StrategySummary& row : table) {
    std::sort(row.iterations.begin(), row.iterations.end());
    const long median = row.iterations[row.iterations.size() / 2];
    const int runs = static_cast<int>(row.iterations.size());
    std::printf("%-12s %9d/%-2d %14ld %16.3e %10.3f\n", row.name.c_str(),
                row.converged, runs, median, row.worst_residual, row.mean_gap);
    rec.add(row.name + "_converged", static_cast<long>(row.converged));
    rec.add(row.name + "_runs", static_cast<long>(runs));
    rec.add(row.name + "_median_iterations", median);
    rec.add(row.name + "_max_residual", row.worst_residual);
    rec.add(row.name + "_mean_activation_gap", row.mean_gap);
  }
  rec.save((fs::path(flags.out_dir) / "compare.txt").string());

  for (const StrategySummary& row : table) {
    if (row.converged != static_cast<int>(row.iterations.size())) return kExitMaxIter;
  }
  return kExitConverged;
}

struct SweepFlags {
  std::string cloud_path;
  std::string out_dir;
  std::vector<double> alphas;
  std::uint64_t seed = 0;
  int replications = 20;
  int block_size = 1;
};

int cmd_sweep(const SweepFlags& flags) {
  fs::create_directories(flags.out_dir);
  const std::vector<Vec> cloud = read_cloud_csv(flags.cloud_path);
  const BlockConfig cfg = BlockConfig::with_block_size(flags.block_size);
  const std::vector<SweepPoint> sweep =
      alpha_bias_sweep(cloud, flags.alphas, cfg, flags.seed, flags.replications);

  std::FILE* f =
      std::fopen((fs::path(flags.out_dir) / "sweep.csv").string().c_str(), "wb");
  if (!f) throw ConfigError("cannot write sweep file");
  std::fputs("alpha,iterations,median_distance,lo_quartile,hi_quartile\n", f);
  std::printf("%12s %12s %16s %16s %16s\n", "alpha", "iterations", "median dist",
              "lo quartile", "hi quartile");
  for (const SweepPoint& pt : sweep) {
    std::fprintf(f, "%s,%ld,%s,%s,%s\n", format_double(pt.alpha).c_str(),
                 pt.iterations, format_double(pt.median_distance).c_str(),
                 format_double(pt.lo_quartile).c_str(),
                 format_double(pt.hi_quartile).c_str());
    std::printf("%12g %12ld %16.6e %16.6e %16.6e\n", pt.alpha, pt.iterations,
                pt.median_distance, pt.lo_quartile, pt.hi_quartile);
  }
  std::fclose(f);
  return kExitConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic projection cuts toward a best approximation"};
  app.require_subcommand(1);

  SolveFlags solve_flags;
  CLI::App* solve = app.add_subcommand("solve", "run the configured solver");
  solve->add_option("--config", solve_flags.config_path, "problem config file")
      ->required();
  solve->add_option("--out", solve_flags.out_dir, "output directory")->required();
  CLI::Option* solve_seed = solve->add_option("--seed", solve_flags.seed, "seed override");
  solve->add_option("--replications", solve_flags.replications, "replication override");
  solve->add_option("--max-iter", solve_flags.max_iter, "iteration budget override");
  solve->add_option("--tol", solve_flags.tol, "stopping tolerance override");

  ChebyshevFlags cheb_flags;
  CLI::App* cheb = app.add_subcommand("chebyshev", "Chebyshev center of a point cloud");
  CLI::Option* cloud_opt =
      cheb->add_option("--cloud", cheb_flags.cloud_path, "cloud CSV, one point per row");
  cheb->add_option("--random-cloud", cheb_flags.random_count,
                   "generate a uniform cloud in [0,1]^2 of this size instead")
      ->excludes(cloud_opt);
  cheb->add_option("--out", cheb_flags.out_dir, "output directory")->required();
  cheb->add_option("--alpha", cheb_flags.alpha, "anchor depth (default 200)");
  cheb->add_option("--seed", cheb_flags.seed, "random seed");
  cheb->add_option("--max-iter", cheb_flags.max_iter, "iteration budget");
  cheb->add_option("--tol", cheb_flags.tol, "stopping tolerance");
  cheb->add_option("--window", cheb_flags.window, "quiet-window length of the stop");
  cheb->add_option("--block-size", cheb_flags.block_size, "draws per iteration");
  cheb->add_option("--trace-every", cheb_flags.trace_every,
                   "write every k-th trace row (0: no trace file)");

  CompareFlags cmp_flags;
  CLI::App* cmp = app.add_subcommand("compare", "cyclic vs randomized vs block");
  cmp->add_option("--config", cmp_flags.config_path, "problem config file")->required();
  cmp->add_option("--out", cmp_flags.out_dir, "output directory")->required();
  cmp->add_option("--strategy", cmp_flags.strategies,
                  "strategies to run (default: all three)");
  CLI::Option* cmp_seed = cmp->add_option("--seed", cmp_flags.seed, "seed override");
  cmp->add_option("--replications", cmp_flags.replications, "replication override");
  cmp->add_option("--max-iter", cmp_flags.max_iter, "iteration budget override");
  cmp->add_option("--tol", cmp_flags.tol, "stopping tolerance override");

  SweepFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand("sweep", "alpha bias sweep against the miniball");
  sweep->add_option("--cloud", sweep_flags.cloud_path, "cloud CSV (planar)")->required();
  sweep->add_option("--out", sweep_flags.out_dir, "output directory")->required();
  sweep->add_option("--alpha", sweep_flags.alphas, "alpha values (repeatable)")
      ->required();
  sweep->add_option("--seed", sweep_flags.seed, "base seed");
  sweep->add_option("--replications", sweep_flags.replications,
                    "replications per alpha (default 20)");
  sweep->add_option("--block-size", sweep_flags.block_size, "draws per iteration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      solve_flags.have_seed = solve_seed->count() > 0;
      return cmd_solve(solve_flags);
    }
    if (cheb->parsed()) {
      if (cheb_flags.cloud_path.empty() && cheb_flags.random_count <= 0) {
        throw ConfigError("chebyshev needs --cloud or --random-cloud");
      }
      return cmd_chebyshev(cheb_flags);
    }
    if (cmp->parsed()) {
      cmp_flags.have_seed = cmp_seed->count() > 0;
      if (cmp_flags.strategies.empty()) {
        cmp_flags.strategies = {"cyclic", "randomized", "block"};
      }
      return cmd_compare(cmp_flags);
    }
    return cmd_sweep(sweep_flags);
  } catch (const NumericalFailure& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
}
