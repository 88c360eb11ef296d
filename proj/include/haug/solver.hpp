#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "haug/qstep.hpp"
#include "haug/vec.hpp"

namespace haug {

// ---------------------------------------------------------------------------
// Generic driver for the anchored outer-approximation iteration
//
//   r_n     = x_n + lambda_n (a_n - x_n)
//   x_{n+1} = q_step(x_0, x_n, r_n)
//
// where the cut point a_n comes from a caller-supplied oracle.  Everything
// stochastic (index sampling, blocks, extrapolation) lives in the oracle;
// the driver owns the update, the stopping logic and the trace.
// ---------------------------------------------------------------------------

// Thrown when an iterate or oracle output stops being finite.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, long iteration)
      : std::runtime_error(what + " at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}
  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

// One cut proposal.  a is the point the current iterate is pulled toward
// (for a plain projection cut, the projection of x_n onto the sampled set);
// lambda is the relaxation in [lambda_min, 1].  The remaining fields are
// diagnostics carried into the trace: extrapolation is the step-length
// multiplier used to build a (1 when none), max_displacement the largest
// member displacement seen by the oracle, indices the sampled set indices.
struct CutProposal {
  Vec a;
  double lambda = 1.0;
  double extrapolation = 1.0;
  double max_displacement = 0.0;
  std::vector<std::uint64_t> indices;
};

struct SolverState;

// Called once per iteration; fills `out` in place.  The out-parameter style
// lets oracles reuse buffers, which keeps the inner loop allocation-free on
// long runs.
using CutOracle = std::function<void(const SolverState&, CutProposal& out)>;

// Live state of a run.  anchor_dist and cum_sq_step are maintained by the
// driver and are nondecreasing along the iteration.
struct SolverState {
  Vec anchor;                // x_0
  Vec iterate;               // x_n
  long n = 0;                // iterations completed
  double cum_sq_step = 0.0;  // sum of |x_{k+1} - x_k|^2
  double anchor_dist = 0.0;  // |x_n - x_0|
  long empty_cut_count = 0;  // EmptyIntersection branches taken so far
};

// Window-based stopping: converged once `window` consecutive iterations all
// had |x_{n+1} - x_n| <= tol_step * (1 + |x_n|) and |a_n - x_n| <= tol_res.
// window = 0 disables the convergence test and the run uses its full
// iteration budget.
struct StoppingRule {
  double tol_step = 1e-8;
  double tol_res = 1e-8;
  int window = 20;
  long max_iter = 100000;
};

enum class SolveStatus { Converged, IterationLimit };

const char* to_string(SolveStatus s);

// Everything the per-iteration observer can see.  Vectors are views into
// driver-owned storage, valid only during the callback.
struct IterationView {
  long n;                // index of the completed iteration
  const Vec& anchor;
  const Vec& x_prev;     // x_n
  const Vec& a;          // oracle point a_n
  const Vec& r;          // relaxed cut point r_n
  const Vec& x_next;     // x_{n+1}
  double lambda;
  double extrapolation;
  QBranch branch;
};

// One trace row per iteration, in emission order.
struct TraceRecord {
  long n = 0;
  double anchor_dist = 0.0;   // |x_{n+1} - x_0|
  double step_norm = 0.0;     // |x_{n+1} - x_n|
  double max_displacement = 0.0;
  double extrapolation = 1.0;
  double lambda = 1.0;
  long empty_cut_count = 0;
  std::vector<std::uint64_t> sampled_indices;
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void row(const TraceRecord& rec) = 0;
};

// Collects rows in memory; the test suites read traces through this.
class MemoryTraceSink : public TraceSink {
 public:
  void row(const TraceRecord& rec) override { rows_.push_back(rec); }
  const std::vector<TraceRecord>& rows() const { return rows_; }

 private:
  std::vector<TraceRecord> rows_;
};

// Streams rows as CSV with full round-trip precision (17 significant
// digits, '.' decimal separator, locale-independent).  sampled_indices are
// ';'-joined inside the last column.
class CsvTraceSink : public TraceSink {
 public:
  explicit CsvTraceSink(const std::string& path);
  ~CsvTraceSink() override;
  void row(const TraceRecord& rec) override;

  static std::string header();
  static std::string format_row(const TraceRecord& rec);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct SolverOptions {
  StoppingRule stop;
  double lambda_min = 1e-3;    // oracle relaxations must stay in [lambda_min, 1]
  TraceSink* trace = nullptr;  // optional, not owned
  std::function<void(const IterationView&)> observer;  // optional
};

struct SolveResult {
  SolverState state;
  SolveStatus status = SolveStatus::IterationLimit;
};

// Runs the iteration from x0 until the stopping rule fires or the budget is
// exhausted.  Oracle outputs are validated every iteration: a non-finite
// a_n or iterate raises NumericalFailure, a relaxation outside
// [lambda_min, 1] raises std::invalid_argument.
SolveResult run_stochastic_haugazeau(const Vec& x0, const CutOracle& oracle,
                                     const SolverOptions& opt);

}  // namespace haug
