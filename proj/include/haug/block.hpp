#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "haug/operators.hpp"
#include "haug/sampling.hpp"
#include "haug/solver.hpp"

namespace haug {

// ---------------------------------------------------------------------------
// Randomized extrapolated block solver, plus the cyclic and the randomized
// single-set controls it generalizes.  All three wrap the generic driver in
// solver.hpp with a specific cut oracle.
// ---------------------------------------------------------------------------

enum class WeightRule {
  DisplacementProportional,  // delta floor on argmax set + squared-displacement shares
  PureArgmax,                // all mass on the first argmax index
};

const char* to_string(WeightRule r);

struct BlockConfig {
  int M = 1;                   // block size (i.i.d. index draws per iteration)
  double delta = 0.5;          // argmax weight floor, in (0, 1/M)
  double epsilon = 1e-3;       // lower bound for relaxations
  double lambda = 1.0;         // constant relaxation in [epsilon, 1]
  WeightRule weight_rule = WeightRule::DisplacementProportional;

  // delta default keeps 1/(2M) when M changes.
  static BlockConfig with_block_size(int M);

  void validate() const;  // throws std::invalid_argument on bad fields
};

// Per-iteration internals of the block oracle, for diagnostics and tests.
struct BlockIterationReport {
  long n = 0;
  std::vector<std::uint64_t> indices;   // k_{1..M}
  std::vector<double> displacements;    // d_i = |p_i - x|
  std::vector<double> weights;          // beta_i
  double extrapolation = 1.0;           // L >= 1
  Vec combined;                         // p = sum beta_i p_i
};

using BlockObserver = std::function<void(const BlockIterationReport&)>;

// Weight vector of the displacement-proportional rule: J = argmax set of
// the displacements (ties within 1e-12 relative), then
//   beta_i = delta*1[i in J] + (1 - delta*|J|) * d_i^2 / sum_j d_j^2
// falling back to uniform 1/M when all displacements vanish.  Sums to 1;
// every argmax index receives at least delta.  PureArgmax instead puts all
// mass on the first argmax index.
std::vector<double> block_weights(const std::vector<double>& displacements,
                                  double delta,
                                  WeightRule rule = WeightRule::DisplacementProportional);

// Extrapolation multiplier
//   L = (sum_i beta_i d_i^2 + [p = x]) / (|p - x|^2 + [p = x])
// with the coincidence indicator read as |p - x| <= 1e-14 * (1 + |x|).
// Always >= 1 for weights produced by block_weights.
double extrapolation(const std::vector<double>& displacements,
                     const std::vector<double>& weights,
                     const Vec& p_minus_x, double x_norm);

struct BlockProblem {
  std::vector<FqneOperator> family;  // T_k, all of one dimension
  IndexDistribution dist;            // law of the index draws, over the family
};

struct BlockRunOptions {
  SolverOptions solver;              // stopping, trace, observer
  BlockObserver block_observer;      // optional, sees oracle internals
};

// Randomized extrapolated block method: per iteration draw M i.i.d.
// indices, evaluate all sampled operators at x_n, combine with
// block_weights, lengthen by the extrapolation factor, relax by lambda and
// take the q_step toward the anchor.
SolveResult run_block_solver(const BlockProblem& problem, const Vec& x0,
                             const BlockConfig& cfg, RngStream& rng,
                             const BlockRunOptions& opt);

// Deterministic cyclic control: iteration n projects onto set n mod p.
SolveResult run_cyclic_haugazeau(const std::vector<FqneOperator>& sets, const Vec& x0,
                                 const SolverOptions& opt);

// Randomized single-set control: one sampled projection cut per iteration,
// no relaxation.  Implemented as the M=1, lambda=1 block solver, to which
// it is trajectory-identical bit for bit.
SolveResult run_randomized_single(const std::vector<FqneOperator>& sets,
                                  const IndexDistribution& dist, const Vec& x0,
                                  RngStream& rng, const SolverOptions& opt);

}  // namespace haug
