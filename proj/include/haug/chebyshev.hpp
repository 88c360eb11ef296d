#pragma once

#include <cstdint>
#include <vector>

#include "haug/block.hpp"

namespace haug {

// ---------------------------------------------------------------------------
// Chebyshev center and radius of a finite point cloud, approximated through
// the lifted best-approximation problem: in R^(N+1), intersect one
// second-order cone per cloud point (apex (y, 0)) and project the anchor
// (0, -alpha) onto that intersection with the randomized block solver.  The
// first N coordinates of the limit approach a center of the smallest
// enclosing ball, the last coordinate its radius, with a bias that shrinks
// as alpha grows.
// ---------------------------------------------------------------------------

struct ChebyshevProblem {
  std::vector<Vec> cloud;  // nonempty, all points of one dimension N
  double alpha = 200.0;    // anchor depth below the cloud; must be > 0

  Eigen::Index dim() const;  // N
  Vec lifted_anchor() const; // (0, ..., 0, -alpha) in R^(N+1)
  void validate() const;     // throws std::invalid_argument on bad fields
};

struct BallEstimate {
  Vec center;
  double radius = 0.0;              // >= 0
  double coverage_violation = 0.0;  // max over cloud of |center - y| - radius
};

// max over the cloud of |center - y| - radius; <= 0 means every point is
// covered.
double coverage_violation(const std::vector<Vec>& cloud, const Vec& center,
                          double radius);

// Runs the block solver on the lifted problem with uniform index sampling
// over the cloud.  The returned radius is the lifted coordinate of the
// final iterate (clamped at zero); it may exceed the minimal radius by the
// alpha bias, which is measured by alpha_bias_sweep rather than hidden.
// details, when given, receives the full solver result.
BallEstimate solve_chebyshev(const ChebyshevProblem& prob, const BlockConfig& cfg,
                             RngStream& rng, const StoppingRule& stop,
                             TraceSink* trace = nullptr,
                             SolveResult* details = nullptr);

// Exact smallest enclosing circle of a planar cloud, by move-to-front case
// enumeration over at most three support points.  Plane only; the solver
// itself runs in any dimension, but exact validation is 2-D.
BallEstimate miniball_oracle(const std::vector<Vec>& cloud);

// One row of an alpha sweep: distances between the solver center and the
// exact center across replications, summarized by quartiles.
struct SweepPoint {
  double alpha = 0.0;
  double median_distance = 0.0;
  double lo_quartile = 0.0;
  double hi_quartile = 0.0;
  long iterations = 0;  // per-replication budget used at this alpha
};

// For each alpha, solves the lifted problem `replications` times with
// fresh, independent random streams (seed, stream 0..R-1 numbered across
// the whole sweep) and measures the distance to the miniball center.  Runs
// on a fixed per-alpha budget of ceil(alpha^2 / 4) iterations with the
// windowed stop disabled: the anchor recedes linearly in alpha while each
// cut's reach stays bounded, so a quadratic budget holds the per-iteration
// noise floor at order 1/alpha and the medians expose the vanishing bias.
// Plane only (the oracle's scope).
std::vector<SweepPoint> alpha_bias_sweep(const std::vector<Vec>& cloud,
                                         const std::vector<double>& alphas,
                                         const BlockConfig& cfg, std::uint64_t seed,
                                         int replications = 20);

// count points drawn uniformly in the box [lo, hi]^dim.
std::vector<Vec> random_cloud(std::size_t count, Eigen::Index dim, RngStream& rng,
                              double lo = 0.0, double hi = 1.0);

}  // namespace haug
