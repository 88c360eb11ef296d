#include "haug/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace haug {

Eigen::Index ChebyshevProblem::dim() const {
  return cloud.empty() ? 0 : cloud.front().size();
}

Vec ChebyshevProblem::lifted_anchor() const {
  Vec x0 = Vec::Zero(dim() + 1);
  x0(dim()) = -alpha;
  return x0;
}

void ChebyshevProblem::validate() const {
  if (cloud.empty()) throw std::invalid_argument("ChebyshevProblem: empty cloud");
  if (!(alpha > 0.0)) throw std::invalid_argument("ChebyshevProblem: alpha must be > 0");
  const Eigen::Index N = cloud.front().size();
  if (N < 1) throw std::invalid_argument("ChebyshevProblem: zero-dimensional points");
  for (const Vec& y : cloud) {
    if (y.size() != N) {
      throw std::invalid_argument("ChebyshevProblem: mixed point dimensions");
    }
    require_finite(y, "ChebyshevProblem");
  }
}

double coverage_violation(const std::vector<Vec>& cloud, const Vec& center,
                          double radius) {
  if (cloud.empty()) throw std::invalid_argument("coverage_violation: empty cloud");
  double worst = -std::numeric_limits<double>::infinity();
  for (const Vec& y : cloud) {
    require_same_dim(center, y, "coverage_violation");
    worst = std::max(worst, (center - y).norm() - radius);
  }
  return worst;
}

BallEstimate solve_chebyshev(const ChebyshevProblem& prob, const BlockConfig& cfg,
                             RngStream& rng, const StoppingRule& stop,
                             TraceSink* trace, SolveResult* details) {
  prob.validate();
  const Eigen::Index N = prob.dim();

  std::vector<FqneOperator> family;
  family.reserve(prob.cloud.size());
  for (const Vec& y : prob.cloud) family.push_back(soc_projector(SecondOrderConeSet{y}));
  BlockProblem lifted{std::move(family), IndexDistribution::uniform_over_cloud(prob.cloud)};

  BlockRunOptions ropt;
  ropt.solver.stop = stop;
  ropt.solver.trace = trace;

  SolveResult res = run_block_solver(lifted, prob.lifted_anchor(), cfg, rng, ropt);

  BallEstimate est;
  est.center = res.state.iterate.head(N);
  est.radius = std::max(res.state.iterate(N), 0.0);
  est.coverage_violation = coverage_violation(prob.cloud, est.center, est.radius);
  if (details) *details = std::move(res);
  return est;
}

// ---------------------------------------------------------------------------
// Exact smallest enclosing circle.
// ---------------------------------------------------------------------------

namespace {

using Eigen::Vector2d;

struct Circle {
  Vector2d c = Vector2d::Zero();
  double r = -1.0;  // negative radius: contains nothing
};

// Tolerant membership; the slack keeps the support search stable on
// duplicates and boundary ties and bounds the final coverage violation.
bool circle_contains(const Circle& C, const Vector2d& p) {
  return (p - C.c).norm() <= C.r + 1e-13 * (1.0 + std::abs(C.r));
}

Circle through_two(const Vector2d& a, const Vector2d& b) {
  Circle C;
  C.c = 0.5 * (a + b);
  C.r = 0.5 * (a - b).norm();
  return C;
}

// Smallest circle enclosing three points: a diameter circle of one pair
// when it covers the third point (this also settles collinear and
// duplicate triples), otherwise the circumcircle.
Circle through_three(const Vector2d& a, const Vector2d& b, const Vector2d& c) {
  const Vector2d* pts[3] = {&a, &b, &c};
  Circle best;
  bool found = false;
  for (int i = 0; i < 3; ++i) {
    Circle C = through_two(*pts[i], *pts[(i + 1) % 3]);
    if (circle_contains(C, *pts[(i + 2) % 3]) && (!found || C.r < best.r)) {
      best = C;
      found = true;
    }
  }
  if (found) return best;
  Eigen::Matrix2d A;
  A.row(0) = (b - a).transpose();
  A.row(1) = (c - a).transpose();
  const Vector2d rhs(0.5 * (b - a).squaredNorm(), 0.5 * (c - a).squaredNorm());
  Circle C;
  C.c = a + A.partialPivLu().solve(rhs).eval();
  C.r = std::max({(C.c - a).norm(), (C.c - b).norm(), (C.c - c).norm()});
  return C;
}

// Welzl move-to-front scan: grow the circle only when a point falls
// outside, pinning it as a support point and rescanning its predecessors.
// Expected linear time after the shuffle; at most three support points.
Circle smallest_enclosing(std::vector<Vector2d> pts) {
  RngStream shuffle(0x77656c7a6c2d6d66ull, pts.size());
  for (std::size_t i = pts.size(); i > 1; --i) {
    std::swap(pts[i - 1], pts[shuffle.below(i)]);
  }
  Circle C{pts[0], 0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (circle_contains(C, pts[i])) continue;
    C = Circle{pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (circle_contains(C, pts[j])) continue;
      C = through_two(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (circle_contains(C, pts[k])) continue;
        C = through_three(pts[i], pts[j], pts[k]);
      }
    }
  }
  return C;
}

}  // namespace

BallEstimate miniball_oracle(const std::vector<Vec>& cloud) {
  if (cloud.empty()) throw std::invalid_argument("miniball_oracle: empty cloud");
  std::vector<Vector2d> pts;
  pts.reserve(cloud.size());
  for (const Vec& y : cloud) {
    if (y.size() != 2) {
      throw std::invalid_argument("miniball_oracle: planar clouds only");
    }
    require_finite(y, "miniball_oracle");
    pts.emplace_back(y(0), y(1));
  }
  const Circle C = smallest_enclosing(std::move(pts));
  BallEstimate est;
  est.center = Vec(2);
  est.center << C.c(0), C.c(1);
  est.radius = std::max(C.r, 0.0);
  est.coverage_violation = coverage_violation(cloud, est.center, est.radius);
  return est;
}

std::vector<SweepPoint> alpha_bias_sweep(const std::vector<Vec>& cloud,
                                         const std::vector<double>& alphas,
                                         const BlockConfig& cfg, std::uint64_t seed,
                                         int replications) {
  if (replications < 1) {
    throw std::invalid_argument("alpha_bias_sweep: replications must be >= 1");
  }
  const BallEstimate exact = miniball_oracle(cloud);  // also validates the cloud

  std::vector<SweepPoint> sweep;
  sweep.reserve(alphas.size());
  std::uint64_t stream = 0;
  std::vector<double> dist(static_cast<std::size_t>(replications));
  for (double alpha : alphas) {
    ChebyshevProblem prob{cloud, alpha};
    StoppingRule stop;
    stop.window = 0;  // fixed budget, no early stop
    stop.max_iter = std::max(1L, static_cast<long>(std::ceil(alpha * alpha / 4.0)));
    for (int j = 0; j < replications; ++j) {
      RngStream rng(seed, stream);
      stream += 1;
      const BallEstimate est = solve_chebyshev(prob, cfg, rng, stop);
      dist[static_cast<std::size_t>(j)] = (est.center - exact.center).norm();
    }
    std::sort(dist.begin(), dist.end());
    const int R = replications;
    SweepPoint pt;
    pt.alpha = alpha;
    pt.iterations = stop.max_iter;
    pt.median_distance =
        (R % 2 == 1) ? dist[R / 2] : 0.5 * (dist[R / 2 - 1] + dist[R / 2]);
    pt.lo_quartile = dist[R / 4];
    pt.hi_quartile = dist[std::min(R - 1, (3 * R) / 4)];
    sweep.push_back(pt);
  }
  return sweep;
}

std::vector<Vec> random_cloud(std::size_t count, Eigen::Index dim, RngStream& rng,
                              double lo, double hi) {
  if (count == 0) throw std::invalid_argument("random_cloud: count must be >= 1");
  if (dim < 1) throw std::invalid_argument("random_cloud: dim must be >= 1");
  if (!(lo < hi)) throw std::invalid_argument("random_cloud: need lo < hi");
  std::vector<Vec> cloud(count, Vec(dim));
  for (Vec& y : cloud) {
    for (Eigen::Index c = 0; c < dim; ++c) y(c) = rng.uniform(lo, hi);
  }
  return cloud;
}

}  // namespace haug
