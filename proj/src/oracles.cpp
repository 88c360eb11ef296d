#include "haug/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace haug {

TwoHalfspaceInstance TwoHalfspaceInstance::from_triple(const Vec& x, const Vec& y,
                                                       const Vec& z) {
  require_same_dim(x, y, "TwoHalfspaceInstance");
  require_same_dim(y, z, "TwoHalfspaceInstance");
  TwoHalfspaceInstance inst;
  inst.anchor = x;
  inst.first = Halfspace{x - y, (x - y).dot(y)};
  inst.second = Halfspace{y - z, (y - z).dot(z)};
  return inst;
}

namespace {

// Feasibility slack of the candidate filter, relative to the constraint's
// own scale.
bool satisfies(const Halfspace& h, const Vec& u) {
  const double slack = h.normal.dot(u) - h.offset;
  return slack <= 1e-12 * (1.0 + h.normal.norm() * (1.0 + u.norm()) + std::abs(h.offset));
}

}  // namespace

namespace {

// Gram determinants below this fraction of a*c are treated as parallel
// normals.  Exactly parallel inputs (every 1-D instance among them) land
// anywhere within ~2 eps * a * c by rounding of a*c - b^2 alone, so the
// threshold sits three orders above that noise floor; the corner formula
// would divide by noise there, and an empty intersection (possible only
// with antiparallel normals) must not be routed through it.
constexpr double kParallelTol = 1e-12;

}  // namespace

std::optional<Vec> project_two_halfspaces(const TwoHalfspaceInstance& inst) {
  const Vec& x = inst.anchor;
  const Vec& n1 = inst.first.normal;
  const Vec& n2 = inst.second.normal;
  require_same_dim(x, n1, "project_two_halfspaces");
  require_same_dim(x, n2, "project_two_halfspaces");
  const double a = n1.squaredNorm();
  const double c = n2.squaredNorm();

  // Degenerate normals drop their constraint entirely.
  const bool live1 = a > 0.0;
  const bool live2 = c > 0.0;

  // Candidates that must pass the feasibility filter below: the anchor
  // itself and the foot on each live boundary.
  std::vector<Vec> screened;
  screened.push_back(x);
  if (live1) {
    screened.push_back(x - ((n1.dot(x) - inst.first.offset) / a) * n1);
  }
  if (live2) {
    screened.push_back(x - ((n2.dot(x) - inst.second.offset) / c) * n2);
  }

  // Every nonempty case also has one candidate feasible by construction,
  // which makes the enumeration total: the corner when the normals are
  // independent, the clamped point of the common axis when they are
  // parallel, the anchor when no constraint is live.
  Vec fallback = x;
  if (live1 && live2) {
    const double b = n1.dot(n2);
    const double det = a * c - b * b;
    if (det > kParallelTol * a * c) {
      // Foot on the codimension-2 corner: u = x - m1 n1 - m2 n2 with both
      // boundary equations active, multipliers from the Gram system.  With
      // independent normals the wedge is never empty and the corner lies on
      // it, so it is exempt from the residual filter; when it is far away
      // and ill-conditioned a nearer foot candidate wins on distance.
      const double g1 = n1.dot(x) - inst.first.offset;
      const double g2 = n2.dot(x) - inst.second.offset;
      const double m1 = (c * g1 - b * g2) / det;
      const double m2 = (a * g2 - b * g1) / det;
      fallback = x - m1 * n1 - m2 * n2;
    } else {
      // Parallel normals: both constraints bound s = <n1, u>, from above by
      // the first and (after rescaling by n2 = sign(b) t n1, t > 0) on the
      // side the second's orientation dictates.  Opposing orientations with
      // an empty slab certify an empty intersection; otherwise clamping s
      // gives the projection.
      const double t = std::sqrt(c / a);
      const double upper =
          (b < 0.0) ? inst.first.offset : std::min(inst.first.offset, inst.second.offset / t);
      const double lower =
          (b < 0.0) ? -inst.second.offset / t : -std::numeric_limits<double>::infinity();
      if (lower > upper) return std::nullopt;
      const double s = n1.dot(x);
      fallback = x - ((s - std::clamp(s, lower, upper)) / a) * n1;
    }
  } else if (live1 || live2) {
    fallback = screened.back();  // the single boundary foot, exactly feasible
  }

  Vec best = fallback;
  double best_dist = (fallback - x).norm();
  for (const Vec& u : screened) {
    if ((live1 && !satisfies(inst.first, u)) || (live2 && !satisfies(inst.second, u))) {
      continue;
    }
    const double d = (u - x).norm();
    if (d < best_dist) {
      best = u;
      best_dist = d;
    }
  }
  return best;
}

double feasibility_residual(const std::vector<FqneOperator>& sets, const Vec& x) {
  if (sets.empty()) throw std::invalid_argument("feasibility_residual: empty family");
  double worst = 0.0;
  for (const FqneOperator& op : sets) {
    worst = std::max(worst, op.residual(x));
  }
  return worst;
}

}  // namespace haug
