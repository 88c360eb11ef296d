#include "haug/qstep.hpp"

#include <algorithm>
#include <cmath>

namespace haug {

const char* to_string(QBranch b) {
  switch (b) {
    case QBranch::EmptyIntersection: return "EmptyIntersection";
    case QBranch::DegenerateForward: return "DegenerateForward";
    case QBranch::Interpolated:      return "Interpolated";
    case QBranch::FullTwoPlane:      return "FullTwoPlane";
  }
  return "?";
}

bool in_halfspace(const Vec& x, const Vec& y, const Vec& z, double tol) {
  require_same_dim(x, y, "in_halfspace");
  require_same_dim(y, z, "in_halfspace");
  const double lhs = (z - y).dot(x - y);
  return lhs <= tol * (1.0 + (x - y).norm() * (z - y).norm());
}

void q_step_into(const Vec& x, const Vec& y, const Vec& z, Vec& out,
                 QCaseReport* report) {
  require_same_dim(x, y, "q_step");
  require_same_dim(y, z, "q_step");

  // chi = <x-y, y-z>, mu = |x-y|^2, nu = |y-z|^2; all evaluated lazily so
  // no temporaries are materialized.
  const double chi = -(x - y).dot(z - y);
  const double mu = (x - y).squaredNorm();
  const double nu = (z - y).squaredNorm();
  const double rho = std::max(mu * nu - chi * chi, 0.0);

  QCaseReport rep;
  rep.chi = chi;
  rep.mu = mu;
  rep.nu = nu;
  rep.rho = rho;

  if (rho <= kTolDegenerate * std::max(mu * nu, 1.0)) {
    // x-y and y-z are (numerically) collinear.  chi < 0 means the two
    // half-spaces face away from each other and their intersection is
    // empty; the update falls back to y.  Otherwise the cuts are nested
    // and the projection is z itself.  Both values are the limits of the
    // rho > 0 branches, so a borderline misclassification is benign.
    if (chi < 0.0) {
      rep.branch = QBranch::EmptyIntersection;
      out = y;
    } else {
      rep.branch = QBranch::DegenerateForward;
      out = z;
    }
  } else if (chi * nu >= rho) {
    // Only the second half-space is active at the solution.
    rep.branch = QBranch::Interpolated;
    out = x + (1.0 + chi / nu) * (z - y);
  } else {
    // Both half-spaces are active; land on the intersection of their
    // boundary planes.
    rep.branch = QBranch::FullTwoPlane;
    out = y + (nu / rho) * (chi * (x - y) + mu * (z - y));
  }

  if (report != nullptr) *report = rep;
}

Vec q_step(const Vec& x, const Vec& y, const Vec& z, QCaseReport* report) {
  Vec out(x.size());
  q_step_into(x, y, z, out, report);
  return out;
}

}  // namespace haug
