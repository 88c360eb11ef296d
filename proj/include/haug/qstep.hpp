#pragma once

#include "haug/vec.hpp"

namespace haug {

// Membership tolerance for the scaled half-space test in in_halfspace().
inline constexpr double kTolMembership = 1e-9;

// Relative threshold below which the discriminant rho is treated as zero
// and the degenerate branches of q_step() fire.
inline constexpr double kTolDegenerate = 1e-12;

// Which closed-form branch produced the update.
enum class QBranch {
  EmptyIntersection,  // rho ~ 0 and chi < 0: the two half-spaces miss each other
  DegenerateForward,  // rho ~ 0 and chi >= 0: aligned cuts, step straight to z
  Interpolated,       // rho > 0, chi*nu >= rho: only the second cut is active
  FullTwoPlane,       // rho > 0, chi*nu <  rho: both cuts active
};

const char* to_string(QBranch b);

// Scalar products underlying the branch selection, reported for
// diagnostics and tests.
struct QCaseReport {
  double chi = 0.0;  // <x-y, y-z>
  double mu = 0.0;   // |x-y|^2
  double nu = 0.0;   // |y-z|^2
  double rho = 0.0;  // mu*nu - chi^2, clamped at 0
  QBranch branch = QBranch::DegenerateForward;
};

// True iff z lies in the half-space onto which y is the projection of x,
//   { w : <w - y, x - y> <= 0 },
// up to a tolerance scaled by the magnitudes involved.  For x == y the
// half-space degenerates to the whole space and the test is always true.
bool in_halfspace(const Vec& x, const Vec& y, const Vec& z,
                  double tol = kTolMembership);

// Projection of x onto the intersection of the two half-spaces carried by
// (x, y) and (y, z), i.e. the outer approximation used by every solver in
// this library; falls back to y when the intersection is empty.  The result
// is one closed-form point per branch; no iterative solve is involved.
Vec q_step(const Vec& x, const Vec& y, const Vec& z, QCaseReport* report = nullptr);

// Same computation writing into a preallocated vector; `out` must have the
// common dimension and be distinct from all three inputs.  Used by the
// solver loops to stay allocation-free.
void q_step_into(const Vec& x, const Vec& y, const Vec& z, Vec& out,
                 QCaseReport* report = nullptr);

}  // namespace haug
