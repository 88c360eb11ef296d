#pragma once

#include <optional>
#include <vector>

#include "haug/operators.hpp"
#include "haug/vec.hpp"

namespace haug {

// ---------------------------------------------------------------------------
// Brute-force validators used by the test suites.  project_two_halfspaces
// is the independent ground truth the closed-form q_step is checked
// against: it knows nothing about the four-branch formula and instead
// enumerates KKT candidates for the nearest point of an intersection of
// two half-spaces.
// ---------------------------------------------------------------------------

// Projection instance: anchor plus two half-spaces { u : <normal, u> <=
// offset }.  A zero normal stands for the whole space and drops the
// constraint.
struct TwoHalfspaceInstance {
  Vec anchor;
  Halfspace first;
  Halfspace second;

  // The instance a q_step(x, y, z) call solves: the cut through y with
  // outward normal x - y, and the cut through z with outward normal y - z.
  static TwoHalfspaceInstance from_triple(const Vec& x, const Vec& y, const Vec& z);
};

// Nearest point of the intersection, or nullopt when the half-spaces are
// parallel opposing with incompatible offsets (certified empty
// intersection).  Candidates enumerated: the anchor itself, the foot on
// each boundary hyperplane, and the foot on the codimension-2 intersection
// of both boundaries via a 2x2 Gram solve; the feasible candidate nearest
// the anchor wins.
std::optional<Vec> project_two_halfspaces(const TwoHalfspaceInstance& inst);

// max over the family of |x - T x|: exact distance to the farthest set for
// projector families, a residual proxy otherwise.
double feasibility_residual(const std::vector<FqneOperator>& sets, const Vec& x);

}  // namespace haug
