#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "haug/vec.hpp"

namespace haug {

// Default tolerance for fixed-point membership tests of catalog operators.
inline constexpr double kTolFixed = 1e-9;

// ---------------------------------------------------------------------------
// Set descriptions used by the projector catalog.
// ---------------------------------------------------------------------------

// { z : <normal, z> <= offset }, normal nonzero.
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

// { z : <normal, z> = offset }, normal nonzero.
struct Hyperplane {
  Vec normal;
  double offset = 0.0;
};

// { (z, xi) in R^(N+1) : |z - vertex| <= xi }; the ice-cream cone translated
// so its apex sits at (vertex, 0).
struct SecondOrderConeSet {
  Vec vertex;
};

// ---------------------------------------------------------------------------
// Plain projection formulas.  Each returns the nearest point of the set;
// they are the building blocks both of the operator catalog below and of
// the brute-force validators in the test suite.
// ---------------------------------------------------------------------------

Vec project_halfspace(const Halfspace& h, const Vec& x);
Vec project_hyperplane(const Hyperplane& h, const Vec& x);
Vec project_ball(const Vec& center, double radius, const Vec& x);
Vec project_box(const Vec& lo, const Vec& hi, const Vec& x);
Vec project_soc(const SecondOrderConeSet& cone, const Vec& x);

// ---------------------------------------------------------------------------
// Firmly quasinonexpansive operator.
//
// A thin value type bundling the evaluation map with an optional membership
// test for its fixed-point set.  Everything the solvers need from a
// constraint is here: T(x) moves toward the set, is_fixed(x) says whether x
// already lies in it.  Operators built by the factory functions below are
// firmly quasinonexpansive by construction; the property is exercised, not
// assumed, by the test suite.
// ---------------------------------------------------------------------------

enum class OperatorKind {
  HalfspaceProjector,
  BallProjector,
  BoxProjector,
  HyperplaneProjector,
  SocProjector,
  SubgradientProjector,
  Prox,
  AffineResolvent,
  Custom,
};

const char* to_string(OperatorKind k);

class FqneOperator {
 public:
  using EvalFn = std::function<Vec(const Vec&)>;
  using EvalIntoFn = std::function<void(const Vec&, Vec&)>;
  using MemberFn = std::function<bool(const Vec&, double)>;

  FqneOperator() = default;
  FqneOperator(OperatorKind kind, Eigen::Index dim, EvalFn eval, MemberFn member)
      : kind_(kind), dim_(dim), eval_(std::move(eval)), member_(std::move(member)) {}
  FqneOperator(OperatorKind kind, Eigen::Index dim, EvalFn eval, EvalIntoFn eval_into,
               MemberFn member)
      : kind_(kind),
        dim_(dim),
        eval_(std::move(eval)),
        eval_into_(std::move(eval_into)),
        member_(std::move(member)) {}

  OperatorKind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  bool valid() const { return static_cast<bool>(eval_); }

  // True when the operator is an exact projector onto its fixed-point set,
  // so that |x - T x| equals the distance to the set.
  bool is_projector() const;

  Vec operator()(const Vec& x) const;

  // Writes T(x) into out, resizing it as needed.  Catalog projectors write
  // in place, so loops that reuse `out` stay allocation-free; operators
  // built without an in-place form fall back to the allocating path.
  void eval_into(const Vec& x, Vec& out) const;

  // Membership of x in Fix T, with a tolerance whose meaning is the natural
  // residual of each catalog entry.  Unavailable for Custom operators.
  bool is_fixed(const Vec& x, double tol = kTolFixed) const;
  bool has_membership_test() const { return static_cast<bool>(member_); }

  // Distance proxy |x - T x|; exact distance to the set for projectors.
  double residual(const Vec& x) const;

 private:
  OperatorKind kind_ = OperatorKind::Custom;
  Eigen::Index dim_ = 0;
  EvalFn eval_;
  EvalIntoFn eval_into_;
  MemberFn member_;
};

// ---------------------------------------------------------------------------
// Catalog factories.
// ---------------------------------------------------------------------------

FqneOperator halfspace_projector(Halfspace h);
FqneOperator hyperplane_projector(Hyperplane h);
FqneOperator ball_projector(Vec center, double radius);
FqneOperator box_projector(Vec lo, Vec hi);
FqneOperator soc_projector(SecondOrderConeSet cone);

// Subgradient projector of a convex f with subgradient selection s:
//   x              if f(x) <= 0,
//   x - f(x)/|s(x)|^2 * s(x)   otherwise.
// The caller supplies both handles; s(x) must be a valid subgradient at x
// and nonzero whenever f(x) > 0.
FqneOperator subgradient_projector(std::function<double(const Vec&)> f,
                                   std::function<Vec(const Vec&)> s,
                                   Eigen::Index dim);

// Proximal maps of the catalog integrands.
FqneOperator prox_sq_norm(double gamma, Eigen::Index dim);  // gamma/2 * |.|^2
FqneOperator prox_l1(double gamma, Eigen::Index dim);       // gamma * |.|_1

// prox of the indicator of a projector-catalog set is that projector; the
// factory just validates and passes it through so configs can say what
// they mean.
FqneOperator prox_indicator(FqneOperator projector);

// Resolvent (Id + A)^(-1) of the maximally monotone affine map A z = M z + b.
// Construction factorizes (Id + M) once and verifies monotonicity through
// the smallest eigenvalue of the symmetric part of M.
FqneOperator affine_resolvent(const Eigen::MatrixXd& M, Vec b);

// Escape hatch: any user-supplied firmly quasinonexpansive map.  No
// membership test is attached, so generic fixed-point diagnostics fall back
// to the residual |x - T x|.
FqneOperator custom_operator(FqneOperator::EvalFn eval, Eigen::Index dim);

}  // namespace haug
