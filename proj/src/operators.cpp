#include "haug/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace haug {

namespace {

void require_nonzero_normal(const Vec& n, const char* where) {
  require_finite(n, where);
  if (n.size() == 0 || n.norm() == 0.0) {
    throw std::invalid_argument(std::string(where) + ": zero normal vector");
  }
}

// Shared scaling for membership residual tests: absolute near the origin,
// relative far from it.
double member_scale(const Vec& x) { return 1.0 + x.norm(); }

}  // namespace

const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::HalfspaceProjector:   return "HalfspaceProjector";
    case OperatorKind::BallProjector:        return "BallProjector";
    case OperatorKind::BoxProjector:         return "BoxProjector";
    case OperatorKind::HyperplaneProjector:  return "HyperplaneProjector";
    case OperatorKind::SocProjector:         return "SocProjector";
    case OperatorKind::SubgradientProjector: return "SubgradientProjector";
    case OperatorKind::Prox:                 return "Prox";
    case OperatorKind::AffineResolvent:      return "AffineResolvent";
    case OperatorKind::Custom:               return "Custom";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Projection formulas.
// ---------------------------------------------------------------------------

Vec project_halfspace(const Halfspace& h, const Vec& x) {
  require_same_dim(h.normal, x, "project_halfspace");
  const double excess = h.normal.dot(x) - h.offset;
  if (excess <= 0.0) return x;
  return x - (excess / h.normal.squaredNorm()) * h.normal;
}

Vec project_hyperplane(const Hyperplane& h, const Vec& x) {
  require_same_dim(h.normal, x, "project_hyperplane");
  const double excess = h.normal.dot(x) - h.offset;
  return x - (excess / h.normal.squaredNorm()) * h.normal;
}

Vec project_ball(const Vec& center, double radius, const Vec& x) {
  require_same_dim(center, x, "project_ball");
  const Vec d = x - center;
  const double dn = d.norm();
  if (dn <= radius) return x;
  return center + (radius / dn) * d;
}

Vec project_box(const Vec& lo, const Vec& hi, const Vec& x) {
  require_same_dim(lo, x, "project_box");
  return x.cwiseMax(lo).cwiseMin(hi);
}

namespace {

// In-place body of project_soc; also powers the projector's eval_into so
// long sampling loops do not allocate per evaluation.
void soc_into(const SecondOrderConeSet& cone, const Vec& x, Vec& out) {
  if (x.size() != cone.vertex.size() + 1) {
    throw std::invalid_argument("project_soc: point dimension must be vertex dimension + 1");
  }
  const Eigen::Index n = cone.vertex.size();
  const double t = x(n);
  const double un = (x.head(n) - cone.vertex).norm();
  out.resize(x.size());
  // The three closed-form cases agree where their conditions meet, so the
  // tie handling below never changes the value, only which formula runs.
  if (un <= t) {  // already in the cone
    out = x;
  } else if (un <= -t) {  // in the polar cone: nearest point is the apex
    out.head(n) = cone.vertex;
    out(n) = 0.0;
  } else {
    const double s = 0.5 * (un + t);  // un > |t| >= 0 here, so un > 0
    out.head(n) = cone.vertex + (s / un) * (x.head(n) - cone.vertex);
    out(n) = s;
  }
}

}  // namespace

Vec project_soc(const SecondOrderConeSet& cone, const Vec& x) {
  Vec out;
  soc_into(cone, x, out);
  return out;
}

// ---------------------------------------------------------------------------
// FqneOperator.
// ---------------------------------------------------------------------------

bool FqneOperator::is_projector() const {
  switch (kind_) {
    case OperatorKind::HalfspaceProjector:
    case OperatorKind::BallProjector:
    case OperatorKind::BoxProjector:
    case OperatorKind::HyperplaneProjector:
    case OperatorKind::SocProjector:
      return true;
    default:
      return false;
  }
}

Vec FqneOperator::operator()(const Vec& x) const {
  if (!eval_) throw std::logic_error("FqneOperator: empty operator");
  if (x.size() != dim_) {
    throw std::invalid_argument("FqneOperator: argument dimension " +
                                std::to_string(x.size()) + ", operator expects " +
                                std::to_string(dim_));
  }
  return eval_(x);
}

void FqneOperator::eval_into(const Vec& x, Vec& out) const {
  if (!eval_) throw std::logic_error("FqneOperator: empty operator");
  if (x.size() != dim_) {
    throw std::invalid_argument("FqneOperator: argument dimension " +
                                std::to_string(x.size()) + ", operator expects " +
                                std::to_string(dim_));
  }
  if (eval_into_) {
    eval_into_(x, out);
  } else {
    out = eval_(x);
  }
}

bool FqneOperator::is_fixed(const Vec& x, double tol) const {
  if (!member_) {
    throw std::logic_error("FqneOperator: no membership test for this operator");
  }
  if (x.size() != dim_) {
    throw std::invalid_argument("FqneOperator::is_fixed: dimension mismatch");
  }
  return member_(x, tol);
}

double FqneOperator::residual(const Vec& x) const { return ((*this)(x) - x).norm(); }

// ---------------------------------------------------------------------------
// Factories.
// ---------------------------------------------------------------------------

FqneOperator halfspace_projector(Halfspace h) {
  require_nonzero_normal(h.normal, "halfspace_projector");
  const Eigen::Index dim = h.normal.size();
  auto set = std::make_shared<Halfspace>(std::move(h));
  return FqneOperator(
      OperatorKind::HalfspaceProjector, dim,
      [set](const Vec& x) { return project_halfspace(*set, x); },
      [set](const Vec& x, double tol) {
        return set->normal.dot(x) - set->offset <= tol * member_scale(x);
      });
}

FqneOperator hyperplane_projector(Hyperplane h) {
  require_nonzero_normal(h.normal, "hyperplane_projector");
  const Eigen::Index dim = h.normal.size();
  auto set = std::make_shared<Hyperplane>(std::move(h));
  return FqneOperator(
      OperatorKind::HyperplaneProjector, dim,
      [set](const Vec& x) { return project_hyperplane(*set, x); },
      [set](const Vec& x, double tol) {
        return std::abs(set->normal.dot(x) - set->offset) <= tol * member_scale(x);
      });
}

FqneOperator ball_projector(Vec center, double radius) {
  require_finite(center, "ball_projector");
  if (!(radius > 0.0)) {
    throw std::invalid_argument("ball_projector: radius must be positive");
  }
  const Eigen::Index dim = center.size();
  auto c = std::make_shared<Vec>(std::move(center));
  return FqneOperator(
      OperatorKind::BallProjector, dim,
      [c, radius](const Vec& x) { return project_ball(*c, radius, x); },
      [c, radius](const Vec& x, double tol) {
        return (x - *c).norm() - radius <= tol * member_scale(x);
      });
}

FqneOperator box_projector(Vec lo, Vec hi) {
  require_same_dim(lo, hi, "box_projector");
  require_finite(lo, "box_projector");
  require_finite(hi, "box_projector");
  if ((lo.array() > hi.array()).any()) {
    throw std::invalid_argument("box_projector: lower bound exceeds upper bound");
  }
  const Eigen::Index dim = lo.size();
  auto l = std::make_shared<Vec>(std::move(lo));
  auto h = std::make_shared<Vec>(std::move(hi));
  return FqneOperator(
      OperatorKind::BoxProjector, dim,
      [l, h](const Vec& x) { return project_box(*l, *h, x); },
      [l, h](const Vec& x, double tol) {
        const double s = tol * member_scale(x);
        return (x.array() >= l->array() - s).all() && (x.array() <= h->array() + s).all();
      });
}

FqneOperator soc_projector(SecondOrderConeSet cone) {
  require_finite(cone.vertex, "soc_projector");
  const Eigen::Index dim = cone.vertex.size() + 1;
  auto set = std::make_shared<SecondOrderConeSet>(std::move(cone));
  return FqneOperator(
      OperatorKind::SocProjector, dim,
      [set](const Vec& x) { return project_soc(*set, x); },
      [set](const Vec& x, Vec& out) { soc_into(*set, x, out); },
      [set](const Vec& x, double tol) {
        const Eigen::Index n = set->vertex.size();
        return (x.head(n) - set->vertex).norm() - x(n) <= tol * member_scale(x);
      });
}

FqneOperator subgradient_projector(std::function<double(const Vec&)> f,
                                   std::function<Vec(const Vec&)> s,
                                   Eigen::Index dim) {
  if (!f || !s) throw std::invalid_argument("subgradient_projector: empty handle");
  auto fs = std::make_shared<std::pair<std::function<double(const Vec&)>,
                                       std::function<Vec(const Vec&)>>>(std::move(f),
                                                                        std::move(s));
  return FqneOperator(
      OperatorKind::SubgradientProjector, dim,
      [fs](const Vec& x) -> Vec {
        const double fx = fs->first(x);
        if (fx <= 0.0) return x;
        const Vec g = fs->second(x);
        const double g2 = g.squaredNorm();
        if (g2 == 0.0) {
          throw std::domain_error(
              "subgradient_projector: zero subgradient at a point with positive value");
        }
        return x - (fx / g2) * g;
      },
      [fs](const Vec& x, double tol) { return fs->first(x) <= tol * member_scale(x); });
}

FqneOperator prox_sq_norm(double gamma, Eigen::Index dim) {
  if (!(gamma > 0.0)) throw std::invalid_argument("prox_sq_norm: gamma must be positive");
  return FqneOperator(
      OperatorKind::Prox, dim,
      [gamma](const Vec& x) -> Vec { return x / (1.0 + gamma); },
      // Argmin of gamma/2 |.|^2 is the origin.
      [](const Vec& x, double tol) { return x.norm() <= tol * member_scale(x); });
}

FqneOperator prox_l1(double gamma, Eigen::Index dim) {
  if (!(gamma > 0.0)) throw std::invalid_argument("prox_l1: gamma must be positive");
  return FqneOperator(
      OperatorKind::Prox, dim,
      [gamma](const Vec& x) -> Vec {
        // soft threshold, componentwise
        return x.array().sign() * (x.array().abs() - gamma).max(0.0);
      },
      [](const Vec& x, double tol) { return x.norm() <= tol * member_scale(x); });
}

FqneOperator prox_indicator(FqneOperator projector) {
  if (!projector.is_projector()) {
    throw std::invalid_argument("prox_indicator: argument must be a catalog projector");
  }
  return projector;  // prox of an indicator is the projector itself
}

FqneOperator affine_resolvent(const Eigen::MatrixXd& M, Vec b) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument("affine_resolvent: matrix must be square");
  }
  if (b.size() != M.rows()) {
    throw std::invalid_argument("affine_resolvent: offset dimension mismatch");
  }
  if (!M.allFinite()) throw std::invalid_argument("affine_resolvent: non-finite matrix");
  require_finite(b, "affine_resolvent");

  // A z = M z + b is maximally monotone iff the symmetric part of M is
  // positive semidefinite; allow a hair of negative slack for rounding.
  const Eigen::MatrixXd sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw std::invalid_argument("affine_resolvent: eigenvalue check failed");
  }
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -1e-10) {
    throw std::invalid_argument(
        "affine_resolvent: map is not monotone (min symmetric eigenvalue " +
        std::to_string(min_eig) + ")");
  }

  const Eigen::Index dim = M.rows();
  struct Data {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    Eigen::MatrixXd M;
    Vec b;
  };
  auto data = std::make_shared<Data>();
  data->lu.compute(Eigen::MatrixXd::Identity(dim, dim) + M);
  data->M = M;
  data->b = std::move(b);
  return FqneOperator(
      OperatorKind::AffineResolvent, dim,
      [data](const Vec& x) -> Vec { return data->lu.solve(x - data->b); },
      // Fixed points are the zeros of A.
      [data](const Vec& x, double tol) {
        return (data->M * x + data->b).norm() <= tol * member_scale(x);
      });
}

FqneOperator custom_operator(FqneOperator::EvalFn eval, Eigen::Index dim) {
  if (!eval) throw std::invalid_argument("custom_operator: empty callable");
  return FqneOperator(OperatorKind::Custom, dim, std::move(eval), nullptr);
}

}  // namespace haug
