#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "haug/oracles.hpp"
#include "haug/qstep.hpp"
#include "haug/rng.hpp"
#include "haug/vec.hpp"

using namespace haug;

namespace {

Vec make2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec random_vec(RngStream& rng, Eigen::Index n, double scale) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * rng.uniform(-3.0, 3.0);
  return v;
}

// The branch cutoff rho <= 1e-12 * max(mu*nu, 1) deliberately flattens
// near-parallel and tiny triples; the exact oracle does not.  Random triples
// whose discriminant sits near that cliff (or whose corner system is too
// ill-conditioned to compare at 1e-9) are resampled.  Dimension 1 is exempt:
// there mu*nu = chi^2 identically, every triple is flat, and the flat
// branches agree with the oracle exactly.
bool comparable(const QCaseReport& rep, Eigen::Index n) {
  if (n == 1) return true;
  return rep.rho >= 1e-6 * std::max(rep.mu * rep.nu, 1.0);
}

}  // namespace

TEST_CASE("worked examples with branch reports") {
  QCaseReport rep;

  Vec q = q_step(make2(0, 0), make2(1, 0), make2(1, 1), &rep);
  CHECK((q - make2(1, 1)).norm() <= 1e-14);
  CHECK(rep.branch == QBranch::FullTwoPlane);
  CHECK(rep.chi == doctest::Approx(0.0));
  CHECK(rep.mu == doctest::Approx(1.0));
  CHECK(rep.nu == doctest::Approx(1.0));
  CHECK(rep.rho == doctest::Approx(1.0));

  q = q_step(make2(0, 0), make2(1, 0), make2(2, 0), &rep);
  CHECK((q - make2(2, 0)).norm() <= 1e-14);
  CHECK(rep.branch == QBranch::DegenerateForward);

  q = q_step(make2(0, 0), make2(1, 0), make2(2, 1), &rep);
  CHECK((q - make2(1.5, 1.5)).norm() <= 1e-12);
  CHECK(rep.branch == QBranch::Interpolated);

  // Opposed collinear cuts miss each other; the update falls back to y.
  q = q_step(make2(0, 0), make2(1, 0), make2(0.5, 0), &rep);
  CHECK((q - make2(1, 0)).norm() == 0.0);
  CHECK(rep.branch == QBranch::EmptyIntersection);
  CHECK(rep.chi < 0.0);
}

TEST_CASE("coincident inputs") {
  QCaseReport rep;
  const Vec x = make2(0.5, -2.0);

  Vec q = q_step(x, x, x, &rep);
  CHECK(q == x);
  CHECK(rep.branch == QBranch::DegenerateForward);

  // z = y: the second cut is the whole space, the step lands on y.
  const Vec y = make2(1.0, 1.0);
  q = q_step(x, y, y, &rep);
  CHECK(q == y);

  // x = y: the first cut is the whole space, the step lands on z.
  const Vec z = make2(3.0, 0.0);
  q = q_step(x, x, z, &rep);
  CHECK(q == z);
}

TEST_CASE("in_halfspace worked examples") {
  CHECK(in_halfspace(make2(0, 0), make2(1, 0), make2(2, 0)));
  CHECK(!in_halfspace(make2(0, 0), make2(1, 0), make2(0, 0)));
  // y = z gives a zero inner product for any x.
  CHECK(in_halfspace(make2(7, -3), make2(1, 2), make2(1, 2)));
}

TEST_CASE("report invariants on random triples") {
  RngStream rng(7, 0);
  for (int trial = 0; trial < 5000; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(6));
    const Vec x = random_vec(rng, n, 1.0);
    const Vec y = random_vec(rng, n, 1.0);
    const Vec z = random_vec(rng, n, 1.0);
    QCaseReport rep;
    (void)q_step(x, y, z, &rep);

    CHECK(rep.rho >= 0.0);
    CHECK(rep.mu >= 0.0);
    CHECK(rep.nu >= 0.0);
    const bool flat = rep.rho <= kTolDegenerate * std::max(rep.mu * rep.nu, 1.0);
    switch (rep.branch) {
      case QBranch::EmptyIntersection:
        CHECK(flat);
        CHECK(rep.chi < 0.0);
        break;
      case QBranch::DegenerateForward:
        CHECK(flat);
        CHECK(rep.chi >= 0.0);
        break;
      case QBranch::Interpolated:
        CHECK(!flat);
        CHECK(rep.chi * rep.nu >= rep.rho);
        break;
      case QBranch::FullTwoPlane:
        CHECK(!flat);
        CHECK(rep.chi * rep.nu < rep.rho);
        break;
    }
  }
}

TEST_CASE("branch selection is scale invariant") {
  RngStream rng(8, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(4));
    const Vec x = random_vec(rng, n, 1.0);
    const Vec y = random_vec(rng, n, 1.0);
    const Vec z = random_vec(rng, n, 1.0);
    QCaseReport rep;
    (void)q_step(x, y, z, &rep);
    if (!comparable(rep, n)) continue;
    QCaseReport scaled;
    (void)q_step(Vec(1e6 * x), Vec(1e6 * y), Vec(1e6 * z), &scaled);
    CHECK(rep.branch == scaled.branch);
  }
}

TEST_CASE("q_step_into matches q_step") {
  RngStream rng(9, 0);
  Vec out;
  for (int trial = 0; trial < 2000; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(8));
    const Vec x = random_vec(rng, n, 1.0);
    const Vec y = random_vec(rng, n, 1.0);
    const Vec z = random_vec(rng, n, 1.0);
    QCaseReport ra, rb;
    const Vec q = q_step(x, y, z, &ra);
    q_step_into(x, y, z, out, &rb);
    CHECK(q == out);
    CHECK(ra.branch == rb.branch);
  }
}

TEST_CASE("agreement with the exact two-cut projector") {
  RngStream rng(10, 0);
  long compared = 0;
  for (Eigen::Index n : {1, 2, 3}) {
    for (int trial = 0; trial < 1500; ++trial) {
      const double scale = (rng.below(10) == 0) ? 1e3 : 1.0;
      const Vec x = random_vec(rng, n, scale);
      const Vec y = random_vec(rng, n, scale);
      const Vec z = random_vec(rng, n, scale);
      QCaseReport rep;
      const Vec q = q_step(x, y, z, &rep);
      if (!comparable(rep, n)) continue;

      const auto inst = TwoHalfspaceInstance::from_triple(x, y, z);
      const auto proj = project_two_halfspaces(inst);
      if (n == 1) {
        // On the line the two cuts either nest or miss entirely, so the
        // flat-branch classification must match the exact verdict.
        CHECK(proj.has_value() == (rep.branch != QBranch::EmptyIntersection));
      }
      if (!proj.has_value()) continue;

      const double tol = 1e-9 * (1.0 + x.norm() + proj->norm());
      CHECK((q - *proj).norm() <= tol);
      CHECK(in_halfspace(x, y, q));
      CHECK(in_halfspace(y, z, q));
      compared += 1;
    }
  }
  CHECK(compared > 3000);
}

TEST_CASE("flat triples constructed exactly") {
  // Dyadic components make rho = 0 in exact float arithmetic, so the flat
  // branches fire deterministically.
  Vec x(3), d(3);
  x << 0.5, -1.0, 0.25;
  d << 1.0, 0.5, -0.25;
  const Vec y = x + d;

  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    const Vec z = y + t * d;
    QCaseReport rep;
    const Vec q = q_step(x, y, z, &rep);
    CHECK(rep.branch == QBranch::DegenerateForward);
    CHECK(q == z);
    const auto proj = project_two_halfspaces(TwoHalfspaceInstance::from_triple(x, y, z));
    REQUIRE(proj.has_value());
    CHECK((*proj - z).norm() <= 1e-12 * (1.0 + z.norm()));
  }

  for (double t : {-0.5, -1.0, -2.0}) {
    const Vec z = y + t * d;
    QCaseReport rep;
    const Vec q = q_step(x, y, z, &rep);
    CHECK(rep.branch == QBranch::EmptyIntersection);
    CHECK(q == y);
    CHECK(!project_two_halfspaces(TwoHalfspaceInstance::from_triple(x, y, z)).has_value());
  }
}
