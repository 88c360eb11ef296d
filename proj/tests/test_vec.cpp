#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "haug/rng.hpp"
#include "haug/vec.hpp"

using namespace haug;

namespace {

Vec random_vec(RngStream& rng, Eigen::Index n, double lo = -5.0, double hi = 5.0) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("axpy worked examples") {
  Vec a(2), b(2);
  a << 1, 0;
  b << 0, 1;
  Vec r = axpy(a, 1.0, b);
  CHECK(r[0] == 1.0);
  CHECK(r[1] == 1.0);

  a << 9, 9;
  b << 2, 3;
  CHECK(axpy(b, 0.0, a) == b);

  a << 2, 3;
  Vec z = axpy(a, -1.0, a);
  CHECK(z.norm() == 0.0);
}

TEST_CASE("dimension mismatch throws") {
  Vec a(2), b(3);
  a.setZero();
  b.setZero();
  CHECK_THROWS_AS(inner(a, b), std::invalid_argument);
  CHECK_THROWS_AS(axpy(a, 1.0, b), std::invalid_argument);
  CHECK_THROWS_AS(dist(a, b), std::invalid_argument);
}

TEST_CASE("finiteness guard") {
  Vec a(2);
  a << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK(!is_finite(a));
  CHECK_THROWS_AS(require_finite(a, "test"), std::invalid_argument);
  a << 1.0, 2.0;
  CHECK(is_finite(a));
  CHECK_NOTHROW(require_finite(a, "test"));
}

TEST_CASE("Cauchy-Schwarz on random vectors") {
  RngStream rng(42, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(10));
    const Vec a = random_vec(rng, n);
    const Vec b = random_vec(rng, n);
    const double lhs = inner(a, b) * inner(a, b);
    const double rhs = inner(a, a) * inner(b, b);
    CHECK(lhs <= rhs * (1.0 + 1e-12) + 1e-300);
  }
}

TEST_CASE("parallelogram law on random vectors") {
  RngStream rng(43, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(10));
    const Vec a = random_vec(rng, n);
    const Vec b = random_vec(rng, n);
    const double lhs = sq_norm(a + b) + sq_norm(a - b);
    const double rhs = 2.0 * sq_norm(a) + 2.0 * sq_norm(b);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}
