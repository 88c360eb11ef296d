#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdint>
#include <vector>

#include "haug/rng.hpp"
#include "haug/sampling.hpp"
#include "haug/vec.hpp"

using namespace haug;

namespace {

Vec make2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("identical keys reproduce identical sequences") {
  RngStream a(123456789, 7);
  RngStream b(123456789, 7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.uniform01() == b.uniform01());
  }
}

TEST_CASE("distinct streams of one seed differ") {
  RngStream a(42, 0);
  RngStream b(42, 1);
  int equal = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) equal += 1;
  }
  CHECK(equal == 0);
}

TEST_CASE("uniform01 bounds and variety") {
  RngStream rng(9, 0);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 1e-4);
  CHECK(hi > 1.0 - 1e-4);
}

TEST_CASE("uniform interval") {
  RngStream rng(10, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform(-2.0, 3.0);
    CHECK(u >= -2.0);
    CHECK(u < 3.0);
  }
  CHECK_THROWS_AS(rng.uniform(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rng.uniform(2.0, -1.0), std::invalid_argument);
}

TEST_CASE("bounded integers are unbiased across small ranges") {
  RngStream rng(11, 0);
  CHECK_THROWS_AS(rng.below(0), std::invalid_argument);
  for (int i = 0; i < 100; ++i) CHECK(rng.below(1) == 0);

  // n = 3 splits 2^64 unevenly, the rejection must even it out.  With 3e5
  // draws a 6-sigma band around the mean is about +-0.0055.
  std::array<long, 3> counts{0, 0, 0};
  const long draws = 300000;
  for (long i = 0; i < draws; ++i) counts[rng.below(3)] += 1;
  for (long c : counts) {
    const double freq = static_cast<double>(c) / draws;
    CHECK(freq > 1.0 / 3.0 - 0.0055);
    CHECK(freq < 1.0 / 3.0 + 0.0055);
  }
}

TEST_CASE("categorical law validation") {
  CHECK_THROWS_AS(IndexDistribution::categorical({}), std::invalid_argument);
  CHECK_THROWS_AS(IndexDistribution::categorical({0.5, 0.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(IndexDistribution::categorical({0.5, -0.1, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(IndexDistribution::categorical({0.3, 0.3}), std::invalid_argument);
  CHECK_NOTHROW(IndexDistribution::categorical({0.5, 0.5 + 1e-12}));
  CHECK_THROWS_AS(IndexDistribution::uniform(0), std::invalid_argument);
}

TEST_CASE("point mass always draws its index") {
  const auto d = IndexDistribution::categorical({1.0});
  RngStream rng(12, 0);
  for (int i = 0; i < 1000; ++i) CHECK(d.draw(rng) == 0);
  CHECK(d.probability(0) == 1.0);
  CHECK_THROWS_AS(d.probability(1), std::out_of_range);
  CHECK_THROWS_AS(d.cloud(), std::logic_error);
  CHECK_THROWS_AS(d.draw_point(rng), std::logic_error);
}

TEST_CASE("two-way coin frequencies") {
  const auto d = IndexDistribution::categorical({0.5, 0.5});
  RngStream rng(13, 0);
  long ones = 0;
  const long draws = 100000;
  for (long i = 0; i < draws; ++i) ones += static_cast<long>(d.draw(rng));
  const double freq = static_cast<double>(ones) / draws;
  CHECK(freq >= 0.49);
  CHECK(freq <= 0.51);
}

TEST_CASE("skewed categorical frequencies") {
  const auto d = IndexDistribution::categorical({0.2, 0.8});
  RngStream rng(14, 0);
  long heavy = 0;
  const long draws = 100000;
  for (long i = 0; i < draws; ++i) heavy += static_cast<long>(d.draw(rng));
  const double freq = static_cast<double>(heavy) / draws;
  CHECK(freq > 0.79);
  CHECK(freq < 0.81);
}

TEST_CASE("uniform cloud sampling") {
  std::vector<Vec> cloud{make2(0, 0), make2(1, 0), make2(0, 1)};
  const auto d = IndexDistribution::uniform_over_cloud(cloud);
  CHECK(d.kind() == IndexDistribution::Kind::UniformOverPointCloud);
  CHECK(d.size() == 3);
  CHECK(d.probability(2) == doctest::Approx(1.0 / 3.0));
  CHECK(d.cloud().size() == 3);

  RngStream rng(15, 0);
  std::array<long, 3> counts{0, 0, 0};
  const long draws = 30000;
  for (long i = 0; i < draws; ++i) counts[d.draw(rng)] += 1;
  for (long c : counts) {
    const double freq = static_cast<double>(c) / draws;
    CHECK(freq >= 0.323);
    CHECK(freq <= 0.343);
  }

  // draw_point walks the same stream as draw.
  RngStream ra(16, 0), rb(16, 0);
  for (int i = 0; i < 200; ++i) {
    const Vec& p = d.draw_point(ra);
    CHECK(p == d.cloud()[d.draw(rb)]);
  }

  CHECK_THROWS_AS(IndexDistribution::uniform_over_cloud({}), std::invalid_argument);
  CHECK_THROWS_AS(IndexDistribution::uniform_over_cloud({make2(0, 0), Vec(3)}),
                  std::invalid_argument);
}

TEST_CASE("waiting times of a uniform four-way control") {
  const auto d = IndexDistribution::uniform(4);
  RngStream rng(17, 0);
  std::vector<std::uint64_t> draws(100000);
  for (auto& k : draws) k = d.draw(rng);
  for (std::uint64_t index = 0; index < 4; ++index) {
    const WaitingTimeStats st = waiting_time_stats(d, index, draws);
    CHECK(st.activations > 24000);
    CHECK(st.mean_gap >= 3.9);
    CHECK(st.mean_gap <= 4.1);
    CHECK(st.max_gap >= 4);
  }
}

TEST_CASE("waiting time of a point mass is one") {
  const auto d = IndexDistribution::categorical({1.0});
  RngStream rng(18, 0);
  std::vector<std::uint64_t> draws(5000);
  for (auto& k : draws) k = d.draw(rng);
  const WaitingTimeStats st = waiting_time_stats(d, 0, draws);
  CHECK(st.activations == 5000);
  CHECK(st.mean_gap == 1.0);
  CHECK(st.max_gap == 1);
}

TEST_CASE("waiting time of a rare index") {
  const auto d = IndexDistribution::categorical({0.9, 0.1});
  RngStream rng(19, 0);
  std::vector<std::uint64_t> draws(200000);
  for (auto& k : draws) k = d.draw(rng);
  const WaitingTimeStats st = waiting_time_stats(d, 1, draws);
  CHECK(st.mean_gap >= 9.5);
  CHECK(st.mean_gap <= 10.5);
  CHECK_THROWS_AS(waiting_time_stats(d, 2, draws), std::invalid_argument);
}

TEST_CASE("no activations leave empty statistics") {
  const auto d = IndexDistribution::categorical({0.5, 0.5});
  const std::vector<std::uint64_t> draws{0, 0, 0};
  const WaitingTimeStats st = waiting_time_stats(d, 1, draws);
  CHECK(st.activations == 0);
  CHECK(st.mean_gap == 0.0);
  CHECK(st.max_gap == 0);
}
