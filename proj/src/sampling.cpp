#include "haug/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace haug {

IndexDistribution IndexDistribution::categorical(std::vector<double> weights) {
  if (weights.empty()) {
    throw std::invalid_argument("IndexDistribution: empty weight vector");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("IndexDistribution: weights must be strictly positive");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("IndexDistribution: weights sum to " +
                                std::to_string(sum) + ", expected 1");
  }
  IndexDistribution d;
  d.kind_ = Kind::FiniteCategorical;
  d.weights_.reserve(weights.size());
  for (double w : weights) d.weights_.push_back(w / sum);
  d.cdf_.resize(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < d.weights_.size(); ++i) {
    acc += d.weights_[i];
    d.cdf_[i] = acc;
  }
  d.cdf_.back() = 1.0;  // close the table against rounding

  return d;
}

IndexDistribution IndexDistribution::uniform_over_cloud(std::vector<Vec> cloud) {
  if (cloud.empty()) {
    throw std::invalid_argument("IndexDistribution: empty point cloud");
  }
  const Eigen::Index dim = cloud.front().size();
  for (const Vec& p : cloud) {
    if (p.size() != dim) {
      throw std::invalid_argument("IndexDistribution: cloud points of mixed dimension");
    }
    require_finite(p, "IndexDistribution");
  }
  IndexDistribution d;
  d.kind_ = Kind::UniformOverPointCloud;
  d.cloud_ = std::move(cloud);
  return d;
}

IndexDistribution IndexDistribution::uniform(std::size_t p) {
  if (p == 0) throw std::invalid_argument("IndexDistribution: p must be positive");
  return categorical(std::vector<double>(p, 1.0 / static_cast<double>(p)));
}

std::size_t IndexDistribution::size() const {
  return kind_ == Kind::FiniteCategorical ? weights_.size() : cloud_.size();
}

double IndexDistribution::probability(std::size_t index) const {
  if (index >= size()) {
    throw std::out_of_range("IndexDistribution: index " + std::to_string(index) +
                            " out of range");
  }
  if (kind_ == Kind::FiniteCategorical) return weights_[index];
  return 1.0 / static_cast<double>(cloud_.size());
}

const std::vector<Vec>& IndexDistribution::cloud() const {
  if (kind_ != Kind::UniformOverPointCloud) {
    throw std::logic_error("IndexDistribution: no cloud for a categorical law");
  }
  return cloud_;
}

std::uint64_t IndexDistribution::draw(RngStream& rng) const {
  if (kind_ == Kind::UniformOverPointCloud) {
    return rng.below(cloud_.size());
  }
  // Inverse-CDF on a single uniform: first entry with cdf >= u.  u < 1 and
  // the closed table make the search always land.
  const double u = rng.uniform01();
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<std::uint64_t>(it - cdf_.begin());
}

const Vec& IndexDistribution::draw_point(RngStream& rng) const {
  if (kind_ != Kind::UniformOverPointCloud) {
    throw std::logic_error("IndexDistribution: draw_point needs a point cloud");
  }
  return cloud_[static_cast<std::size_t>(rng.below(cloud_.size()))];
}

WaitingTimeStats waiting_time_stats(const IndexDistribution& dist,
                                    std::uint64_t index,
                                    const std::vector<std::uint64_t>& draws) {
  if (index >= dist.size()) {
    throw std::invalid_argument("waiting_time_stats: index outside the support");
  }
  WaitingTimeStats st;
  bool seen = false;
  std::uint64_t prev = 0;
  std::uint64_t gap_sum = 0;
  std::uint64_t gaps = 0;
  for (std::uint64_t pos = 0; pos < draws.size(); ++pos) {
    if (draws[pos] != index) continue;
    st.activations += 1;
    if (seen) {
      const std::uint64_t gap = pos - prev;
      gap_sum += gap;
      gaps += 1;
      st.max_gap = std::max(st.max_gap, gap);
    }
    seen = true;
    prev = pos;
  }
  st.mean_gap = gaps == 0 ? 0.0 : static_cast<double>(gap_sum) / static_cast<double>(gaps);
  return st;
}

}  // namespace haug
