#pragma once

#include <cstdint>
#include <vector>

#include "haug/rng.hpp"
#include "haug/vec.hpp"

namespace haug {

// Random index selection over a finite family of constraints.  Indices are
// 0-based everywhere in this library (traces, configs, APIs).
//
// Two kinds: an explicit categorical law over {0, ..., p-1} with strictly
// positive probabilities, and the uniform law over the rows of a stored
// point cloud (the index identifies the sampled point).  Both reduce every
// draw to RngStream output alone, with no iterate feeding back into the
// sampling, so a (seed, stream_id) pair fixes the whole index sequence.
class IndexDistribution {
 public:
  enum class Kind { FiniteCategorical, UniformOverPointCloud };

  // Weights must be strictly positive and sum to 1 within 1e-9; they are
  // renormalized into an exact cumulative table.
  static IndexDistribution categorical(std::vector<double> weights);

  // Uniform over {0, ..., cloud.size()-1}; the cloud is kept so callers can
  // map the index back to the point.
  static IndexDistribution uniform_over_cloud(std::vector<Vec> cloud);

  // Convenience: uniform categorical over p indices.
  static IndexDistribution uniform(std::size_t p);

  Kind kind() const { return kind_; }
  std::size_t size() const;
  double probability(std::size_t index) const;
  const std::vector<Vec>& cloud() const;  // UniformOverPointCloud only

  std::uint64_t draw(RngStream& rng) const;
  const Vec& draw_point(RngStream& rng) const;  // UniformOverPointCloud only

 private:
  IndexDistribution() = default;

  Kind kind_ = Kind::FiniteCategorical;
  std::vector<double> weights_;  // normalized
  std::vector<double> cdf_;      // cumulative, last entry forced to 1
  std::vector<Vec> cloud_;
};

// Gap statistics of one index within a draw sequence: the spacings between
// successive positions where the index was drawn.  For an i.i.d. control
// the mean gap estimates the reciprocal activation probability 1/q.
struct WaitingTimeStats {
  std::uint64_t activations = 0;  // number of times the index appeared
  double mean_gap = 0.0;          // mean spacing between successive activations
  std::uint64_t max_gap = 0;
};

WaitingTimeStats waiting_time_stats(const IndexDistribution& dist,
                                    std::uint64_t index,
                                    const std::vector<std::uint64_t>& draws);

}  // namespace haug
