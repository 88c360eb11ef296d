#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "haug/block.hpp"
#include "haug/operators.hpp"

namespace haug {

// ---------------------------------------------------------------------------
// Problem configuration files, point-cloud CSV, and result records.  The
// config surface is JSON with a fixed key layout; parsing is strict (an
// unknown set kind or a constraint violation is reported with the path of
// the offending field) and serialization round-trips losslessly.
// ---------------------------------------------------------------------------

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Set descriptors of the serializable catalog.  Halfspace, Hyperplane and
// SecondOrderConeSet come from the operator catalog directly; the rest
// carry the factory parameters.
struct BallDesc {
  Vec center;
  double radius = 0.0;
};
struct BoxDesc {
  Vec lo;
  Vec hi;
};
struct ProxSqNormDesc {
  double gamma = 1.0;
};
struct ProxL1Desc {
  double gamma = 1.0;
};
struct ResolventDesc {
  Eigen::MatrixXd M;
  Vec b;
};

using SetDescriptor = std::variant<Halfspace, Hyperplane, BallDesc, BoxDesc,
                                   SecondOrderConeSet, ProxSqNormDesc, ProxL1Desc,
                                   ResolventDesc>;

// Builds the catalog operator a descriptor stands for, in dimension N.
FqneOperator build_operator(const SetDescriptor& desc, Eigen::Index dimension);

struct ProblemConfig {
  Eigen::Index dimension = 0;
  Vec anchor;                      // start point x_0; empty means the origin
  std::vector<SetDescriptor> sets;
  bool uniform_distribution = true;
  std::vector<double> weights;     // categorical law when not uniform
  BlockConfig block;
  StoppingRule stopping;
  std::uint64_t seed = 0;
  int replications = 1;

  void validate() const;  // throws ConfigError naming the broken field
  Vec start_point() const;
  std::vector<FqneOperator> build_family() const;
  IndexDistribution build_distribution() const;
};

bool operator==(const ProblemConfig& a, const ProblemConfig& b);
inline bool operator!=(const ProblemConfig& a, const ProblemConfig& b) {
  return !(a == b);
}

ProblemConfig parse_config(const std::string& text);
std::string format_config(const ProblemConfig& cfg);
ProblemConfig load_config(const std::string& path);
void save_config(const ProblemConfig& cfg, const std::string& path);

// Point clouds as CSV: one point per row, one column per coordinate, no
// header, '.' decimal separator, 17 significant digits.
std::vector<Vec> read_cloud_csv(const std::string& path);
void write_cloud_csv(const std::string& path, const std::vector<Vec>& cloud);

// Flat key = value record with round-trip number formatting; the output
// format of solve results and ball estimates.
class ResultRecord {
 public:
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, long value);
  void add(const std::string& key, std::uint64_t value);
  void add(const std::string& key, const Vec& value);  // comma-joined coordinates

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }
  std::string to_text() const;  // "key = value" lines
  void save(const std::string& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// 17-significant-digit decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace haug
