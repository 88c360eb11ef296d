#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace haug {

// Dense column vector over double. All points, iterates and operator
// arguments in this library are of this type; dimensions are checked at
// the boundaries of every binary operation.
using Vec = Eigen::VectorXd;

inline void require_same_dim(const Vec& a, const Vec& b, const char* where) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}

inline bool is_finite(const Vec& v) { return v.allFinite(); }

inline void require_finite(const Vec& v, const char* where) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(where) + ": non-finite coordinate");
  }
}

inline double inner(const Vec& a, const Vec& b) {
  require_same_dim(a, b, "inner");
  return a.dot(b);
}

inline double norm(const Vec& a) { return a.norm(); }

inline double sq_norm(const Vec& a) { return a.squaredNorm(); }

// a + t*b, the one compound update the solver loops are built from.
inline Vec axpy(const Vec& a, double t, const Vec& b) {
  require_same_dim(a, b, "axpy");
  return a + t * b;
}

inline double dist(const Vec& a, const Vec& b) {
  require_same_dim(a, b, "dist");
  return (a - b).norm();
}

}  // namespace haug
