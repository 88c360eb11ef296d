#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace haug {

// Deterministic random stream addressed by (seed, stream_id).
//
// Generator: xoshiro256++ (Blackman & Vigna), 256-bit state.  The state is
// derived by running splitmix64 over the 128-bit key (seed, stream_id), so
// distinct stream ids under the same seed give statistically independent
// streams and the whole sequence is reproducible bit for bit from the two
// integers alone.  Replicated experiments use stream_id = replication index.
//
// All floating-point draws are built only from next_u64() and exact double
// arithmetic; nothing here depends on libc or libstdc++ distribution
// internals, so traces are stable across standard library versions.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {
    // splitmix64 walk over the key; constants are the reference ones.
    std::uint64_t w = seed ^ 0x9e3779b97f4a7c15ull;
    w = mix_(w);
    std::uint64_t v = w ^ stream_id;
    for (auto& s : s_) {
      v += 0x9e3779b97f4a7c15ull;
      s = mix_(v);
    }
    // A zero state is the one forbidden input; the mix cannot return four
    // zeros for distinct increments, but keep the guard explicit.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl_(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl_(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("RngStream::uniform: lo >= hi");
    return lo + (hi - lo) * uniform01();
  }

  // Uniform integer in [0, n) by multiply-shift with rejection; exact, no
  // modulo bias, and no division on the common path.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("RngStream::below: n == 0");
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {  // only here can the map be biased
      const std::uint64_t cutoff = (0 - n) % n;  // 2^64 mod n
      while (low < cutoff) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  static std::uint64_t rotl_(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t mix_(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t s_[4];
};

}  // namespace haug
