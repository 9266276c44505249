#pragma once

#include <cmath>
#include <cstdint>

namespace proxyval {

// Bijective 64-bit mix (the splitmix64 finalizer).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Counter-based splittable generator. A stream is identified by a 64-bit
// key; draw i of the stream is mix64(key + i * golden), so streams can be
// split per entity (user, product, ...) and every draw is reproducible
// independent of evaluation order or thread count.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t key) : key_(key) {}

  // Child stream for a lane (e.g. a user index). The salt keeps
  // split(0) distinct from the parent stream itself.
  SplitRng split(std::uint64_t lane) const {
    return SplitRng(mix64(key_ ^ mix64(lane + 0x632BE59BD9B4E019ull)));
  }

  std::uint64_t next_u64() {
    counter_ += 1;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ull);
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound) by multiply-shift on the top 32 bits.
  // Bias is O(bound / 2^32), irrelevant for the catalog-sized bounds used here.
  std::uint32_t next_below(std::uint32_t bound) {
    std::uint32_t top = static_cast<std::uint32_t>(next_u64() >> 32);
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(top) * bound) >> 32);
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  double next_exponential(double mean) { return -mean * std::log1p(-next_double()); }

  // Standard normal via Box-Muller; consumes two draws.
  double next_normal() {
    double u1 = 1.0 - next_double();
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace proxyval
