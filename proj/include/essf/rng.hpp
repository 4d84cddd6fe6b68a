#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace essf {

// Deterministic xoshiro256++ generator. Replicates get independent streams
// via stream(seed, k); every sampler takes one of these explicitly, there is
// no global RNG state anywhere in the library.
class Rng {
 public:
  static constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ull;

  explicit Rng(uint64_t seed) { reseed(seed, 0); }
  Rng(uint64_t seed, uint64_t stream_id) { reseed(seed, stream_id); }

  static Rng stream(uint64_t seed, uint64_t stream_id) { return Rng(seed, stream_id); }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform in [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
    return -std::log1p(-uniform01()) / rate;
  }

  // standard normal, Box-Muller with a cached spare
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = uniform01();
    while (u <= 0.0) u = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double a = 2.0 * M_PI * uniform01();
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // uniform integer in [0, n)
  uint64_t below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("below: n must be > 0");
    const uint64_t bound = UINT64_MAX - UINT64_MAX % n;
    uint64_t x = next_u64();
    while (x >= bound) x = next_u64();
    return x % n;
  }

  // index sampled proportionally to weights (all > 0, total = their sum)
  size_t categorical(std::span<const double> weights, double total) {
    double u = uniform01() * total;
    for (size_t i = 0; i + 1 < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

 private:
  void reseed(uint64_t seed, uint64_t stream_id) {
    uint64_t x = seed ^ (kGolden * (stream_id + 1));
    for (auto& s : s_) s = splitmix(x);
    has_spare_ = false;
    spare_ = 0.0;
  }

  static uint64_t splitmix(uint64_t& x) {
    uint64_t z = (x += kGolden);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// 0^theta = 0 for every theta; v^0 = 1 only for v != 0.
inline double pow_zero_convention(double v, double theta) {
  if (v == 0.0) return 0.0;
  if (theta == 0.0) return 1.0;
  return std::pow(v, theta);
}

}  // namespace essf
