#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace slb {

/// Deterministic random stream. The generator is a fixed algorithm
/// (std::mt19937_64, seeded directly) with explicit uniform/normal
/// transforms, so an identical seed yields an identical stream on every
/// platform. Child streams are derived from the original seed and a salt
/// counter, never from the current stream position.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the spare draw is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mu, double sd) { return mu + sd * normal(); }

  /// Student-t with `dof` degrees of freedom: Z / sqrt(V/dof) where V is a
  /// sum of dof squared standard normals.
  double student_t(int dof) {
    const double z = normal();
    double v = 0.0;
    for (int k = 0; k < dof; ++k) {
      const double g = normal();
      v += g * g;
    }
    return z / std::sqrt(v / static_cast<double>(dof));
  }

  /// Uniform index in [0, n). Plain modulo; the bias is ~n * 2^-64.
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Independent child stream addressed by a salt counter. Derivation uses
  /// the original seed only, so derive(k) is the same no matter how much of
  /// this stream was consumed.
  Rng derive(std::uint64_t salt) const { return Rng(mix(seed_, salt)); }

  Rng derive(std::uint64_t a, std::uint64_t b) const {
    return Rng(mix(mix(seed_, a), b));
  }

  /// SplitMix64 finalizer over seed ^ golden-ratio-scaled salt.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed ^ (salt * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL);
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace slb
