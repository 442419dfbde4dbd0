#ifndef LARINF_RNG_HPP
#define LARINF_RNG_HPP

#include <cstdint>
#include <cmath>

namespace larinf {

// Counter-based SplitMix64. Streams are decorrelated by folding the stream id
// into the initial state, so replicate k of a simulation can draw from stream k
// independently of scheduling order. The generator identity is fixed (documented
// here) so that alternate implementations can reproduce runs bit-exactly.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream)
      : state_(splitmix64_mix(master_seed + 0x9E3779B97F4A7C15ull * (stream + 1)) ^
               0x5851F42D4C957F2Dull) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return splitmix64_mix(state_);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (std::normal_distribution is
  // implementation-defined, which would break bit-exact reproducibility).
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double s = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(s);
    have_spare_ = true;
    return r * std::cos(s);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Derives a child seed, e.g. one QMC seed per (replicate, test) pair.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return splitmix64_mix(master_seed ^ splitmix64_mix(a + 0xA24BAED4963EE407ull) ^
                        splitmix64_mix(b + 0x9FB21C651E98DF25ull));
}

}  // namespace larinf

#endif
