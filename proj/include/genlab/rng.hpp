#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace genlab {

// Counter-based generator built on the splitmix64 finalizer.  Output i of a
// stream with key k is mix64(k + i * GAMMA), so draws are a pure function of
// (key, counter) and independent of evaluation order.
inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Stream derivation: hash(seed, label) / hash(seed, index).
inline std::uint64_t derive_stream(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix64(seed ^ mix64(h));
}

inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index * kGamma + 0x5851f42d4c957f2dULL));
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t key() const { return key_; }

  std::uint64_t bits() { return mix64(key_ + (++counter_) * kGamma); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log argument.
  double uniform_pos() {
    return static_cast<double>((bits() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return bits() % n; }

  std::size_t index(std::size_t lo, std::size_t hi_inclusive) {
    return lo + static_cast<std::size_t>(below(hi_inclusive - lo + 1));
  }

  // Box-Muller; consumes two draws, caches the second output.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace genlab
