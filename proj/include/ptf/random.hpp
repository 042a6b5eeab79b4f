#pragma once

// Counter-based generator for reproducible instance streams.
//
// Every value is a pure function of (seed, k, stream, j):
//
//   mix64(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//              z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//              z ^ (z >> 31)                         (SplitMix64 finalizer)
//   absorb(h, v) = mix64(h ^ (v + G)),  G = 0x9E3779B97F4A7C15
//   key        = absorb(absorb(absorb(0, seed), k), stream)
//   word(j)    = mix64(key + (j + 1) * G)            (mod 2^64)
//   u01(j)     = ((word(j) >> 11) + 0.5) * 2^-53     in (0, 1)
//   um11(j)    = 2 u01(j) - 1                         in (-1, 1)

#include <cstdint>

namespace ptf {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t absorb(std::uint64_t h, std::uint64_t v) { return mix64(h ^ (v + kGolden)); }

/// One independent stream keyed by (seed, k, stream).
class CounterStream {
 public:
  constexpr CounterStream(std::uint64_t seed, std::uint64_t k, std::uint64_t stream)
      : key_(absorb(absorb(absorb(0, seed), k), stream)) {}

  constexpr std::uint64_t key() const { return key_; }
  constexpr std::uint64_t word(std::uint64_t j) const { return mix64(key_ + (j + 1) * kGolden); }

  /// Uniform on (0, 1) from the 53 high bits, centred in its cell.
  constexpr double u01(std::uint64_t j) const {
    return (static_cast<double>(word(j) >> 11) + 0.5) * 0x1.0p-53;
  }
  constexpr double um11(std::uint64_t j) const { return 2.0 * u01(j) - 1.0; }

 private:
  std::uint64_t key_;
};

/// Stream ids used by the instance generator.
enum class GenStream : std::uint64_t { x_hat = 0, s_hat = 1, matrix = 2 };

}  // namespace ptf
