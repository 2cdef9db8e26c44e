#pragma once

// Seeded random streams.
//
// Generator: std::mt19937_64, whose output sequence is fixed by the C++
// standard. Stream `id` under master seed `s` is seeded with
// std::seed_seq{lo32(s), hi32(s), lo32(id), hi32(id)}; seed_seq is also fully
// specified, so streams are bit-reproducible across platforms. Doubles are
// built from the top 53 bits, avoiding the implementation-defined
// std::uniform_real_distribution.

#include <cstdint>
#include <random>

namespace chsh {

/// Sub-stream identifiers. Each consumer owns a distinct range.
enum class StreamDomain : std::uint64_t {
  kExperiment = 0x0100000000ull,
  kLhvProbe = 0x0200000000ull,
  kVerify = 0x0300000000ull,
};

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
  }

  RandomStream(std::uint64_t seed, StreamDomain domain, std::uint64_t index = 0)
      : RandomStream(seed, static_cast<std::uint64_t>(domain) + index) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n), n >= 1. Lemire-style rejection keeps it exact.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = -n % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x < limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace chsh
