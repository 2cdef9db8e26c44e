#pragma once

// Seeded generators for property-style tests.

#include <array>
#include <cstddef>
#include <numbers>
#include <random>

#include "chsh/tensor_algebra.hpp"

namespace chsh::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double real(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  double angle() { return real(-std::numbers::pi, std::numbers::pi); }

  Complex complex() { return {real(), real()}; }

  SquareComplexMatrix matrix(std::size_t dim) {
    std::array<Complex, 16> e{};
    for (std::size_t i = 0; i < dim * dim; ++i) e[i] = complex();
    return SquareComplexMatrix(dim, std::span<const Complex>(e.data(), dim * dim));
  }

  SquareComplexMatrix hermitian(std::size_t dim) {
    const auto m = matrix(dim);
    return scale(m + adjoint(m), 0.5);
  }

  /// Random density matrix on C^2: positive, unit trace.
  SquareComplexMatrix density2() {
    const auto m = matrix(2);
    const auto pos = adjoint(m) * m;
    return scale(pos, 1.0 / trace(pos).real());
  }

 private:
  std::mt19937_64 engine_;
};

/// Reference partial traces written directly from index sums.
inline SquareComplexMatrix reference_trace_out_B(const SquareComplexMatrix& m) {
  std::array<Complex, 4> e{};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      e[2 * i + k] = m(2 * i + 0, 2 * k + 0) + m(2 * i + 1, 2 * k + 1);
    }
  }
  return SquareComplexMatrix(2, std::span<const Complex>(e));
}

inline SquareComplexMatrix reference_trace_out_A(const SquareComplexMatrix& m) {
  std::array<Complex, 4> e{};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      e[2 * i + k] = m(0 + i, 0 + k) + m(2 + i, 2 + k);
    }
  }
  return SquareComplexMatrix(2, std::span<const Complex>(e));
}

}  // namespace chsh::testing
