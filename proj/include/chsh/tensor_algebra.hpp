#pragma once

// Dense complex linear algebra on C^2 and C^2 (x) C^2.
//
// Composite index convention: basis vector |i_A>|i_B> sits at 2*i_A + i_B.
// All values are immutable; every operation returns a fresh value.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>

#include "chsh/errors.hpp"

namespace chsh {

using Complex = std::complex<double>;

/// Absolute entrywise tolerance for algebraic identity checks.
inline constexpr double kTolerance = 1e-12;

namespace detail {

inline bool is_finite(const Complex& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline void require_dim(std::size_t dim, const char* what) {
  if (dim != 2 && dim != 4) {
    throw InputError(std::string(what) + ": dimension must be 2 or 4, got " +
                     std::to_string(dim));
  }
}

inline void require_finite_angle(double gamma, const char* what) {
  if (!std::isfinite(gamma)) {
    throw InputError(std::string(what) + ": angle must be finite");
  }
}

}  // namespace detail

/// Square complex matrix of dimension 2 or 4, row-major.
class SquareComplexMatrix {
 public:
  static constexpr std::size_t kMaxDim = 4;

  /// Zero matrix.
  explicit SquareComplexMatrix(std::size_t dim) : dim_(dim) {
    detail::require_dim(dim, "SquareComplexMatrix");
  }

  /// Row-major entries; `entries.size()` must equal dim*dim.
  SquareComplexMatrix(std::size_t dim, std::span<const Complex> entries)
      : dim_(dim) {
    detail::require_dim(dim, "SquareComplexMatrix");
    if (entries.size() != dim * dim) {
      throw InputError("SquareComplexMatrix: expected " +
                       std::to_string(dim * dim) + " entries, got " +
                       std::to_string(entries.size()));
    }
    for (std::size_t k = 0; k < entries.size(); ++k) {
      if (!detail::is_finite(entries[k])) {
        throw InputError("SquareComplexMatrix: non-finite entry");
      }
      data_[k] = entries[k];
    }
  }

  SquareComplexMatrix(std::size_t dim, std::initializer_list<Complex> entries)
      : SquareComplexMatrix(dim, std::span<const Complex>(entries.begin(),
                                                          entries.size())) {}

  static SquareComplexMatrix identity(std::size_t dim) {
    SquareComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m.data_[i * dim + i] = 1.0;
    return m;
  }

  static SquareComplexMatrix diagonal(std::span<const Complex> diag) {
    SquareComplexMatrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) {
      if (!detail::is_finite(diag[i])) {
        throw InputError("SquareComplexMatrix: non-finite entry");
      }
      m.data_[i * m.dim_ + i] = diag[i];
    }
    return m;
  }

  static SquareComplexMatrix diagonal(std::initializer_list<Complex> diag) {
    return diagonal(std::span<const Complex>(diag.begin(), diag.size()));
  }

  std::size_t dim() const noexcept { return dim_; }

  Complex operator()(std::size_t row, std::size_t col) const {
    return data_[row * dim_ + col];
  }

  std::span<const Complex> entries() const noexcept {
    return {data_.data(), dim_ * dim_};
  }

 private:
  // Operations below build results in place before handing them out.
  friend SquareComplexMatrix matmul(const SquareComplexMatrix&,
                                    const SquareComplexMatrix&);
  friend SquareComplexMatrix adjoint(const SquareComplexMatrix&);
  friend SquareComplexMatrix add(const SquareComplexMatrix&,
                                 const SquareComplexMatrix&);
  friend SquareComplexMatrix scale(const SquareComplexMatrix&, Complex);
  friend SquareComplexMatrix tensor_product(const SquareComplexMatrix&,
                                            const SquareComplexMatrix&);
  friend SquareComplexMatrix partial_trace_B(const SquareComplexMatrix&,
                                             const SquareComplexMatrix&);
  friend SquareComplexMatrix partial_trace_A(const SquareComplexMatrix&,
                                             const SquareComplexMatrix&);

  Complex& at(std::size_t row, std::size_t col) {
    return data_[row * dim_ + col];
  }

  std::size_t dim_;
  std::array<Complex, kMaxDim * kMaxDim> data_{};
};

/// Unit vector in C^2 or C^2 (x) C^2.
class StateVector {
 public:
  explicit StateVector(std::span<const Complex> amplitudes)
      : dim_(amplitudes.size()) {
    detail::require_dim(dim_, "StateVector");
    double norm2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      if (!detail::is_finite(amplitudes[i])) {
        throw InputError("StateVector: non-finite amplitude");
      }
      amps_[i] = amplitudes[i];
      norm2 += std::norm(amplitudes[i]);
    }
    if (std::abs(std::sqrt(norm2) - 1.0) > kTolerance) {
      throw InputError("StateVector: amplitudes must have unit norm");
    }
  }

  StateVector(std::initializer_list<Complex> amplitudes)
      : StateVector(std::span<const Complex>(amplitudes.begin(),
                                             amplitudes.size())) {}

  std::size_t dim() const noexcept { return dim_; }
  Complex operator[](std::size_t i) const { return amps_[i]; }
  std::span<const Complex> amplitudes() const noexcept {
    return {amps_.data(), dim_};
  }

  double norm() const {
    double norm2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) norm2 += std::norm(amps_[i]);
    return std::sqrt(norm2);
  }

 private:
  std::size_t dim_;
  std::array<Complex, SquareComplexMatrix::kMaxDim> amps_{};
};

namespace detail {

inline void require_same_dim(const SquareComplexMatrix& a,
                             const SquareComplexMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw InputError(std::string(what) + ": dimension mismatch (" +
                     std::to_string(a.dim()) + " vs " +
                     std::to_string(b.dim()) + ")");
  }
}

inline void require_exact_dim(const SquareComplexMatrix& m, std::size_t dim,
                              const char* what) {
  if (m.dim() != dim) {
    throw InputError(std::string(what) + ": expected dimension " +
                     std::to_string(dim) + ", got " + std::to_string(m.dim()));
  }
}

}  // namespace detail

inline SquareComplexMatrix matmul(const SquareComplexMatrix& a,
                                  const SquareComplexMatrix& b) {
  detail::require_same_dim(a, b, "matmul");
  const std::size_t n = a.dim();
  SquareComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += a(i, k) * b(k, j);
      out.at(i, j) = acc;
    }
  }
  return out;
}

/// Conjugate transpose.
inline SquareComplexMatrix adjoint(const SquareComplexMatrix& m) {
  const std::size_t n = m.dim();
  SquareComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.at(i, j) = std::conj(m(j, i));
  }
  return out;
}

inline SquareComplexMatrix add(const SquareComplexMatrix& a,
                               const SquareComplexMatrix& b) {
  detail::require_same_dim(a, b, "add");
  SquareComplexMatrix out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < a.dim(); ++j) out.at(i, j) = a(i, j) + b(i, j);
  }
  return out;
}

inline SquareComplexMatrix scale(const SquareComplexMatrix& m, Complex factor) {
  if (!detail::is_finite(factor)) {
    throw InputError("scale: non-finite factor");
  }
  SquareComplexMatrix out(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) out.at(i, j) = factor * m(i, j);
  }
  return out;
}

inline Complex trace(const SquareComplexMatrix& m) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i) acc += m(i, i);
  return acc;
}

inline SquareComplexMatrix operator*(const SquareComplexMatrix& a,
                                     const SquareComplexMatrix& b) {
  return matmul(a, b);
}

inline SquareComplexMatrix operator+(const SquareComplexMatrix& a,
                                     const SquareComplexMatrix& b) {
  return add(a, b);
}

/// Largest entrywise modulus of a - b.
inline double max_abs_diff(const SquareComplexMatrix& a,
                           const SquareComplexMatrix& b) {
  detail::require_same_dim(a, b, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < a.dim(); ++j) {
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
    }
  }
  return worst;
}

inline bool approx_equal(const SquareComplexMatrix& a,
                         const SquareComplexMatrix& b,
                         double tol = kTolerance) {
  return a.dim() == b.dim() && max_abs_diff(a, b) <= tol;
}

/// Raw matrix-vector product; the result is not required to be normalized.
inline std::array<Complex, SquareComplexMatrix::kMaxDim> apply(
    const SquareComplexMatrix& m, std::span<const Complex> v) {
  if (m.dim() != v.size()) {
    throw InputError("apply: dimension mismatch");
  }
  std::array<Complex, SquareComplexMatrix::kMaxDim> out{};
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t k = 0; k < m.dim(); ++k) out[i] += m(i, k) * v[k];
  }
  return out;
}

/// <M psi, psi> = sum_i conj(psi_i) (M psi)_i.
inline Complex expectation(const SquareComplexMatrix& m,
                           const StateVector& psi) {
  if (m.dim() != psi.dim()) {
    throw InputError("expectation: dimension mismatch (" +
                     std::to_string(m.dim()) + " vs " +
                     std::to_string(psi.dim()) + ")");
  }
  Complex acc = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i) {
    Complex row = 0.0;
    for (std::size_t k = 0; k < m.dim(); ++k) row += m(i, k) * psi[k];
    acc += std::conj(psi[i]) * row;
  }
  return acc;
}

/// [[cos g, -sin g], [sin g, cos g]].
inline SquareComplexMatrix rotation(double gamma) {
  detail::require_finite_angle(gamma, "rotation");
  const double c = std::cos(gamma);
  const double s = std::sin(gamma);
  return SquareComplexMatrix(2, {c, -s, s, c});
}

/// Spectral projector of sigma_3 for eigenvalue p.
inline SquareComplexMatrix pauli3_projector(int p) {
  if (p == 1) return SquareComplexMatrix::diagonal({1.0, 0.0});
  if (p == -1) return SquareComplexMatrix::diagonal({0.0, 1.0});
  throw InputError("pauli3_projector: outcome must be -1 or +1, got " +
                   std::to_string(p));
}

/// Kronecker product of two 2x2 matrices; (i_A, i_B) maps to 2*i_A + i_B.
inline SquareComplexMatrix tensor_product(const SquareComplexMatrix& a,
                                          const SquareComplexMatrix& b) {
  detail::require_exact_dim(a, 2, "tensor_product");
  detail::require_exact_dim(b, 2, "tensor_product");
  SquareComplexMatrix out(4);
  for (std::size_t ia = 0; ia < 2; ++ia) {
    for (std::size_t ja = 0; ja < 2; ++ja) {
      for (std::size_t ib = 0; ib < 2; ++ib) {
        for (std::size_t jb = 0; jb < 2; ++jb) {
          out.at(2 * ia + ib, 2 * ja + jb) = a(ia, ja) * b(ib, jb);
        }
      }
    }
  }
  return out;
}

/// sum_j (I (x) <f_j|) M (I (x) |f_j>), where f_j is column j of `basis`.
///
/// `basis` must be unitary; its columns form the orthonormal basis of the
/// traced-out factor.
inline SquareComplexMatrix partial_trace_B(const SquareComplexMatrix& m,
                                           const SquareComplexMatrix& basis) {
  detail::require_exact_dim(m, 4, "partial_trace_B");
  detail::require_exact_dim(basis, 2, "partial_trace_B basis");
  if (!approx_equal(matmul(adjoint(basis), basis),
                    SquareComplexMatrix::identity(2))) {
    throw InputError("partial_trace_B: basis is not orthonormal");
  }
  SquareComplexMatrix out(2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      Complex acc = 0.0;
      for (std::size_t j = 0; j < 2; ++j) {
        // <i, f_j| M |k, f_j> expanded in the standard basis of B.
        for (std::size_t r = 0; r < 2; ++r) {
          for (std::size_t c = 0; c < 2; ++c) {
            acc += std::conj(basis(r, j)) * m(2 * i + r, 2 * k + c) *
                   basis(c, j);
          }
        }
      }
      out.at(i, k) = acc;
    }
  }
  return out;
}

inline SquareComplexMatrix partial_trace_B(const SquareComplexMatrix& m) {
  return partial_trace_B(m, SquareComplexMatrix::identity(2));
}

/// Mirror of partial_trace_B: traces out the first factor.
inline SquareComplexMatrix partial_trace_A(const SquareComplexMatrix& m,
                                           const SquareComplexMatrix& basis) {
  detail::require_exact_dim(m, 4, "partial_trace_A");
  detail::require_exact_dim(basis, 2, "partial_trace_A basis");
  if (!approx_equal(matmul(adjoint(basis), basis),
                    SquareComplexMatrix::identity(2))) {
    throw InputError("partial_trace_A: basis is not orthonormal");
  }
  SquareComplexMatrix out(2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      Complex acc = 0.0;
      for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t r = 0; r < 2; ++r) {
          for (std::size_t c = 0; c < 2; ++c) {
            acc += std::conj(basis(r, j)) * m(2 * r + i, 2 * c + k) *
                   basis(c, j);
          }
        }
      }
      out.at(i, k) = acc;
    }
  }
  return out;
}

inline SquareComplexMatrix partial_trace_A(const SquareComplexMatrix& m) {
  return partial_trace_A(m, SquareComplexMatrix::identity(2));
}

inline bool is_hermitian(const SquareComplexMatrix& m,
                         double tol = kTolerance) {
  return approx_equal(m, adjoint(m), tol);
}

inline bool is_unitary(const SquareComplexMatrix& m, double tol = kTolerance) {
  return approx_equal(matmul(adjoint(m), m),
                      SquareComplexMatrix::identity(m.dim()), tol);
}

}  // namespace chsh
