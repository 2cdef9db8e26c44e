#pragma once

// Projection-valued measures for the two-photon polarisation experiment.
//
// Outcome order is fixed everywhere, including serialized output:
//   joint: (+1,+1), (+1,-1), (-1,+1), (-1,-1)
//   local: +1, -1

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "chsh/errors.hpp"
#include "chsh/tensor_algebra.hpp"

namespace chsh {

/// Pair of outcomes (p, q) in {-1,+1}^2.
struct JointOutcome {
  int p;
  int q;

  friend bool operator==(const JointOutcome&, const JointOutcome&) = default;
};

inline constexpr std::array<JointOutcome, 4> kJointOutcomes{
    {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
inline constexpr std::array<int, 2> kLocalOutcomes{1, -1};

inline void require_outcome(int p, const char* what) {
  if (p != 1 && p != -1) {
    throw InputError(std::string(what) + ": outcome must be -1 or +1, got " +
                     std::to_string(p));
  }
}

/// Position of (p, q) in kJointOutcomes.
inline std::size_t joint_index(int p, int q) {
  require_outcome(p, "joint_index");
  require_outcome(q, "joint_index");
  return 2 * static_cast<std::size_t>(p == -1) +
         static_cast<std::size_t>(q == -1);
}

/// Position of p in kLocalOutcomes.
inline std::size_t local_index(int p) {
  require_outcome(p, "local_index");
  return static_cast<std::size_t>(p == -1);
}

/// Polariser configuration (a, b) in radians.
struct SettingPair {
  double a;
  double b;

  friend bool operator==(const SettingPair&, const SettingPair&) = default;
};

/// Probabilities over kJointOutcomes.
using OutcomeDistribution = std::array<double, 4>;
/// Probabilities over kLocalOutcomes.
using LocalDistribution = std::array<double, 2>;

/// Deviations of a PVM from the four defining properties.
struct PvmDefects {
  double hermitian = 0.0;
  double idempotent = 0.0;
  double orthogonal = 0.0;
  double complete = 0.0;

  double worst() const {
    return std::max({hermitian, idempotent, orthogonal, complete});
  }
  bool ok(double tol = kTolerance) const { return worst() <= tol; }
};

/// Finite outcome set mapped to projectors of a common dimension.
///
/// Construction checks only shape; `defects()` measures the projector
/// properties so that broken measures can still be represented and reported.
template <class Outcome>
class Pvm {
 public:
  Pvm(std::vector<Outcome> outcomes, std::vector<SquareComplexMatrix> projectors)
      : outcomes_(std::move(outcomes)), projectors_(std::move(projectors)) {
    if (outcomes_.empty() || outcomes_.size() != projectors_.size()) {
      throw InputError("Pvm: need one projector per outcome");
    }
    for (const auto& proj : projectors_) {
      if (proj.dim() != projectors_.front().dim()) {
        throw InputError("Pvm: projectors differ in dimension");
      }
    }
  }

  std::size_t dim() const { return projectors_.front().dim(); }
  std::size_t size() const { return outcomes_.size(); }
  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  const std::vector<SquareComplexMatrix>& projectors() const {
    return projectors_;
  }

  const SquareComplexMatrix& projector(const Outcome& o) const {
    for (std::size_t i = 0; i < outcomes_.size(); ++i) {
      if (outcomes_[i] == o) return projectors_[i];
    }
    throw InputError("Pvm: unknown outcome");
  }

  PvmDefects defects() const {
    PvmDefects d;
    SquareComplexMatrix sum(dim());
    for (std::size_t i = 0; i < projectors_.size(); ++i) {
      const auto& p = projectors_[i];
      d.hermitian = std::max(d.hermitian, max_abs_diff(p, adjoint(p)));
      d.idempotent = std::max(d.idempotent, max_abs_diff(p * p, p));
      for (std::size_t j = i + 1; j < projectors_.size(); ++j) {
        d.orthogonal = std::max(
            d.orthogonal,
            max_abs_diff(p * projectors_[j], SquareComplexMatrix(dim())));
      }
      sum = sum + p;
    }
    d.complete = max_abs_diff(sum, SquareComplexMatrix::identity(dim()));
    return d;
  }

  /// Copy with the projector for `o` replaced.
  Pvm with_projector(const Outcome& o, SquareComplexMatrix replacement) const {
    auto projs = projectors_;
    for (std::size_t i = 0; i < outcomes_.size(); ++i) {
      if (outcomes_[i] == o) {
        projs[i] = std::move(replacement);
        return Pvm(outcomes_, std::move(projs));
      }
    }
    throw InputError("Pvm: unknown outcome");
  }

 private:
  std::vector<Outcome> outcomes_;
  std::vector<SquareComplexMatrix> projectors_;
};

using JointPvm = Pvm<JointOutcome>;
using LocalPvm = Pvm<int>;

/// (|00> + |11>) / sqrt(2).
inline StateVector bell_state() {
  const double h = 1.0 / std::sqrt(2.0);
  return StateVector{h, 0.0, 0.0, h};
}

/// R_gamma^* P_3({p}) R_gamma.
inline SquareComplexMatrix rotated_projector(double gamma, int p) {
  const auto r = rotation(gamma);
  return adjoint(r) * pauli3_projector(p) * r;
}

inline JointPvm joint_pvm(SettingPair s) {
  std::vector<JointOutcome> outcomes(kJointOutcomes.begin(),
                                     kJointOutcomes.end());
  std::vector<SquareComplexMatrix> projs;
  projs.reserve(4);
  for (const auto& o : outcomes) {
    projs.push_back(tensor_product(rotated_projector(s.a, o.p),
                                   rotated_projector(s.b, o.q)));
  }
  return JointPvm(std::move(outcomes), std::move(projs));
}

/// Alice's measurement R_a^* P_3 R_a (x) I.
inline LocalPvm local_pvm_A(double a) {
  const auto id = SquareComplexMatrix::identity(2);
  std::vector<SquareComplexMatrix> projs;
  for (int p : kLocalOutcomes) {
    projs.push_back(tensor_product(rotated_projector(a, p), id));
  }
  return LocalPvm({kLocalOutcomes.begin(), kLocalOutcomes.end()},
                  std::move(projs));
}

/// Bob's measurement I (x) R_b^* P_3 R_b.
inline LocalPvm local_pvm_B(double b) {
  const auto id = SquareComplexMatrix::identity(2);
  std::vector<SquareComplexMatrix> projs;
  for (int q : kLocalOutcomes) {
    projs.push_back(tensor_product(id, rotated_projector(b, q)));
  }
  return LocalPvm({kLocalOutcomes.begin(), kLocalOutcomes.end()},
                  std::move(projs));
}

/// <P(o) psi, psi> for every outcome, in PVM order.
///
/// Throws NumericError when an expectation has imaginary part above
/// kTolerance; that can only come from a non-Hermitian projector.
template <class Outcome>
std::vector<double> born_probabilities(const Pvm<Outcome>& pvm,
                                       const StateVector& psi) {
  if (pvm.dim() != psi.dim()) {
    throw InputError("born_probabilities: PVM dimension " +
                     std::to_string(pvm.dim()) + " does not match state " +
                     std::to_string(psi.dim()));
  }
  std::vector<double> probs;
  probs.reserve(pvm.size());
  for (const auto& proj : pvm.projectors()) {
    const Complex z = expectation(proj, psi);
    if (std::abs(z.imag()) > kTolerance) {
      throw NumericError("born_probabilities: imaginary residue " +
                         std::to_string(z.imag()));
    }
    probs.push_back(z.real());
  }
  return probs;
}

inline OutcomeDistribution born_distribution(const JointPvm& pvm,
                                             const StateVector& psi) {
  if (pvm.size() != 4) throw InputError("born_distribution: expected 4 outcomes");
  const auto probs = born_probabilities(pvm, psi);
  OutcomeDistribution out{};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& o = pvm.outcomes()[i];
    out[joint_index(o.p, o.q)] = probs[i];
  }
  return out;
}

inline LocalDistribution born_distribution(const LocalPvm& pvm,
                                           const StateVector& psi) {
  if (pvm.size() != 2) throw InputError("born_distribution: expected 2 outcomes");
  const auto probs = born_probabilities(pvm, psi);
  LocalDistribution out{};
  for (std::size_t i = 0; i < 2; ++i) {
    out[local_index(pvm.outcomes()[i])] = probs[i];
  }
  return out;
}

/// n(p,q) = cos^2(a-b)/2 if p == q, sin^2(a-b)/2 otherwise.
inline OutcomeDistribution closed_form_distribution(SettingPair s) {
  detail::require_finite_angle(s.a, "closed_form_distribution");
  detail::require_finite_angle(s.b, "closed_form_distribution");
  const double c = std::cos(s.a - s.b);
  const double sn = std::sin(s.a - s.b);
  const double same = 0.5 * c * c;
  const double diff = 0.5 * sn * sn;
  return {same, diff, diff, same};
}

/// Sum over (p,q) of p*q*n(p,q).
inline double correlator(const OutcomeDistribution& n) {
  double e = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    e += kJointOutcomes[i].p * kJointOutcomes[i].q * n[i];
  }
  return e;
}

/// Joint probabilities summed over Bob's outcome.
inline LocalDistribution marginal_over_q(const OutcomeDistribution& n) {
  return {n[0] + n[1], n[2] + n[3]};
}

/// Joint probabilities summed over Alice's outcome.
inline LocalDistribution marginal_over_p(const OutcomeDistribution& n) {
  return {n[0] + n[2], n[1] + n[3]};
}

struct PartialTraceDeviation {
  double side_a = 0.0;  // worst entry of (1/2) tr_B[P(p x {+-1})] - R_a^* P_3(p) R_a
  double side_b = 0.0;  // worst entry of (1/2) tr_A[P({+-1} x q)] - R_b^* P_3(q) R_b

  double worst() const { return std::max(side_a, side_b); }
};

/// Normalised partial traces of the marginalized joint PVM against the local
/// factors. The normalisation is 1/dim(C^2).
inline PartialTraceDeviation verify_partial_trace_theorem(SettingPair s) {
  const auto joint = joint_pvm(s);
  const double norm = 1.0 / 2.0;
  PartialTraceDeviation dev;
  for (int p : kLocalOutcomes) {
    const auto summed = joint.projector({p, 1}) + joint.projector({p, -1});
    const auto reduced = scale(partial_trace_B(summed), norm);
    dev.side_a =
        std::max(dev.side_a, max_abs_diff(reduced, rotated_projector(s.a, p)));
  }
  for (int q : kLocalOutcomes) {
    const auto summed = joint.projector({1, q}) + joint.projector({-1, q});
    const auto reduced = scale(partial_trace_A(summed), norm);
    dev.side_b =
        std::max(dev.side_b, max_abs_diff(reduced, rotated_projector(s.b, q)));
  }
  return dev;
}

}  // namespace chsh
