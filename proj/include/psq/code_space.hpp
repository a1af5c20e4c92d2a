#pragma once

// The qudit code space spanned by the computational basis
//   |j> = |s_j^p> (x) prod_{i != j} |s_i>,
// i.e. the multimode squeezed vacuum with one photon removed from mode j.
// Mode j carries only odd photon numbers and every other mode only even
// ones, so the basis is orthonormal by parity.
//
// Two evaluation routes are provided. The full-tensor route materializes
// FockVector / FockDensity objects. The mode-local route (CodeState) keeps
// the M x M code-space density and the single-mode factors, and evaluates
// reduced densities and projector expectations as products of single-mode
// quantities; it scales to any number of modes.

#include <optional>
#include <vector>

#include "psq/fock.hpp"
#include "psq/subtraction.hpp"

namespace psq {

/// 1-based computational-basis label.
class BasisLabel {
 public:
  explicit BasisLabel(int j) : j_(j) {
    if (j < 1) throw InvalidInputError("basis label must be >= 1, got " + std::to_string(j));
  }
  int value() const noexcept { return j_; }
  std::size_t mode() const noexcept { return static_cast<std::size_t>(j_ - 1); }
  friend bool operator==(BasisLabel, BasisLabel) = default;

 private:
  int j_;
};

/// Normalized single-mode factors of the computational basis on each mode.
class CodeBasis {
 public:
  explicit CodeBasis(ModeSpec spec);

  const ModeSpec& spec() const noexcept { return spec_; }
  std::size_t num_modes() const noexcept { return spec_.num_modes(); }
  /// Truncated, renormalized |s_m>.
  const CVector& squeezed(std::size_t mode) const { return squeezed_.at(mode); }
  /// Renormalized sigma_m |s_m>; the |1> limit when s_m = 0.
  const CVector& subtracted(std::size_t mode) const { return subtracted_.at(mode); }
  /// Factor of |j> on `mode`.
  const CVector& factor(std::size_t j_mode, std::size_t mode) const {
    return j_mode == mode ? subtracted(mode) : squeezed(mode);
  }
  bool subtractable(std::size_t mode) const { return spec_.squeezing.at(mode) != 0.0; }

 private:
  ModeSpec spec_;
  std::vector<CVector> squeezed_;
  std::vector<CVector> subtracted_;
};

/// Outcome of the J measurement: a basis label, or LEAK for weight outside
/// the code space.
struct MeasurementOutcome {
  std::optional<BasisLabel> label;
  double probability = 0.0;
  bool is_leak() const noexcept { return !label.has_value(); }
};

/// Code-space density chi (in the |j> basis) together with its single-mode
/// factors. Pure encoded states have chi = gamma gamma^dagger.
class CodeState {
 public:
  CodeState(CMatrix chi, ModeSpec spec);
  static CodeState pure(const QuditAmplitudes& gamma, ModeSpec spec);

  const CMatrix& chi() const noexcept { return chi_; }
  const CodeBasis& basis() const noexcept { return basis_; }
  const ModeSpec& spec() const noexcept { return basis_.spec(); }
  const std::optional<CVector>& amplitudes() const noexcept { return gamma_; }

  /// Reduced single-mode density of `mode`, from single-mode overlaps only.
  FockDensity reduced_density(std::size_t mode) const;
  /// J outcome distribution from single-mode parity projections.
  std::vector<MeasurementOutcome> measure_J() const;
  /// Expectation of the modified parity (odd-photon projector) on `mode`.
  double modified_parity(std::size_t mode) const;

  /// Full-tensor materialization (subject to the amplitude guard).
  FockVector to_fock_vector() const;  ///< pure states only
  FockDensity to_fock_density() const;

 private:
  CMatrix chi_;
  std::optional<CVector> gamma_;
  CodeBasis basis_;

  // prod_t <f_b^t| P_t |f_a^t>, P_t chosen per mode by `odd_mask` (1 = odd
  // projector, 0 = even projector, -1 = identity).
  Complex factor_product(std::size_t a, std::size_t b, const std::vector<int>& mask) const;
};

/// Normalized |j>. Throws InfeasibleError when s_j = 0.
FockVector basis_state(BasisLabel j, const ModeSpec& spec);

/// sum_j gamma_j |j> on the full Fock space.
FockVector encode(const QuditAmplitudes& gamma, const ModeSpec& spec);

/// <Pi~_j>: odd-photon population of mode j.
double modified_parity_expectation(const FockVector& state, std::size_t mode);
double modified_parity_expectation(const FockDensity& state, std::size_t mode);
/// <Pi_j> = 1 - 2 <Pi~_j>.
double parity_expectation(const FockVector& state, std::size_t mode);
double parity_expectation(const FockDensity& state, std::size_t mode);

/// Pr(J = j) is the weight on photon-number patterns where mode j is odd and
/// every other mode is even; LEAK collects the rest. On the code space this
/// coincides with Tr(Pi~_j rho).
std::vector<MeasurementOutcome> measure_J(const FockVector& state);
std::vector<MeasurementOutcome> measure_J(const FockDensity& state);

/// <psi|rho|psi>.
double fidelity_pure_mixed(const FockVector& psi, const FockDensity& rho);

/// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2 by Hermitian
/// eigendecomposition. Throws InvalidInputError for non-PSD input.
double uhlmann_fidelity(const CMatrix& a, const CMatrix& b);
double uhlmann_fidelity(const FockDensity& a, const FockDensity& b);
/// Tr sqrt(sqrt(a) b sqrt(a)) without squaring; adds over orthogonal blocks.
double uhlmann_root(const CMatrix& a, const CMatrix& b);

}  // namespace psq
