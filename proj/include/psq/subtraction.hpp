#pragma once

// Coherent mode-dependent single-photon subtraction.
//
// A gate field with coefficients c selects the subtraction mode
// b = sum_j c_j sigma_j. Acting on the multimode squeezed vacuum |S> it
// heralds sum_j gamma_j |j>, where |j> = N_j sigma_j |S> and
// N_j = 1/sinh|s_j|, so gamma_j is proportional to c_j sinh|s_j|.

#include <span>
#include <utility>

#include <Eigen/SparseCore>

#include "psq/fock.hpp"

namespace psq {

inline constexpr double kNormalizationTol = 1e-12;

/// Complex coefficient vector with unit L2 norm. The tag keeps gate
/// coefficients and qudit amplitudes from being mixed up.
template <class Tag>
class UnitVector {
 public:
  /// Throws InvalidInputError unless |values| = 1 within kNormalizationTol.
  explicit UnitVector(CVector values) : values_(std::move(values)) {
    if (values_.size() == 0) throw InvalidInputError("coefficient vector is empty");
    if (std::abs(values_.squaredNorm() - 1.0) > kNormalizationTol) {
      throw InvalidInputError("coefficient vector is not normalized (sum |v|^2 = " +
                              std::to_string(values_.squaredNorm()) + ")");
    }
  }
  /// Rescales to unit norm; throws ZeroWeightError for the zero vector.
  static UnitVector normalize(const CVector& values) {
    const double n = values.norm();
    if (!(n > 0.0)) throw ZeroWeightError("cannot normalize an all-zero coefficient vector");
    return UnitVector(values / n);
  }

  const CVector& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  Complex operator[](std::size_t j) const { return values_[static_cast<Eigen::Index>(j)]; }

 private:
  CVector values_;
};

struct GateTag {};
struct QuditTag {};
using GateCoefficients = UnitVector<GateTag>;
using QuditAmplitudes = UnitVector<QuditTag>;

/// M x M density-like description of an imperfect subtraction aimed at
/// mode `label` (1-based).
class ChiMatrix {
 public:
  /// Validates hermiticity and positivity. A trace within renorm_tol of 1 is
  /// rescaled to exactly 1; anything further away is rejected.
  ChiMatrix(CMatrix chi, int label, double renorm_tol = 5e-3);
  /// Diagonal-only process (the published tomography tables carry diagonals).
  static ChiMatrix from_diagonal(std::span<const double> diagonal, int label,
                                 double renorm_tol = 5e-3);

  const CMatrix& matrix() const noexcept { return chi_; }
  int label() const noexcept { return label_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(chi_.rows()); }
  /// Trace of the input before renormalization.
  double raw_trace() const noexcept { return raw_trace_; }

 private:
  CMatrix chi_;
  int label_;
  double raw_trace_;
};

using SparseOperator = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

/// b = sum_j c_j sigma_j on the full truncated space.
SparseOperator subtraction_operator(const GateCoefficients& c, const ModeSpec& spec);

/// Multimode squeezed vacuum |S> on the spec's truncated space.
FockVector multimode_squeezed_vacuum(const ModeSpec& spec);

struct SubtractionResult {
  FockVector state;  ///< normalized b|S>
  double weight;     ///< ||b|S>||^2, the relative heralding probability
};

/// Heralded state after one photon is subtracted from mode b. Throws
/// ZeroWeightError when b|S> vanishes.
SubtractionResult subtract_photon(const ModeSpec& spec, const GateCoefficients& c);

/// gamma_j = c_j sinh|s_j| / sqrt(sum_k |c_k|^2 sinh^2 s_k).
QuditAmplitudes gamma_from_c(const GateCoefficients& c, const ModeSpec& spec);

/// Right-inverse of gamma_from_c: c_j proportional to gamma_j / sinh|s_j|.
/// Throws InfeasibleError when gamma_j != 0 on an unsqueezed mode.
GateCoefficients c_from_gamma(const QuditAmplitudes& gamma, const ModeSpec& spec);

/// rho = sum_kl chi_kl |k><l| on the full Fock space.
FockDensity imperfect_state(const ChiMatrix& chi, const ModeSpec& spec);

/// h = (beta, x) / sqrt(|beta|^2 + |x|^2). Throws InvalidInputError for beta = 0.
QuditAmplitudes beta_encode(const CVector& x, Complex beta);

/// Gate coefficients that herald beta_encode(y - z, beta). This is the
/// numerical counterpart of attenuating both pulses by the known
/// per-mode subtraction efficiencies and interfering them on a balanced
/// beam splitter.
GateCoefficients gate_pulse_from_vectors(const CVector& y, const CVector& z, Complex beta,
                                         const ModeSpec& spec);

}  // namespace psq
