#pragma once

// Dense truncated-Fock-space representation of multimode bosonic states.
//
// Conventions (fixed throughout the library):
//   q = (a + a^dagger)/sqrt(2),  p = i(a^dagger - a)/sqrt(2),  <q^2>_vac = 1/2.
//   The squeezer S(s) = exp((s/2)(a^dagger^2 - a^2)) stretches q for s > 0,
//   so the squeezed vacuum has <q^2> = e^{2s}/2 and the photon-subtracted
//   squeezed vacuum has <q^2> = 3 e^{2s}/2.
//
// Multimode amplitudes are stored row-major over photon-number tuples
// (n_1, ..., n_M): the last mode varies fastest.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "psq/errors.hpp"

namespace psq {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Probability allowed to fall above the cutoff when building a state.
inline constexpr double kDefaultDeficitTol = 1e-8;
/// Relative moment-weighted tail used by the automatic cutoff rule.
inline constexpr double kDefaultTailTol = 1e-12;
/// Default amplitude guard for full-space objects (2^24).
inline constexpr std::size_t kDefaultMaxDimension = std::size_t{1} << 24;
/// Largest cutoff the automatic rule will ever propose.
inline constexpr int kMaxAutoCutoff = 4000;

/// Amplitude guard, overridable through the PSQ_MAX_DIM environment variable.
std::size_t max_dimension();

/// Mode layout of an experiment: squeezing per mode and per-mode Fock cutoff
/// (maximum retained photon number, inclusive).
struct ModeSpec {
  std::vector<double> squeezing;
  std::vector<int> cutoffs;
  double deficit_tol = kDefaultDeficitTol;

  static ModeSpec uniform(std::vector<double> squeezing, int cutoff);
  /// Per-mode cutoffs chosen by auto_cutoff(s_j, tail_tol).
  static ModeSpec automatic(std::vector<double> squeezing,
                            double tail_tol = kDefaultTailTol);

  std::size_t num_modes() const noexcept { return squeezing.size(); }
  int cutoff(std::size_t mode) const { return cutoffs.at(mode); }
  std::size_t local_dim(std::size_t mode) const {
    return static_cast<std::size_t>(cutoffs.at(mode)) + 1;
  }
  bool has_uniform_cutoff() const noexcept;
  int max_cutoff() const noexcept;

  /// Product of local dimensions; throws DimensionError above max_dimension().
  std::size_t dimension() const;
  /// Row-major strides, one per mode.
  std::vector<std::size_t> strides() const;

  /// Throws InvalidInputError when an invariant is broken.
  void validate() const;
  /// True when both specs describe the same truncated Hilbert space.
  bool same_space(const ModeSpec& other) const noexcept {
    return cutoffs == other.cutoffs;
  }
};

/// Automatic per-mode cutoff for squeezing s. Starts from
/// max(8, ceil(4 sinh^2|s| + 6 sinh|s| + 8)) and grows until the
/// photon-number-weighted tail of both the squeezed vacuum and its
/// photon-subtracted partner drops below tail_tol and the squeezed-vacuum
/// norm deficit is below kDefaultDeficitTol.
int auto_cutoff(double s, double tail_tol = kDefaultTailTol);

/// Probability of the untruncated squeezed vacuum above `cutoff`.
double squeezed_vacuum_deficit(double s, int cutoff);

class FockVector {
 public:
  FockVector(ModeSpec spec, CVector amplitudes);
  static FockVector zero(ModeSpec spec);

  const ModeSpec& spec() const noexcept { return spec_; }
  const CVector& amplitudes() const noexcept { return amps_; }
  std::size_t num_modes() const noexcept { return spec_.num_modes(); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(amps_.size()); }

  double norm() const { return amps_.norm(); }
  /// Throws ZeroWeightError for the zero vector.
  FockVector normalized() const;

  std::size_t index_of(std::span<const int> photons) const;
  std::vector<int> photons_of(std::size_t index) const;
  Complex amplitude(std::span<const int> photons) const {
    return amps_[static_cast<Eigen::Index>(index_of(photons))];
  }

 private:
  ModeSpec spec_;
  CVector amps_;
};

class FockDensity {
 public:
  FockDensity(ModeSpec spec, CMatrix matrix);
  static FockDensity from_pure(const FockVector& psi);

  const ModeSpec& spec() const noexcept { return spec_; }
  const CMatrix& matrix() const noexcept { return rho_; }
  std::size_t num_modes() const noexcept { return spec_.num_modes(); }

  Complex trace() const { return rho_.trace(); }
  bool is_hermitian(double tol = 1e-10) const;
  /// Hermitian, unit trace and PSD within the stated tolerance.
  bool is_valid(double tol = 1e-10) const;

 private:
  ModeSpec spec_;
  CMatrix rho_;
};

// ---------------------------------------------------------------- states

/// Normalized truncated squeezed vacuum on a single mode. Throws
/// TruncationError (carrying the deficit) when more than deficit_tol of the
/// untruncated state lies above the cutoff.
FockVector squeezed_vacuum(double s, int cutoff,
                           double deficit_tol = kDefaultDeficitTol);

/// Normalized a|s> built from the truncated squeezed vacuum. For s == 0 the
/// subtraction is impossible; the continuous limit |1> is returned.
FockVector photon_subtracted_squeezed(double s, int cutoff,
                                      double deficit_tol = kDefaultDeficitTol);

/// Single-mode Fock state |n>.
FockVector number_state(int n, int cutoff);

FockVector tensor(std::span<const FockVector> states);
FockVector tensor(std::initializer_list<FockVector> states);

/// Unnormalized a_mode |psi>. The squared norm equals <n_mode>.
FockVector apply_annihilation(const FockVector& state, std::size_t mode);

/// <a|b>, conjugate-linear in the first argument.
Complex inner(const FockVector& a, const FockVector& b);

FockDensity partial_trace(const FockVector& state, std::size_t keep);
FockDensity partial_trace(const FockDensity& state, std::size_t keep);

/// Photon-number distribution of one mode.
RVector mode_populations(const FockVector& state, std::size_t mode);
RVector mode_populations(const FockDensity& state, std::size_t mode);

/// <X_theta^order> with X_theta = (a e^{-i theta} + a^dagger e^{i theta})/sqrt(2).
/// Orders 1 through 4 are supported; the moments are exact for the truncated
/// state (no truncation of the operator itself).
double quadrature_moment(const FockVector& state, std::size_t mode, int order,
                         double phase = 0.0);
double quadrature_moment(const FockDensity& state, std::size_t mode, int order,
                         double phase = 0.0);

// -------------------------------------------------------------- operators

/// Ladder operator on a single mode, (cutoff+1) x (cutoff+1).
CMatrix annihilation_matrix(int cutoff);

/// Rectangular block of D(alpha): rows 0..rows-1, columns 0..cols-1, each
/// entry from the closed-form Laguerre expression (no truncation error).
CMatrix displacement_block(Complex alpha, int rows, int cols);

/// D(alpha) on the retained block 0..cutoff. Throws TruncationError when the
/// coherent state D(alpha)|0> leaks more than deficit_tol above the cutoff.
CMatrix displacement(Complex alpha, int cutoff,
                     double deficit_tol = kDefaultDeficitTol);

/// Parity expectation sum_n (-1)^n p_n.
double parity_from_populations(const RVector& populations);

/// W(alpha) = (2/pi) Tr[D(-alpha) rho D(-alpha)^dagger Pi] for a single-mode
/// density. The displaced state is formed in a padded space; probability
/// leaking past the padding is measured and raises TruncationError above
/// rho.spec().deficit_tol.
double wigner_at(const FockDensity& rho, Complex alpha);

/// Normalized Hermite functions psi_0(x) .. psi_nmax(x) for the q convention above.
std::vector<double> hermite_functions(double x, int nmax);

/// Density of the theta-quadrature on the given grid.
std::vector<double> position_pdf(const FockDensity& rho, double phase,
                                 std::span<const double> grid);

}  // namespace psq
