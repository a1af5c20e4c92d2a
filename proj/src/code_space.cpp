#include "psq/code_space.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

namespace psq {

namespace {

enum Projector : int { kIdentity = -1, kEven = 0, kOdd = 1 };

Complex projected_overlap(const CVector& bra, const CVector& ket, int projector) {
  Complex acc = 0.0;
  for (Eigen::Index n = 0; n < bra.size(); ++n) {
    if (projector == kIdentity || (n % 2) == projector) acc += std::conj(bra[n]) * ket[n];
  }
  return acc;
}

void check_label(BasisLabel j, const ModeSpec& spec) {
  if (static_cast<std::size_t>(j.value()) > spec.num_modes()) {
    throw InvalidInputError("basis label " + std::to_string(j.value()) + " exceeds M = " +
                            std::to_string(spec.num_modes()));
  }
}

std::vector<MeasurementOutcome> outcomes_from(const std::vector<double>& per_mode,
                                              double total) {
  std::vector<MeasurementOutcome> out;
  out.reserve(per_mode.size() + 1);
  double sum = 0.0;
  for (std::size_t j = 0; j < per_mode.size(); ++j) {
    out.push_back({BasisLabel(static_cast<int>(j) + 1), per_mode[j]});
    sum += per_mode[j];
  }
  out.push_back({std::nullopt, std::max(0.0, total - sum)});
  return out;
}

}  // namespace

// ----------------------------------------------------------------- CodeBasis

CodeBasis::CodeBasis(ModeSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  squeezed_.reserve(spec_.num_modes());
  subtracted_.reserve(spec_.num_modes());
  for (std::size_t m = 0; m < spec_.num_modes(); ++m) {
    const double s = spec_.squeezing[m];
    const int cutoff = spec_.cutoffs[m];
    squeezed_.push_back(squeezed_vacuum(s, cutoff, spec_.deficit_tol).amplitudes());
    subtracted_.push_back(photon_subtracted_squeezed(s, cutoff, spec_.deficit_tol).amplitudes());
  }
}

// ----------------------------------------------------------------- CodeState

CodeState::CodeState(CMatrix chi, ModeSpec spec) : chi_(std::move(chi)), basis_(std::move(spec)) {
  const auto m = static_cast<Eigen::Index>(basis_.num_modes());
  if (chi_.rows() != m || chi_.cols() != m) {
    throw InvalidInputError("code-space density must be " + std::to_string(m) + " x " +
                            std::to_string(m));
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    if (std::abs(chi_(j, j)) > 0.0 && !basis_.subtractable(static_cast<std::size_t>(j))) {
      throw InfeasibleError("basis state " + std::to_string(j + 1) +
                            " needs a photon subtracted from an unsqueezed mode");
    }
  }
}

CodeState CodeState::pure(const QuditAmplitudes& gamma, ModeSpec spec) {
  CodeState state(gamma.values() * gamma.values().adjoint(), std::move(spec));
  state.gamma_ = gamma.values();
  return state;
}

Complex CodeState::factor_product(std::size_t a, std::size_t b,
                                  const std::vector<int>& mask) const {
  Complex acc = 1.0;
  for (std::size_t t = 0; t < basis_.num_modes() && acc != Complex(0.0); ++t) {
    acc *= projected_overlap(basis_.factor(b, t), basis_.factor(a, t), mask[t]);
  }
  return acc;
}

FockDensity CodeState::reduced_density(std::size_t mode) const {
  const std::size_t m = basis_.num_modes();
  if (mode >= m) throw InvalidInputError("mode index out of range");
  std::vector<int> mask(m, kIdentity);
  const auto d = static_cast<Eigen::Index>(spec().local_dim(mode));
  CMatrix rho = CMatrix::Zero(d, d);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const Complex coeff = chi_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (coeff == Complex(0.0)) continue;
      // Overlap of every other mode; the kept mode contributes an outer product.
      Complex weight = 1.0;
      for (std::size_t t = 0; t < m && weight != Complex(0.0); ++t) {
        if (t == mode) continue;
        weight *= projected_overlap(basis_.factor(b, t), basis_.factor(a, t), kIdentity);
      }
      if (weight == Complex(0.0)) continue;
      rho.noalias() += coeff * weight * basis_.factor(a, mode) * basis_.factor(b, mode).adjoint();
    }
  }
  ModeSpec reduced;
  reduced.squeezing = {spec().squeezing[mode]};
  reduced.cutoffs = {spec().cutoffs[mode]};
  reduced.deficit_tol = spec().deficit_tol;
  return FockDensity(std::move(reduced), std::move(rho));
}

std::vector<MeasurementOutcome> CodeState::measure_J() const {
  const std::size_t m = basis_.num_modes();
  std::vector<double> probs(m, 0.0);
  std::vector<int> mask(m, kEven);
  for (std::size_t j = 0; j < m; ++j) {
    mask.assign(m, kEven);
    mask[j] = kOdd;
    Complex acc = 0.0;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        const Complex coeff = chi_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (coeff != Complex(0.0)) acc += coeff * factor_product(a, b, mask);
      }
    probs[j] = acc.real();
  }
  return outcomes_from(probs, chi_.trace().real());
}

double CodeState::modified_parity(std::size_t mode) const {
  const std::size_t m = basis_.num_modes();
  if (mode >= m) throw InvalidInputError("mode index out of range");
  std::vector<int> mask(m, kIdentity);
  mask[mode] = kOdd;
  Complex acc = 0.0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      const Complex coeff = chi_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (coeff != Complex(0.0)) acc += coeff * factor_product(a, b, mask);
    }
  return acc.real();
}

namespace {

CVector basis_column(const CodeBasis& basis, std::size_t j) {
  std::vector<FockVector> factors;
  factors.reserve(basis.num_modes());
  for (std::size_t t = 0; t < basis.num_modes(); ++t) {
    ModeSpec single;
    single.squeezing = {basis.spec().squeezing[t]};
    single.cutoffs = {basis.spec().cutoffs[t]};
    factors.emplace_back(std::move(single), basis.factor(j, t));
  }
  return tensor(factors).amplitudes();
}

}  // namespace

FockVector CodeState::to_fock_vector() const {
  if (!gamma_) throw InvalidInputError("to_fock_vector requires a pure code state");
  const auto dim = static_cast<Eigen::Index>(spec().dimension());
  CVector out = CVector::Zero(dim);
  for (std::size_t j = 0; j < basis_.num_modes(); ++j) {
    const Complex g = (*gamma_)[static_cast<Eigen::Index>(j)];
    if (g != Complex(0.0)) out += g * basis_column(basis_, j);
  }
  return FockVector(spec(), std::move(out));
}

FockDensity CodeState::to_fock_density() const {
  const std::size_t dim = spec().dimension();
  if (dim > max_dimension() / dim) {
    throw DimensionError("density matrix of dimension " + std::to_string(dim) +
                         " exceeds the amplitude guard");
  }
  const std::size_t m = basis_.num_modes();
  CMatrix columns = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    if (basis_.subtractable(j)) columns.col(static_cast<Eigen::Index>(j)) = basis_column(basis_, j);
  }
  return FockDensity(spec(), columns * chi_ * columns.adjoint());
}

// --------------------------------------------------------------- free functions

FockVector basis_state(BasisLabel j, const ModeSpec& spec) {
  spec.validate();
  check_label(j, spec);
  if (spec.squeezing[j.mode()] == 0.0) {
    throw InfeasibleError("basis state " + std::to_string(j.value()) +
                          " needs a photon subtracted from an unsqueezed mode");
  }
  const CodeBasis basis(spec);
  return FockVector(spec, basis_column(basis, j.mode()));
}

FockVector encode(const QuditAmplitudes& gamma, const ModeSpec& spec) {
  if (gamma.size() != spec.num_modes()) {
    throw InvalidInputError("encode: amplitude count does not match the number of modes");
  }
  return CodeState::pure(gamma, spec).to_fock_vector();
}

double modified_parity_expectation(const FockVector& state, std::size_t mode) {
  const RVector pops = mode_populations(state, mode);
  double odd = 0.0;
  for (Eigen::Index n = 1; n < pops.size(); n += 2) odd += pops[n];
  return odd;
}

double modified_parity_expectation(const FockDensity& state, std::size_t mode) {
  const RVector pops = mode_populations(state, mode);
  double odd = 0.0;
  for (Eigen::Index n = 1; n < pops.size(); n += 2) odd += pops[n];
  return odd;
}

double parity_expectation(const FockVector& state, std::size_t mode) {
  return parity_from_populations(mode_populations(state, mode));
}

double parity_expectation(const FockDensity& state, std::size_t mode) {
  return parity_from_populations(mode_populations(state, mode));
}

namespace {

// Accumulates weight per "exactly one odd mode" pattern.
template <class WeightAt>
std::vector<MeasurementOutcome> measure_pattern(const ModeSpec& spec, std::size_t dim,
                                                WeightAt weight_at) {
  const std::size_t m = spec.num_modes();
  std::vector<double> probs(m, 0.0);
  std::vector<int> photons(m, 0);
  double total = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double w = weight_at(i);
    total += w;
    std::size_t odd_count = 0, odd_mode = 0;
    for (std::size_t t = 0; t < m; ++t) {
      if (photons[t] % 2 == 1) {
        ++odd_count;
        odd_mode = t;
      }
    }
    if (odd_count == 1) probs[odd_mode] += w;
    // Row-major increment of the photon-number tuple.
    for (std::size_t t = m; t-- > 0;) {
      if (++photons[t] <= spec.cutoffs[t]) break;
      photons[t] = 0;
    }
  }
  return outcomes_from(probs, total);
}

}  // namespace

std::vector<MeasurementOutcome> measure_J(const FockVector& state) {
  const CVector& amps = state.amplitudes();
  return measure_pattern(state.spec(), state.size(),
                         [&](std::size_t i) { return std::norm(amps[static_cast<Eigen::Index>(i)]); });
}

std::vector<MeasurementOutcome> measure_J(const FockDensity& state) {
  const CMatrix& rho = state.matrix();
  return measure_pattern(state.spec(), static_cast<std::size_t>(rho.rows()), [&](std::size_t i) {
    const auto k = static_cast<Eigen::Index>(i);
    return rho(k, k).real();
  });
}

double fidelity_pure_mixed(const FockVector& psi, const FockDensity& rho) {
  if (!psi.spec().same_space(rho.spec())) {
    throw SpecMismatchError("fidelity of states on different truncated spaces");
  }
  const Complex f = psi.amplitudes().dot(rho.matrix() * psi.amplitudes());
  return f.real();
}

double uhlmann_root(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw InvalidInputError("uhlmann_fidelity: matrices must be square and of equal size");
  }
  if (a.rows() == 0) return 0.0;
  // With a = A A^dagger and b = B B^dagger, Tr sqrt(sqrt(a) b sqrt(a)) is the
  // sum of singular values of A^dagger B. Eigenvalues below the numerical
  // rank threshold are dropped; their square roots would be pure noise.
  constexpr double kNegTol = 1e-10;
  auto factor = [&](const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(m);
    const RVector& vals = eig.eigenvalues();
    if (vals.minCoeff() < -kNegTol) {
      throw InvalidInputError("uhlmann_fidelity: input is not positive semidefinite");
    }
    const double cut = static_cast<double>(m.rows()) * std::numeric_limits<double>::epsilon() *
                       std::max(vals.cwiseAbs().maxCoeff(), 0.0);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
      if (vals[i] > cut) keep.push_back(i);
    }
    CMatrix f(m.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
      f.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(keep[c]) * std::sqrt(vals[keep[c]]);
    }
    return f;
  };
  const CMatrix fa = factor(a);
  const CMatrix fb = factor(b);
  if (fa.cols() == 0 || fb.cols() == 0) return 0.0;
  const CMatrix cross = fa.adjoint() * fb;
  Eigen::BDCSVD<CMatrix> svd(cross);
  return svd.singularValues().sum();
}

double uhlmann_fidelity(const CMatrix& a, const CMatrix& b) {
  const double root = uhlmann_root(a, b);
  return root * root;
}

double uhlmann_fidelity(const FockDensity& a, const FockDensity& b) {
  if (!a.spec().same_space(b.spec())) {
    throw SpecMismatchError("fidelity of states on different truncated spaces");
  }
  return uhlmann_fidelity(a.matrix(), b.matrix());
}

}  // namespace psq
