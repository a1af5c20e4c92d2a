#include "psq/subtraction.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "psq/code_space.hpp"

namespace psq {

namespace {

void check_length(std::size_t got, const ModeSpec& spec, const char* what) {
  if (got != spec.num_modes()) {
    throw InvalidInputError(std::string(what) + ": length " + std::to_string(got) +
                            " does not match " + std::to_string(spec.num_modes()) + " modes");
  }
}

}  // namespace

// ----------------------------------------------------------------- ChiMatrix

ChiMatrix::ChiMatrix(CMatrix chi, int label, double renorm_tol)
    : chi_(std::move(chi)), label_(label), raw_trace_(0.0) {
  if (chi_.rows() == 0 || chi_.rows() != chi_.cols()) {
    throw InvalidInputError("chi: expected a non-empty square matrix");
  }
  if (label_ < 1 || label_ > chi_.rows()) {
    throw InvalidInputError("chi: label " + std::to_string(label_) + " outside 1.." +
                            std::to_string(chi_.rows()));
  }
  if ((chi_ - chi_.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidInputError("chi: matrix is not Hermitian");
  }
  raw_trace_ = chi_.trace().real();
  if (std::abs(raw_trace_ - 1.0) > renorm_tol) {
    throw InvalidInputError("chi: trace " + std::to_string(raw_trace_) +
                            " is further than " + std::to_string(renorm_tol) + " from 1");
  }
  chi_ /= raw_trace_;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(chi_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw InvalidInputError("chi: matrix is not positive semidefinite");
  }
}

ChiMatrix ChiMatrix::from_diagonal(std::span<const double> diagonal, int label,
                                   double renorm_tol) {
  CMatrix chi = CMatrix::Zero(static_cast<Eigen::Index>(diagonal.size()),
                              static_cast<Eigen::Index>(diagonal.size()));
  for (std::size_t k = 0; k < diagonal.size(); ++k) {
    chi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = diagonal[k];
  }
  return ChiMatrix(std::move(chi), label, renorm_tol);
}

// -------------------------------------------------------------- operations

SparseOperator subtraction_operator(const GateCoefficients& c, const ModeSpec& spec) {
  spec.validate();
  check_length(c.size(), spec, "subtraction_operator");
  const std::size_t dim = spec.dimension();
  const auto strides = spec.strides();
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < spec.num_modes(); ++j) {
      if (c[j] == Complex(0.0)) continue;
      const std::size_t n = (i / strides[j]) % spec.local_dim(j);
      if (n == 0) continue;
      triplets.emplace_back(static_cast<int>(i - strides[j]), static_cast<int>(i),
                            c[j] * std::sqrt(static_cast<double>(n)));
    }
  }
  SparseOperator b(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  b.setFromTriplets(triplets.begin(), triplets.end());
  return b;
}

FockVector multimode_squeezed_vacuum(const ModeSpec& spec) {
  spec.validate();
  std::vector<FockVector> factors;
  factors.reserve(spec.num_modes());
  for (std::size_t m = 0; m < spec.num_modes(); ++m) {
    factors.push_back(squeezed_vacuum(spec.squeezing[m], spec.cutoffs[m], spec.deficit_tol));
  }
  FockVector joint = tensor(factors);
  return FockVector(spec, joint.amplitudes());
}

SubtractionResult subtract_photon(const ModeSpec& spec, const GateCoefficients& c) {
  check_length(c.size(), spec, "subtract_photon");
  const FockVector vacuum = multimode_squeezed_vacuum(spec);
  const auto strides = spec.strides();
  const CVector& in = vacuum.amplitudes();
  CVector out = CVector::Zero(in.size());
  for (std::size_t i = 0; i < vacuum.size(); ++i) {
    for (std::size_t j = 0; j < spec.num_modes(); ++j) {
      const std::size_t n = (i / strides[j]) % spec.local_dim(j);
      if (n > 0) out[i - strides[j]] += c[j] * std::sqrt(static_cast<double>(n)) * in[i];
    }
  }
  const double weight = out.squaredNorm();
  if (!(weight > 1e-24)) {
    throw ZeroWeightError("subtraction weight vanishes: no squeezed mode overlaps the gate field");
  }
  return {FockVector(spec, out / std::sqrt(weight)), weight};
}

QuditAmplitudes gamma_from_c(const GateCoefficients& c, const ModeSpec& spec) {
  check_length(c.size(), spec, "gamma_from_c");
  CVector gamma(c.values().size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    gamma[static_cast<Eigen::Index>(j)] = c[j] * std::sinh(std::abs(spec.squeezing[j]));
  }
  if (!(gamma.squaredNorm() > 0.0)) {
    throw ZeroWeightError("gate field only addresses unsqueezed modes");
  }
  return QuditAmplitudes::normalize(gamma);
}

GateCoefficients c_from_gamma(const QuditAmplitudes& gamma, const ModeSpec& spec) {
  check_length(gamma.size(), spec, "c_from_gamma");
  CVector c = CVector::Zero(gamma.values().size());
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    if (gamma[j] == Complex(0.0)) continue;
    const double sh = std::sinh(std::abs(spec.squeezing[j]));
    if (sh == 0.0) {
      throw InfeasibleError("target amplitude on mode " + std::to_string(j + 1) +
                            " requires subtraction from an unsqueezed mode");
    }
    c[static_cast<Eigen::Index>(j)] = gamma[j] / sh;
  }
  return GateCoefficients::normalize(c);
}

FockDensity imperfect_state(const ChiMatrix& chi, const ModeSpec& spec) {
  check_length(chi.size(), spec, "imperfect_state");
  return CodeState(chi.matrix(), spec).to_fock_density();
}

QuditAmplitudes beta_encode(const CVector& x, Complex beta) {
  if (beta == Complex(0.0)) {
    throw InvalidInputError("beta must be non-zero, otherwise the state does not depend on x");
  }
  CVector h(x.size() + 1);
  h[0] = beta;
  h.tail(x.size()) = x;
  return QuditAmplitudes(h / std::sqrt(std::norm(beta) + x.squaredNorm()));
}

GateCoefficients gate_pulse_from_vectors(const CVector& y, const CVector& z, Complex beta,
                                         const ModeSpec& spec) {
  if (y.size() != z.size()) throw InvalidInputError("y and z must have equal length");
  if (spec.num_modes() != static_cast<std::size_t>(y.size()) + 1) {
    throw InvalidInputError("spec must have len(y) + 1 = " + std::to_string(y.size() + 1) +
                            " modes");
  }
  return c_from_gamma(beta_encode(y - z, beta), spec);
}

}  // namespace psq
