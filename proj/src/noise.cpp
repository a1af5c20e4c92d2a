#include "psq/noise.hpp"

#include <cmath>
#include <string>

namespace psq {

namespace {

// amp(n, k) = sqrt(C(n,k) tau^(n-k) (1-tau)^k), stored row-major.
class LossTable {
 public:
  LossTable(int cutoff, double tau) : dim_(cutoff + 1), amp_(dim_ * dim_, 0.0) {
    const double log_t = std::log(tau);
    const double log_r = std::log1p(-tau);
    for (int n = 0; n < dim_; ++n) {
      for (int k = 0; k <= n; ++k) {
        double log_p = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        if (n - k > 0) log_p += (n - k) * log_t;
        if (k > 0) log_p += k * log_r;
        amp_[n * dim_ + k] = std::isfinite(log_p) ? std::exp(0.5 * log_p) : 0.0;
      }
    }
  }
  double operator()(int n, int k) const { return amp_[n * dim_ + k]; }

 private:
  int dim_;
  std::vector<double> amp_;
};

void apply_loss_on_mode(const ModeSpec& spec, std::size_t mode, const LossTable& table,
                        const CMatrix& in, CMatrix& out) {
  const auto strides = spec.strides();
  const std::size_t stride = strides[mode];
  const std::size_t local = spec.local_dim(mode);
  const Eigen::Index dim = in.rows();
  out.setZero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int n = static_cast<int>((static_cast<std::size_t>(col) / stride) % local);
    for (Eigen::Index row = 0; row < dim; ++row) {
      const Complex v = in(row, col);
      if (v == Complex(0.0)) continue;
      const int m = static_cast<int>((static_cast<std::size_t>(row) / stride) % local);
      const int kmax = std::min(m, n);
      for (int k = 0; k <= kmax; ++k) {
        const auto shift = static_cast<Eigen::Index>(k * stride);
        out(row - shift, col - shift) += table(m, k) * table(n, k) * v;
      }
    }
  }
}

CMatrix loss_single_matrix(const CVector& f, double tau) {
  const int cutoff = static_cast<int>(f.size()) - 1;
  ModeSpec one = ModeSpec::uniform({0.0}, cutoff);
  CMatrix out;
  apply_loss_on_mode(one, 0, LossTable(cutoff, tau), f * f.adjoint(), out);
  return out;
}

// Loss keeps parity block-diagonal states block-diagonal, so the Uhlmann
// root is the sum of the roots of the even and odd blocks.
double parity_block_fidelity(const CMatrix& a, const CMatrix& b) {
  const Eigen::Index dim = a.rows();
  double root = 0.0;
  for (int parity = 0; parity < 2; ++parity) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index n = parity; n < dim; n += 2) idx.push_back(n);
    if (idx.empty()) continue;
    const auto size = static_cast<Eigen::Index>(idx.size());
    CMatrix ba(size, size), bb(size, size);
    for (Eigen::Index r = 0; r < size; ++r)
      for (Eigen::Index c = 0; c < size; ++c) {
        ba(r, c) = a(idx[r], idx[c]);
        bb(r, c) = b(idx[r], idx[c]);
      }
    root += uhlmann_root(ba, bb);
  }
  return root * root;
}

void check_pair(BasisLabel j, BasisLabel k, const ModeSpec& spec) {
  if (j == k) throw InvalidInputError("pair fidelity needs two distinct basis labels");
  if (static_cast<std::size_t>(std::max(j.value(), k.value())) > spec.num_modes()) {
    throw InvalidInputError("basis label exceeds the number of modes");
  }
}

}  // namespace

void check_transmittivity(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw InvalidInputError("tau must lie in [0, 1], got " + std::to_string(tau));
  }
}

std::vector<CMatrix> loss_kraus_operators(int cutoff, double tau) {
  check_transmittivity(tau);
  if (cutoff < 0) throw InvalidInputError("cutoff must be non-negative");
  const LossTable table(cutoff, tau);
  std::vector<CMatrix> ops;
  ops.reserve(static_cast<std::size_t>(cutoff) + 1);
  for (int k = 0; k <= cutoff; ++k) {
    CMatrix op = CMatrix::Zero(cutoff + 1, cutoff + 1);
    for (int n = k; n <= cutoff; ++n) op(n - k, n) = table(n, k);
    ops.push_back(std::move(op));
  }
  return ops;
}

FockDensity loss_single(const FockDensity& rho, double tau) {
  if (rho.num_modes() != 1) throw InvalidInputError("loss_single expects a single-mode density");
  return loss_multi(rho, tau);
}

FockDensity loss_multi(const FockDensity& rho, double tau) {
  check_transmittivity(tau);
  const ModeSpec& spec = rho.spec();
  CMatrix current = rho.matrix();
  CMatrix next;
  for (std::size_t mode = 0; mode < spec.num_modes(); ++mode) {
    apply_loss_on_mode(spec, mode, LossTable(spec.cutoffs[mode], tau), current, next);
    current.swap(next);
  }
  return FockDensity(spec, std::move(current));
}

FockDensity loss_multi(const FockVector& psi, double tau) {
  const std::size_t dim = psi.size();
  if (dim > max_dimension() / dim) {
    throw DimensionError("density of dimension " + std::to_string(dim) +
                         " exceeds the amplitude guard");
  }
  return loss_multi(FockDensity::from_pure(psi), tau);
}

double pure_loss_fidelity(const CVector& f, double tau) {
  check_transmittivity(tau);
  const int cutoff = static_cast<int>(f.size()) - 1;
  const LossTable table(cutoff, tau);
  double total = 0.0;
  for (int k = 0; k <= cutoff; ++k) {
    Complex overlap = 0.0;
    for (int n = k; n <= cutoff; ++n) overlap += std::conj(f[n - k]) * table(n, k) * f[n];
    total += std::norm(overlap);
  }
  return total;
}

double lossy_basis_fidelity(BasisLabel j, const ModeSpec& spec, double tau) {
  check_transmittivity(tau);
  const CodeBasis basis(spec);
  if (static_cast<std::size_t>(j.value()) > basis.num_modes()) {
    throw InvalidInputError("basis label exceeds the number of modes");
  }
  double fidelity = 1.0;
  for (std::size_t t = 0; t < basis.num_modes(); ++t) {
    fidelity *= pure_loss_fidelity(basis.factor(j.mode(), t), tau);
  }
  return fidelity;
}

double lossy_basis_fidelity_full(BasisLabel j, const ModeSpec& spec, double tau) {
  const FockVector psi = basis_state(j, spec);
  return fidelity_pure_mixed(psi, loss_multi(psi, tau));
}

double lossy_pair_fidelity(BasisLabel j, BasisLabel k, const ModeSpec& spec, double tau) {
  check_transmittivity(tau);
  check_pair(j, k, spec);
  const CodeBasis basis(spec);
  const CMatrix ps_j = loss_single_matrix(basis.subtracted(j.mode()), tau);
  const CMatrix s_j = loss_single_matrix(basis.squeezed(j.mode()), tau);
  const CMatrix ps_k = loss_single_matrix(basis.subtracted(k.mode()), tau);
  const CMatrix s_k = loss_single_matrix(basis.squeezed(k.mode()), tau);
  return parity_block_fidelity(ps_j, s_j) * parity_block_fidelity(s_k, ps_k);
}

double lossy_pair_fidelity_full(BasisLabel j, BasisLabel k, const ModeSpec& spec, double tau) {
  check_pair(j, k, spec);
  const FockDensity a = loss_multi(basis_state(j, spec), tau);
  const FockDensity b = loss_multi(basis_state(k, spec), tau);
  return uhlmann_fidelity(a, b);
}

int cat_cutoff(double alpha_abs) {
  const double x = alpha_abs * alpha_abs;
  return std::max(8, static_cast<int>(std::ceil(x + 10.0 * alpha_abs + 10.0)));
}

namespace {

CVector coherent_truncated(Complex alpha, int cutoff, double* deficit) {
  CVector amps(cutoff + 1);
  amps[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= cutoff; ++n) amps[n] = amps[n - 1] * alpha / std::sqrt(double(n));
  *deficit = std::max(0.0, 1.0 - amps.squaredNorm());
  return amps;
}

CVector cat_unnormalized(const CatSpec& spec) {
  if (spec.cutoff < 2) throw InvalidInputError("cat cutoff must be >= 2");
  double deficit = 0.0;
  CVector amps = coherent_truncated(spec.alpha, spec.cutoff, &deficit);
  if (deficit > spec.deficit_tol) {
    throw TruncationError("cutoff " + std::to_string(spec.cutoff) + " too small for |alpha| = " +
                              std::to_string(std::abs(spec.alpha)),
                          deficit);
  }
  // |alpha> + |-alpha> keeps only even photon numbers.
  for (Eigen::Index n = 0; n < amps.size(); ++n) amps[n] = (n % 2 == 0) ? 2.0 * amps[n] : 0.0;
  return amps;
}

}  // namespace

double cat_norm_squared(const CatSpec& spec) { return cat_unnormalized(spec).squaredNorm(); }

FockVector cat_state(const CatSpec& spec) {
  const CVector amps = cat_unnormalized(spec);
  return FockVector(ModeSpec::uniform({0.0}, spec.cutoff), amps / amps.norm());
}

double cat_loss_fidelity(Complex alpha, double tau, int cutoff) {
  const FockVector cat = cat_state({alpha, cutoff});
  return pure_loss_fidelity(cat.amplitudes(), tau);
}

}  // namespace psq
