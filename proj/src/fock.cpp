#include "psq/fock.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace psq {

namespace {

void check_single_mode(const ModeSpec& spec, const char* what) {
  if (spec.num_modes() != 1) {
    throw InvalidInputError(std::string(what) + ": expected a single-mode state, got " +
                            std::to_string(spec.num_modes()) + " modes");
  }
}

void check_mode(const ModeSpec& spec, std::size_t mode) {
  if (mode >= spec.num_modes()) {
    throw InvalidInputError("mode index " + std::to_string(mode) + " out of range for " +
                            std::to_string(spec.num_modes()) + " modes");
  }
}

// Untruncated squared amplitudes of S(s)|0> (even n) and S(s)|1> (odd n) for
// n = 0..nmax. Both sequences come from the closed-form recurrences
//   c_{2k+2} = c_{2k} t sqrt((2k+1)/(2k+2)),  c_0 = cosh^{-1/2}
//   d_{2k+3} = d_{2k+1} t sqrt((2k+3)/(2k+2)), d_1 = cosh^{-3/2}
struct UntruncatedPopulations {
  std::vector<double> squeezed;
  std::vector<double> subtracted;
};

UntruncatedPopulations untruncated_populations(double s, int nmax) {
  const double t = std::tanh(std::abs(s));
  const double ch = std::cosh(s);
  UntruncatedPopulations out;
  out.squeezed.assign(static_cast<std::size_t>(nmax) + 1, 0.0);
  out.subtracted.assign(static_cast<std::size_t>(nmax) + 1, 0.0);
  double c = 1.0 / std::sqrt(ch);
  for (int n = 0; n <= nmax; n += 2) {
    out.squeezed[n] = c * c;
    c *= t * std::sqrt((n + 1.0) / (n + 2.0));
  }
  double d = std::pow(ch, -1.5);
  for (int n = 1; n <= nmax; n += 2) {
    out.subtracted[n] = d * d;
    d *= t * std::sqrt((n + 2.0) / (n + 1.0));
  }
  return out;
}

double poisson_deficit(double mean, int cutoff) {
  if (mean == 0.0) return 0.0;
  double p = std::exp(-mean);
  double sum = 0.0;
  for (int n = 0; n <= cutoff; ++n) {
    sum += p;
    p *= mean / (n + 1.0);
  }
  return std::max(0.0, 1.0 - sum);
}

void check_density_dimension(std::size_t dim) {
  const std::size_t limit = max_dimension();
  if (dim != 0 && dim > limit / dim) {
    throw DimensionError("density matrix of dimension " + std::to_string(dim) +
                         " exceeds the amplitude guard of " + std::to_string(limit));
  }
}

// Exact moment of X_theta^order for a single-mode density, formed in a space
// padded by `order` levels so that no matrix element of X^order reachable
// from the support of rho is truncated.
double single_mode_moment(const CMatrix& rho, int order, double phase) {
  const Eigen::Index n = rho.rows();
  const Eigen::Index padded = n + order;
  CMatrix x = CMatrix::Zero(padded, padded);
  const Complex lower = std::polar(1.0 / std::numbers::sqrt2, -phase);
  for (Eigen::Index k = 1; k < padded; ++k) {
    const double amp = std::sqrt(static_cast<double>(k));
    x(k - 1, k) += lower * amp;
    x(k, k - 1) += std::conj(lower) * amp;
  }
  CMatrix power = CMatrix::Identity(padded, padded);
  for (int i = 0; i < order; ++i) power = power * x;
  Complex acc = 0.0;
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index k = 0; k < n; ++k) acc += rho(m, k) * power(k, m);
  return acc.real();
}

}  // namespace

std::size_t max_dimension() {
  if (const char* env = std::getenv("PSQ_MAX_DIM")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<std::size_t>(value);
  }
  return kDefaultMaxDimension;
}

// ------------------------------------------------------------------ ModeSpec

ModeSpec ModeSpec::uniform(std::vector<double> squeezing, int cutoff) {
  ModeSpec spec;
  spec.cutoffs.assign(squeezing.size(), cutoff);
  spec.squeezing = std::move(squeezing);
  spec.validate();
  return spec;
}

ModeSpec ModeSpec::automatic(std::vector<double> squeezing, double tail_tol) {
  ModeSpec spec;
  spec.cutoffs.reserve(squeezing.size());
  for (double s : squeezing) spec.cutoffs.push_back(auto_cutoff(s, tail_tol));
  spec.squeezing = std::move(squeezing);
  spec.validate();
  return spec;
}

bool ModeSpec::has_uniform_cutoff() const noexcept {
  return std::adjacent_find(cutoffs.begin(), cutoffs.end(), std::not_equal_to<>()) ==
         cutoffs.end();
}

int ModeSpec::max_cutoff() const noexcept {
  return cutoffs.empty() ? 0 : *std::max_element(cutoffs.begin(), cutoffs.end());
}

std::size_t ModeSpec::dimension() const {
  const std::size_t limit = max_dimension();
  std::size_t dim = 1;
  for (std::size_t m = 0; m < num_modes(); ++m) {
    const std::size_t d = local_dim(m);
    if (dim > limit / d) {
      throw DimensionError("full Fock space exceeds the amplitude guard of " +
                           std::to_string(limit) + " (set PSQ_MAX_DIM to override)");
    }
    dim *= d;
  }
  return dim;
}

std::vector<std::size_t> ModeSpec::strides() const {
  std::vector<std::size_t> out(num_modes(), 1);
  for (std::size_t m = num_modes(); m-- > 1;) out[m - 1] = out[m] * local_dim(m);
  return out;
}

void ModeSpec::validate() const {
  if (squeezing.empty()) throw InvalidInputError("num_modes must be >= 1");
  if (cutoffs.size() != squeezing.size()) {
    throw InvalidInputError("cutoff: expected " + std::to_string(squeezing.size()) +
                            " per-mode cutoffs, got " + std::to_string(cutoffs.size()));
  }
  for (int c : cutoffs) {
    if (c < 2) throw InvalidInputError("cutoff must be >= 2, got " + std::to_string(c));
  }
  for (double s : squeezing) {
    if (!std::isfinite(s)) throw InvalidInputError("squeezing must be finite");
  }
  if (!(deficit_tol >= 0.0)) throw InvalidInputError("deficit_tol must be non-negative");
}

int auto_cutoff(double s, double tail_tol) {
  const double sh = std::sinh(std::abs(s));
  const int start =
      std::max(8, static_cast<int>(std::ceil(4.0 * sh * sh + 6.0 * sh + 8.0)));
  if (s == 0.0) return start;
  if (start > kMaxAutoCutoff) {
    throw TruncationError("squeezing " + std::to_string(s) + " needs a cutoff above " +
                              std::to_string(kMaxAutoCutoff),
                          1.0);
  }

  const int nmax = kMaxAutoCutoff + 1;
  const auto pops = untruncated_populations(s, nmax);
  // Suffix sums of (n+1) p_n, accumulated from the top for accuracy.
  std::vector<double> tail_sq(nmax + 2, 0.0), tail_ps(nmax + 2, 0.0), tail_norm(nmax + 2, 0.0);
  for (int n = nmax; n >= 0; --n) {
    tail_sq[n] = tail_sq[n + 1] + (n + 1.0) * pops.squeezed[n];
    tail_ps[n] = tail_ps[n + 1] + (n + 1.0) * pops.subtracted[n];
    tail_norm[n] = tail_norm[n + 1] + pops.squeezed[n];
  }
  const double scale_sq = sh * sh + 1.0;
  const double scale_ps = 3.0 * sh * sh + 2.0;
  for (int cutoff = start; cutoff <= kMaxAutoCutoff; ++cutoff) {
    // The subtracted state built from a cutoff-N squeezed vacuum lives on n <= N-1.
    const double sq = tail_sq[cutoff + 1] / scale_sq;
    const double ps = tail_ps[cutoff] / scale_ps;
    if (sq < tail_tol && ps < tail_tol && tail_norm[cutoff + 1] < kDefaultDeficitTol) {
      return cutoff;
    }
  }
  throw TruncationError("squeezing " + std::to_string(s) + " needs a cutoff above " +
                            std::to_string(kMaxAutoCutoff),
                        tail_norm[kMaxAutoCutoff + 1]);
}

double squeezed_vacuum_deficit(double s, int cutoff) {
  const auto pops = untruncated_populations(s, cutoff);
  double sum = 0.0;
  for (double p : pops.squeezed) sum += p;
  return std::max(0.0, 1.0 - sum);
}

// ---------------------------------------------------------------- FockVector

FockVector::FockVector(ModeSpec spec, CVector amplitudes)
    : spec_(std::move(spec)), amps_(std::move(amplitudes)) {
  spec_.validate();
  if (static_cast<std::size_t>(amps_.size()) != spec_.dimension()) {
    throw InvalidInputError("amplitude count " + std::to_string(amps_.size()) +
                            " does not match Fock dimension " +
                            std::to_string(spec_.dimension()));
  }
}

FockVector FockVector::zero(ModeSpec spec) {
  spec.validate();
  const auto dim = static_cast<Eigen::Index>(spec.dimension());
  return FockVector(std::move(spec), CVector::Zero(dim));
}

FockVector FockVector::normalized() const {
  const double n = norm();
  if (!(n > 0.0)) throw ZeroWeightError("cannot normalize the zero vector");
  return FockVector(spec_, amps_ / n);
}

std::size_t FockVector::index_of(std::span<const int> photons) const {
  if (photons.size() != num_modes()) {
    throw InvalidInputError("photon tuple length does not match the number of modes");
  }
  std::size_t index = 0;
  for (std::size_t m = 0; m < num_modes(); ++m) {
    if (photons[m] < 0 || photons[m] > spec_.cutoff(m)) {
      throw InvalidInputError("photon number out of range on mode " + std::to_string(m));
    }
    index = index * spec_.local_dim(m) + static_cast<std::size_t>(photons[m]);
  }
  return index;
}

std::vector<int> FockVector::photons_of(std::size_t index) const {
  std::vector<int> out(num_modes());
  for (std::size_t m = num_modes(); m-- > 0;) {
    const std::size_t d = spec_.local_dim(m);
    out[m] = static_cast<int>(index % d);
    index /= d;
  }
  return out;
}

// --------------------------------------------------------------- FockDensity

FockDensity::FockDensity(ModeSpec spec, CMatrix matrix)
    : spec_(std::move(spec)), rho_(std::move(matrix)) {
  spec_.validate();
  const std::size_t dim = spec_.dimension();
  check_density_dimension(dim);
  if (static_cast<std::size_t>(rho_.rows()) != dim ||
      static_cast<std::size_t>(rho_.cols()) != dim) {
    throw InvalidInputError("density matrix shape does not match Fock dimension " +
                            std::to_string(dim));
  }
}

FockDensity FockDensity::from_pure(const FockVector& psi) {
  check_density_dimension(psi.size());
  return FockDensity(psi.spec(), psi.amplitudes() * psi.amplitudes().adjoint());
}

bool FockDensity::is_hermitian(double tol) const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool FockDensity::is_valid(double tol) const {
  if (!is_hermitian(tol)) return false;
  if (std::abs(trace() - Complex(1.0)) > tol) return false;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho_, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol;
}

// -------------------------------------------------------------------- states

FockVector squeezed_vacuum(double s, int cutoff, double deficit_tol) {
  if (cutoff < 2) throw InvalidInputError("cutoff must be >= 2, got " + std::to_string(cutoff));
  const auto pops = untruncated_populations(s, cutoff);
  CVector amps = CVector::Zero(cutoff + 1);
  // Amplitude signs follow (tanh s)^k.
  const double sign = s < 0.0 ? -1.0 : 1.0;
  double sum = 0.0;
  for (int n = 0; n <= cutoff; n += 2) {
    const double mag = std::sqrt(pops.squeezed[n]);
    amps[n] = ((n / 2) % 2 == 1 ? sign : 1.0) * mag;
    sum += pops.squeezed[n];
  }
  const double deficit = std::max(0.0, 1.0 - sum);
  if (deficit > deficit_tol) {
    throw TruncationError("cutoff " + std::to_string(cutoff) + " too small for squeezing " +
                              std::to_string(s) + " (norm deficit " +
                              std::to_string(deficit) + ")",
                          deficit);
  }
  ModeSpec spec;
  spec.squeezing = {s};
  spec.cutoffs = {cutoff};
  spec.deficit_tol = deficit_tol;
  return FockVector(std::move(spec), amps / amps.norm());
}

FockVector photon_subtracted_squeezed(double s, int cutoff, double deficit_tol) {
  if (s == 0.0) {
    FockVector one = number_state(1, cutoff);
    ModeSpec spec = one.spec();
    spec.deficit_tol = deficit_tol;
    return FockVector(std::move(spec), one.amplitudes());
  }
  return apply_annihilation(squeezed_vacuum(s, cutoff, deficit_tol), 0).normalized();
}

FockVector number_state(int n, int cutoff) {
  if (cutoff < 2) throw InvalidInputError("cutoff must be >= 2, got " + std::to_string(cutoff));
  if (n < 0 || n > cutoff) throw InvalidInputError("photon number outside the retained block");
  CVector amps = CVector::Zero(cutoff + 1);
  amps[n] = 1.0;
  return FockVector(ModeSpec::uniform({0.0}, cutoff), std::move(amps));
}

FockVector tensor(std::span<const FockVector> states) {
  if (states.empty()) throw InvalidInputError("tensor of an empty list");
  ModeSpec spec;
  spec.deficit_tol = states.front().spec().deficit_tol;
  for (const auto& st : states) {
    const auto& s = st.spec();
    spec.squeezing.insert(spec.squeezing.end(), s.squeezing.begin(), s.squeezing.end());
    spec.cutoffs.insert(spec.cutoffs.end(), s.cutoffs.begin(), s.cutoffs.end());
  }
  spec.dimension();  // guard before allocating
  CVector acc = states.front().amplitudes();
  for (std::size_t i = 1; i < states.size(); ++i) {
    const CVector& next = states[i].amplitudes();
    CVector out(acc.size() * next.size());
    for (Eigen::Index a = 0; a < acc.size(); ++a)
      out.segment(a * next.size(), next.size()) = acc[a] * next;
    acc = std::move(out);
  }
  return FockVector(std::move(spec), std::move(acc));
}

FockVector tensor(std::initializer_list<FockVector> states) {
  return tensor(std::span<const FockVector>(states.begin(), states.size()));
}

FockVector apply_annihilation(const FockVector& state, std::size_t mode) {
  const auto& spec = state.spec();
  check_mode(spec, mode);
  const std::size_t stride = spec.strides()[mode];
  const std::size_t d = spec.local_dim(mode);
  const CVector& in = state.amplitudes();
  CVector out = CVector::Zero(in.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    const std::size_t n = (i / stride) % d;
    if (n > 0) out[i - stride] = std::sqrt(static_cast<double>(n)) * in[i];
  }
  return FockVector(spec, std::move(out));
}

Complex inner(const FockVector& a, const FockVector& b) {
  if (!a.spec().same_space(b.spec())) {
    throw SpecMismatchError("inner product of states on different truncated spaces");
  }
  return a.amplitudes().dot(b.amplitudes());
}

FockDensity partial_trace(const FockVector& state, std::size_t keep) {
  const auto& spec = state.spec();
  check_mode(spec, keep);
  const std::size_t stride = spec.strides()[keep];
  const std::size_t d = spec.local_dim(keep);
  const std::size_t outer = state.size() / (stride * d);
  // Psi(n, (o, i)) = psi[o, n, i]; rho = Psi Psi^dagger.
  CMatrix psi(d, outer * stride);
  const CVector& amps = state.amplitudes();
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t n = 0; n < d; ++n)
      for (std::size_t i = 0; i < stride; ++i)
        psi(n, o * stride + i) = amps[(o * d + n) * stride + i];
  ModeSpec reduced;
  reduced.squeezing = {spec.squeezing[keep]};
  reduced.cutoffs = {spec.cutoffs[keep]};
  reduced.deficit_tol = spec.deficit_tol;
  return FockDensity(std::move(reduced), psi * psi.adjoint());
}

FockDensity partial_trace(const FockDensity& state, std::size_t keep) {
  const auto& spec = state.spec();
  check_mode(spec, keep);
  const std::size_t stride = spec.strides()[keep];
  const std::size_t d = spec.local_dim(keep);
  const std::size_t dim = spec.dimension();
  const std::size_t outer = dim / (stride * d);
  const CMatrix& rho = state.matrix();
  CMatrix out = CMatrix::Zero(d, d);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t i = 0; i < stride; ++i)
      for (std::size_t n = 0; n < d; ++n)
        for (std::size_t k = 0; k < d; ++k)
          out(n, k) += rho((o * d + n) * stride + i, (o * d + k) * stride + i);
  ModeSpec reduced;
  reduced.squeezing = {spec.squeezing[keep]};
  reduced.cutoffs = {spec.cutoffs[keep]};
  reduced.deficit_tol = spec.deficit_tol;
  return FockDensity(std::move(reduced), std::move(out));
}

RVector mode_populations(const FockVector& state, std::size_t mode) {
  const auto& spec = state.spec();
  check_mode(spec, mode);
  const std::size_t stride = spec.strides()[mode];
  const std::size_t d = spec.local_dim(mode);
  RVector pops = RVector::Zero(d);
  const CVector& amps = state.amplitudes();
  for (std::size_t i = 0; i < state.size(); ++i) pops[(i / stride) % d] += std::norm(amps[i]);
  return pops;
}

RVector mode_populations(const FockDensity& state, std::size_t mode) {
  const auto& spec = state.spec();
  check_mode(spec, mode);
  const std::size_t stride = spec.strides()[mode];
  const std::size_t d = spec.local_dim(mode);
  RVector pops = RVector::Zero(d);
  const CMatrix& rho = state.matrix();
  for (Eigen::Index i = 0; i < rho.rows(); ++i)
    pops[(static_cast<std::size_t>(i) / stride) % d] += rho(i, i).real();
  return pops;
}

double quadrature_moment(const FockVector& state, std::size_t mode, int order, double phase) {
  return quadrature_moment(partial_trace(state, mode), 0, order, phase);
}

double quadrature_moment(const FockDensity& state, std::size_t mode, int order, double phase) {
  if (order < 1 || order > 4) throw InvalidInputError("quadrature order must be in 1..4");
  if (state.num_modes() == 1) {
    check_mode(state.spec(), mode);
    return single_mode_moment(state.matrix(), order, phase);
  }
  return single_mode_moment(partial_trace(state, mode).matrix(), order, phase);
}

// ----------------------------------------------------------------- operators

CMatrix annihilation_matrix(int cutoff) {
  CMatrix a = CMatrix::Zero(cutoff + 1, cutoff + 1);
  for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

CMatrix displacement_block(Complex alpha, int rows, int cols) {
  CMatrix out = CMatrix::Zero(rows, cols);
  const double x = std::norm(alpha);
  if (x == 0.0) {
    for (int i = 0; i < std::min(rows, cols); ++i) out(i, i) = 1.0;
    return out;
  }
  const double log_abs = std::log(std::abs(alpha));
  const double arg = std::arg(alpha);
  for (int m = 0; m < rows; ++m) {
    for (int n = 0; n < cols; ++n) {
      // <m|D|n> = e^{-x/2} sqrt(n!/m!) alpha^{m-n} L_n^{(m-n)}(x)        (m >= n)
      //         = e^{-x/2} sqrt(m!/n!) (-alpha*)^{n-m} L_m^{(n-m)}(x)     (m <  n)
      const int lo = std::min(m, n);
      const int hi = std::max(m, n);
      const int k = hi - lo;
      const double log_mag =
          -0.5 * x + 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0)) + k * log_abs;
      const double lag = std::assoc_laguerre(static_cast<unsigned>(lo),
                                             static_cast<unsigned>(k), x);
      const double phase = m >= n ? k * arg : k * (std::numbers::pi - arg);
      out(m, n) = std::polar(std::exp(log_mag) * lag, phase);
    }
  }
  return out;
}

CMatrix displacement(Complex alpha, int cutoff, double deficit_tol) {
  if (cutoff < 2) throw InvalidInputError("cutoff must be >= 2, got " + std::to_string(cutoff));
  const double deficit = poisson_deficit(std::norm(alpha), cutoff);
  if (deficit > deficit_tol) {
    throw TruncationError("cutoff " + std::to_string(cutoff) +
                              " too small for displacement |alpha| = " +
                              std::to_string(std::abs(alpha)),
                          deficit);
  }
  return displacement_block(alpha, cutoff + 1, cutoff + 1);
}

double parity_from_populations(const RVector& populations) {
  double acc = 0.0;
  for (Eigen::Index n = 0; n < populations.size(); ++n)
    acc += (n % 2 == 0 ? 1.0 : -1.0) * populations[n];
  return acc;
}

double wigner_at(const FockDensity& rho, Complex alpha) {
  check_single_mode(rho.spec(), "wigner_at");
  const double scale = 2.0 / std::numbers::pi;
  if (alpha == Complex(0.0)) {
    return scale * parity_from_populations(mode_populations(rho, 0));
  }
  const int cols = static_cast<int>(rho.matrix().rows());
  const double r = std::abs(alpha);
  const int pad = static_cast<int>(std::ceil(r * r + 2.0 * r * std::sqrt(cols) + 10.0 * r + 10.0));
  const int rows = cols + pad;
  const CMatrix d = displacement_block(-alpha, rows, cols);
  const CMatrix shifted = d * rho.matrix() * d.adjoint();
  RVector pops(rows);
  for (int n = 0; n < rows; ++n) pops[n] = shifted(n, n).real();
  const double leak = rho.trace().real() - pops.sum();
  if (leak > rho.spec().deficit_tol) {
    throw TruncationError("displaced state leaks " + std::to_string(leak) +
                              " above the padded block",
                          leak);
  }
  return scale * parity_from_populations(pops);
}

std::vector<double> hermite_functions(double x, int nmax) {
  std::vector<double> psi(static_cast<std::size_t>(nmax) + 1, 0.0);
  psi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (nmax >= 1) psi[1] = std::numbers::sqrt2 * x * psi[0];
  for (int n = 1; n < nmax; ++n) {
    psi[n + 1] = std::sqrt(2.0 / (n + 1.0)) * x * psi[n] -
                 std::sqrt(static_cast<double>(n) / (n + 1.0)) * psi[n - 1];
  }
  return psi;
}

std::vector<double> position_pdf(const FockDensity& rho, double phase,
                                 std::span<const double> grid) {
  check_single_mode(rho.spec(), "position_pdf");
  const int nmax = static_cast<int>(rho.matrix().rows()) - 1;
  const CMatrix& r = rho.matrix();
  std::vector<double> out;
  out.reserve(grid.size());
  CVector u(nmax + 1);
  for (double x : grid) {
    const auto psi = hermite_functions(x, nmax);
    for (int n = 0; n <= nmax; ++n) u[n] = std::polar(psi[n], -n * phase);
    const Complex value = u.transpose() * r * u.conjugate();
    out.push_back(std::max(0.0, value.real()));
  }
  return out;
}

}  // namespace psq
