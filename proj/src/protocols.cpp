#include "psq/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace psq {

namespace {

constexpr int kGridPoints = 4096;
constexpr double kGridHalfWidth = 8.0;
// Rounding slack on the upper edge of the invertible window.
constexpr double kWindowSlack = 1e-9;

std::string window_message(double A, double s1) {
  const double e2s = std::exp(2.0 * s1);
  return "measured variance A = " + std::to_string(A) + " outside the invertible window (" +
         std::to_string(0.5 * e2s) + ", " + std::to_string(1.5 * e2s) + "]";
}

double inverse_formula(double u, Complex beta) {
  return std::norm(beta) * (3.0 - 2.0 * u) / (2.0 * u - 1.0);
}

std::vector<double> cumulative(const QuditAmplitudes& v) {
  std::vector<double> cum(v.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    acc += std::norm(v[k]);
    cum[k] = acc;
  }
  return cum;
}

std::size_t draw(const std::vector<double>& cum, double u) {
  const auto it = std::upper_bound(cum.begin(), cum.end(), u * cum.back());
  return std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
}

std::int64_t batch_count(std::int64_t n) { return (n + kBatchSize - 1) / kBatchSize; }

std::int64_t batch_length(std::int64_t n, std::int64_t b) {
  return std::min(kBatchSize, n - b * kBatchSize);
}

}  // namespace

// ------------------------------------------------------------ scalar product

std::vector<double> scalar_product_terms(const QuditAmplitudes& y, const QuditAmplitudes& z,
                                         const ModeSpec& spec) {
  if (y.size() != z.size()) throw InvalidInputError("y and z must have equal length");
  if (y.size() != spec.num_modes()) {
    throw InvalidInputError("spec must have one mode per vector component");
  }
  const CodeState sy = CodeState::pure(y, spec);
  const CodeState sz = CodeState::pure(z, spec);
  std::vector<double> terms(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    terms[k] = sy.modified_parity(k) * sz.modified_parity(k);
  }
  return terms;
}

std::vector<double> scalar_product_terms(const QuditAmplitudes& y, const QuditAmplitudes& z) {
  return scalar_product_terms(y, z, ModeSpec::automatic(std::vector<double>(y.size(), 0.5)));
}

std::vector<ProtocolResult> scalar_product_sampled(const QuditAmplitudes& y,
                                                   const QuditAmplitudes& z,
                                                   std::int64_t n_samples, std::uint64_t seed,
                                                   unsigned threads) {
  if (y.size() != z.size()) throw InvalidInputError("y and z must have equal length");
  if (n_samples < 1) throw InvalidInputError("samples must be >= 1");
  const std::size_t m = y.size();
  const auto cum_y = cumulative(y);
  const auto cum_z = cumulative(z);
  const std::int64_t batches = batch_count(n_samples);
  std::vector<std::vector<std::int64_t>> counts(static_cast<std::size_t>(batches),
                                                std::vector<std::int64_t>(m, 0));
  parallel_for(static_cast<std::size_t>(batches), threads, [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(seed, b));
    auto& local = counts[b];
    const std::int64_t len = batch_length(n_samples, static_cast<std::int64_t>(b));
    for (std::int64_t i = 0; i < len; ++i) {
      // The subtraction location fixes every parity: only mode k is odd.
      const std::size_t ky = draw(cum_y, uniform01(rng));
      const std::size_t kz = draw(cum_z, uniform01(rng));
      if (ky == kz) ++local[ky];
    }
  });
  std::vector<ProtocolResult> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::int64_t hits = 0;
    for (const auto& local : counts) hits += local[k];
    const double p = static_cast<double>(hits) / static_cast<double>(n_samples);
    out[k].estimate = p;
    out[k].std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples));
    out[k].n_samples = n_samples;
    out[k].exact_value = std::norm(y[k]) * std::norm(z[k]);
    out[k].seed = seed;
  }
  return out;
}

// ------------------------------------------------------------------ distance

double predicted_variance_A(double x_norm_sq, Complex beta, double s1) {
  const double b2 = std::norm(beta);
  if (!(b2 + x_norm_sq > 0.0)) throw InvalidInputError("|beta|^2 + |x|^2 must be positive");
  return std::exp(2.0 * s1) * (b2 / (b2 + x_norm_sq) + 0.5);
}

double invert_norm(double A, Complex beta, double s1) {
  if (beta == Complex(0.0)) throw InvalidInputError("beta must be non-zero");
  const double u = std::exp(-2.0 * s1) * A;
  if (!(u > 0.5 && u <= 1.5 + kWindowSlack)) throw InfeasibleError(window_message(A, s1));
  return inverse_formula(u, beta);
}

double sensitivity(double x_norm_sq, Complex beta, double s1) {
  const double b2 = std::norm(beta);
  const double d = b2 + x_norm_sq;
  if (!(d > 0.0)) throw InvalidInputError("|beta|^2 + |x|^2 must be positive");
  return -std::exp(2.0 * s1) * b2 / (d * d);
}

void DistanceQuery::validate() const {
  if (y.size() != z.size()) throw InvalidInputError("y and z must have equal length");
  if (y.size() == 0) throw InvalidInputError("y and z must be non-empty");
  if (beta == Complex(0.0)) {
    throw InvalidInputError("beta must be non-zero, otherwise A does not depend on x");
  }
  if (!(s1 != 0.0) || !std::isfinite(s1)) throw InvalidInputError("s1 must be finite and non-zero");
  if (!other_squeezing.empty() && other_squeezing.size() != static_cast<std::size_t>(y.size())) {
    throw InvalidInputError("squeezing: expected " + std::to_string(y.size()) +
                            " values for modes 2..M");
  }
}

ModeSpec DistanceQuery::spec() const {
  validate();
  std::vector<double> squeezing{s1};
  if (other_squeezing.empty()) {
    squeezing.resize(static_cast<std::size_t>(y.size()) + 1, s1);
  } else {
    squeezing.insert(squeezing.end(), other_squeezing.begin(), other_squeezing.end());
  }
  return ModeSpec::automatic(std::move(squeezing));
}

namespace {

FockDensity mode_one_density(const DistanceQuery& query) {
  const ModeSpec spec = query.spec();
  const QuditAmplitudes h = beta_encode(query.y - query.z, query.beta);
  return CodeState::pure(h, spec).reduced_density(0);
}

}  // namespace

double distance_variance_exact(const DistanceQuery& query) {
  return quadrature_moment(mode_one_density(query), 0, 2);
}

double distance_exact(const DistanceQuery& query) {
  return invert_norm(distance_variance_exact(query), query.beta, query.s1);
}

DistanceResult distance_sampled(const DistanceQuery& query, std::int64_t n_samples,
                                std::uint64_t seed, unsigned threads) {
  if (n_samples < 100) throw InvalidInputError("samples must be >= 100");
  const FockDensity rho = mode_one_density(query);
  const double mean = quadrature_moment(rho, 0, 1);
  const double a_exact = quadrature_moment(rho, 0, 2);
  const double sigma = std::sqrt(std::max(a_exact - mean * mean, 1e-300));

  std::vector<double> grid(kGridPoints);
  const double lo = mean - kGridHalfWidth * sigma;
  const double step = 2.0 * kGridHalfWidth * sigma / (kGridPoints - 1);
  for (int i = 0; i < kGridPoints; ++i) grid[i] = lo + step * i;
  const std::vector<double> pdf = position_pdf(rho, 0.0, grid);
  std::vector<double> cdf(kGridPoints, 0.0);
  for (int i = 1; i < kGridPoints; ++i) cdf[i] = cdf[i - 1] + 0.5 * step * (pdf[i - 1] + pdf[i]);
  const double total = cdf.back();
  for (double& c : cdf) c /= total;

  struct Sums {
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  };
  const std::int64_t batches = batch_count(n_samples);
  std::vector<Sums> partial(static_cast<std::size_t>(batches));
  parallel_for(static_cast<std::size_t>(batches), threads, [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(seed, b));
    Sums acc;
    const std::int64_t len = batch_length(n_samples, static_cast<std::int64_t>(b));
    for (std::int64_t i = 0; i < len; ++i) {
      const double u = uniform01(rng);
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      const auto hi = std::clamp<std::ptrdiff_t>(it - cdf.begin(), 1, kGridPoints - 1);
      const double c0 = cdf[hi - 1], c1 = cdf[hi];
      const double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
      const double q = grid[hi - 1] + frac * step;
      const double q2 = q * q;
      acc.s1 += q;
      acc.s2 += q2;
      acc.s4 += q2 * q2;
    }
    partial[b] = acc;
  });
  Sums sums;
  for (const Sums& p : partial) {
    sums.s1 += p.s1;
    sums.s2 += p.s2;
    sums.s4 += p.s4;
  }
  const double n = static_cast<double>(n_samples);
  const double m1 = sums.s1 / n;
  const double m2 = sums.s2 / n;
  const double a_hat = m2 - m1 * m1;
  const double var_q2 = std::max(sums.s4 / n - m2 * m2, 0.0);
  const double se_a = std::sqrt(var_q2 / n);

  const double e = std::exp(-2.0 * query.s1);
  const double u = e * a_hat;
  // Sampling noise may push u past 3/2; only the lower edge is a pole.
  if (!(u > 0.5)) throw InfeasibleError(window_message(a_hat, query.s1));
  const double derivative = 4.0 * std::norm(query.beta) * e / ((2.0 * u - 1.0) * (2.0 * u - 1.0));

  DistanceResult out;
  out.result.estimate = inverse_formula(u, query.beta);
  out.result.std_error = derivative * se_a;
  out.result.n_samples = n_samples;
  out.result.exact_value = invert_norm(a_exact, query.beta, query.s1);
  out.result.seed = seed;
  out.a_measured = a_hat;
  out.a_exact = a_exact;
  return out;
}

}  // namespace psq
