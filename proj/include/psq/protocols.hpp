#pragma once

// Classical-data protocols on the encoded states.
//
// Scalar product: two experiments prepare y and z; a coincidence of odd
// parity on mode k in both has probability |y_k|^2 |z_k|^2. Only magnitudes
// are recovered, phases are not.
//
// Distance: h = (beta, y - z)/norm is encoded and the q-variance of mode 1,
// A = e^{2 s1} (|beta|^2 / (|beta|^2 + |x|^2) + 1/2), is inverted for |x|^2.

#include <cstdint>
#include <vector>

#include "psq/code_space.hpp"
#include "psq/parallel.hpp"
#include "psq/subtraction.hpp"

namespace psq {

struct ProtocolResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  double exact_value = 0.0;
  std::uint64_t seed = 0;
};

struct DistanceQuery {
  CVector y;
  CVector z;
  Complex beta{1.0, 0.0};
  double s1 = 0.5;
  /// Squeezing of modes 2..M. Empty means every mode uses s1.
  std::vector<double> other_squeezing;

  /// Throws InvalidInputError on shape or parameter problems.
  void validate() const;
  /// Mode layout with automatic cutoffs.
  ModeSpec spec() const;
};

struct DistanceResult {
  ProtocolResult result;
  double a_measured = 0.0;
  double a_exact = 0.0;
};

/// Samples per Monte-Carlo batch. Fixed so that results do not depend on
/// the number of worker threads.
inline constexpr std::int64_t kBatchSize = 1 << 16;

/// Exact coincidence probabilities Pr(odd on mode k in both experiments),
/// from the code-space states. `spec` only fixes squeezing and cutoffs; the
/// answer does not depend on it.
std::vector<double> scalar_product_terms(const QuditAmplitudes& y, const QuditAmplitudes& z,
                                         const ModeSpec& spec);
std::vector<double> scalar_product_terms(const QuditAmplitudes& y, const QuditAmplitudes& z);

/// Per-k Monte-Carlo estimates with binomial standard errors.
std::vector<ProtocolResult> scalar_product_sampled(const QuditAmplitudes& y,
                                                   const QuditAmplitudes& z,
                                                   std::int64_t n_samples, std::uint64_t seed,
                                                   unsigned threads = default_threads());

double predicted_variance_A(double x_norm_sq, Complex beta, double s1);

/// |x|^2 = |beta|^2 (3 - 2u) / (2u - 1) with u = e^{-2 s1} A. Throws
/// InfeasibleError unless 1/2 < u <= 3/2.
double invert_norm(double A, Complex beta, double s1);

/// dA/d|x|^2 = -e^{2 s1} |beta|^2 / (|beta|^2 + |x|^2)^2.
double sensitivity(double x_norm_sq, Complex beta, double s1);

/// Exact <q_1^2> of the encoded state.
double distance_variance_exact(const DistanceQuery& query);
/// Sum |y_i - z_i|^2 recovered from the exact <q_1^2>.
double distance_exact(const DistanceQuery& query);

/// Homodyne samples of q_1 drawn by inverse CDF from the mode-1 density.
/// The sample variance is inverted; its standard error follows from the
/// sample fourth moment by the delta method. Requires n_samples >= 100.
/// Throws InfeasibleError when the sampled variance leaves u > 1/2.
DistanceResult distance_sampled(const DistanceQuery& query, std::int64_t n_samples,
                                std::uint64_t seed, unsigned threads = default_threads());

}  // namespace psq
