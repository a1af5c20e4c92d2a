#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "psq/code_space.hpp"

using namespace psq;

namespace {

ModeSpec small_spec(std::vector<double> s, int cutoff = 10) {
  ModeSpec spec = ModeSpec::uniform(std::move(s), cutoff);
  spec.deficit_tol = 1e-2;
  return spec;
}

// Plain loop over all photon tuples: weight of "mode j odd, others even".
double pattern_weight_loop(const CVector& amps, const ModeSpec& spec, std::size_t j) {
  const std::size_t m = spec.num_modes();
  double w = 0.0;
  for (Eigen::Index idx = 0; idx < amps.size(); ++idx) {
    std::size_t rest = static_cast<std::size_t>(idx);
    bool match = true;
    for (std::size_t t = m; t-- > 0;) {
      const std::size_t n = rest % spec.local_dim(t);
      rest /= spec.local_dim(t);
      if ((n % 2 == 1) != (t == j)) match = false;
    }
    if (match) w += std::norm(amps[idx]);
  }
  return w;
}

}  // namespace

TEST(BasisLabel, RejectsNonPositive) {
  EXPECT_THROW(BasisLabel(0), InvalidInputError);
  EXPECT_EQ(BasisLabel(3).mode(), 2u);
}

TEST(BasisState, Orthonormal) {
  const ModeSpec spec = small_spec({0.3, 0.5, 0.8});
  for (int a = 1; a <= 3; ++a) {
    for (int b = 1; b <= 3; ++b) {
      const Complex v = inner(basis_state(BasisLabel(a), spec), basis_state(BasisLabel(b), spec));
      EXPECT_NEAR(std::abs(v), a == b ? 1.0 : 0.0, 1e-14) << a << "," << b;
    }
  }
}

TEST(BasisState, ParityPattern) {
  const ModeSpec spec = small_spec({0.4, 0.4, 0.4});
  const FockVector b2 = basis_state(BasisLabel(2), spec);
  EXPECT_NEAR(parity_expectation(b2, 0), 1.0, 1e-14);
  EXPECT_NEAR(parity_expectation(b2, 1), -1.0, 1e-14);
  EXPECT_NEAR(parity_expectation(b2, 2), 1.0, 1e-14);
  EXPECT_NEAR(modified_parity_expectation(b2, 1), 1.0, 1e-14);
}

TEST(BasisState, UnsqueezedModeInfeasible) {
  EXPECT_THROW(basis_state(BasisLabel(2), small_spec({0.4, 0.0})), InfeasibleError);
  EXPECT_THROW(basis_state(BasisLabel(3), small_spec({0.4, 0.4})), InvalidInputError);
}

TEST(Encode, ParityGivesBornRule) {
  std::mt19937_64 rng(11);
  const ModeSpec spec = small_spec({0.2, 0.6, 0.7, 0.4}, 8);
  const auto gamma = QuditAmplitudes::normalize(oracle::random_complex(rng, 4));
  const FockVector psi = encode(gamma, spec);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-13);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_NEAR(modified_parity_expectation(psi, j), std::norm(gamma[j]), 1e-13);
    EXPECT_NEAR(parity_expectation(psi, j), 1 - 2 * std::norm(gamma[j]), 1e-13);
  }
}

TEST(Encode, ProbabilitiesDoNotDependOnSqueezing) {
  std::mt19937_64 rng(2);
  const auto gamma = QuditAmplitudes::normalize(oracle::random_complex(rng, 3));
  const ModeSpec a = small_spec({0.2, 0.2, 0.2});
  const ModeSpec b = small_spec({0.9, 0.1, 0.5});
  const auto ra = measure_J(encode(gamma, a));
  const auto rb = measure_J(encode(gamma, b));
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_NEAR(ra[j].probability, rb[j].probability, 1e-13);
    EXPECT_NEAR(ra[j].probability, std::norm(gamma[j]), 1e-13);
  }
}

TEST(MeasureJ, MatchesPatternLoopAndLeak) {
  std::mt19937_64 rng(3);
  const ModeSpec spec = small_spec({0.5, 0.5, 0.5}, 4);
  CVector amps = oracle::random_unit(rng, static_cast<int>(spec.dimension()));
  const FockVector psi(spec, amps);
  const auto out = measure_J(psi);
  ASSERT_EQ(out.size(), 4u);
  double total = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    ASSERT_FALSE(out[j].is_leak());
    EXPECT_EQ(out[j].label->value(), int(j) + 1);
    EXPECT_NEAR(out[j].probability, pattern_weight_loop(amps, spec, j), 1e-14);
    total += out[j].probability;
  }
  EXPECT_TRUE(out[3].is_leak());
  EXPECT_NEAR(out[3].probability, 1.0 - total, 1e-14);
  const auto dens = measure_J(FockDensity::from_pure(psi));
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(dens[j].probability, out[j].probability, 1e-14);
}

TEST(MeasureJ, NoLeakOnCodeSpace) {
  const ModeSpec spec = small_spec({0.5, 0.7});
  CVector g(2);
  g << Complex(0.6, 0.0), Complex(0.0, 0.8);
  const auto out = measure_J(encode(QuditAmplitudes(g), spec));
  EXPECT_NEAR(out[0].probability, 0.36, 1e-14);
  EXPECT_NEAR(out[1].probability, 0.64, 1e-14);
  EXPECT_NEAR(out[2].probability, 0.0, 1e-14);
}

TEST(CodeState, ModeLocalMatchesFull) {
  std::mt19937_64 rng(21);
  const ModeSpec spec = small_spec({0.3, 0.6, 0.45}, 8);
  const CMatrix chi = oracle::random_density(rng, 3, 2);
  const CodeState cs(chi, spec);
  const FockDensity full = cs.to_fock_density();
  EXPECT_NEAR(full.trace().real(), 1.0, 1e-13);
  for (std::size_t m = 0; m < 3; ++m) {
    const FockDensity red = cs.reduced_density(m);
    EXPECT_LT((red.matrix() - partial_trace(full, m).matrix()).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_NEAR(cs.modified_parity(m), modified_parity_expectation(full, m), 1e-13);
    EXPECT_NEAR(cs.modified_parity(m), chi(m, m).real(), 1e-13);
  }
  const auto local = cs.measure_J();
  const auto dense = measure_J(full);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(local[j].probability, dense[j].probability, 1e-13);
}

TEST(CodeState, PureMatchesEncode) {
  std::mt19937_64 rng(8);
  const ModeSpec spec = small_spec({0.3, 0.6});
  const auto gamma = QuditAmplitudes::normalize(oracle::random_complex(rng, 2));
  const CodeState cs = CodeState::pure(gamma, spec);
  EXPECT_LT((cs.to_fock_vector().amplitudes() - encode(gamma, spec).amplitudes()).norm(), 1e-14);
  EXPECT_LT((cs.chi() - gamma.values() * gamma.values().adjoint()).norm(), 1e-15);
}

TEST(CodeState, ManyModesWithoutFullSpace) {
  std::vector<double> s(64, 0.5);
  const ModeSpec spec = ModeSpec::automatic(s);
  CVector g = CVector::Constant(64, 1.0 / 8.0);
  const CodeState cs = CodeState::pure(QuditAmplitudes(g), spec);
  const auto out = cs.measure_J();
  for (std::size_t j = 0; j < 64; ++j) EXPECT_NEAR(out[j].probability, 1.0 / 64, 1e-12);
  EXPECT_NEAR(out[64].probability, 0.0, 1e-12);
  EXPECT_THROW(cs.to_fock_density(), DimensionError);
}

TEST(CodeState, RejectsChiOnUnsqueezedMode) {
  CMatrix chi = CMatrix::Zero(2, 2);
  chi(1, 1) = 1.0;
  EXPECT_THROW(CodeState(chi, small_spec({0.5, 0.0})), InfeasibleError);
  EXPECT_THROW(CodeState(CMatrix::Identity(3, 3) / 3.0, small_spec({0.5, 0.5})), InvalidInputError);
}

TEST(Fidelity, PureMixed) {
  std::mt19937_64 rng(4);
  const ModeSpec spec = small_spec({0.4, 0.4});
  const CMatrix chi = oracle::random_density(rng, 2, 2);
  const FockDensity rho = CodeState(chi, spec).to_fock_density();
  EXPECT_NEAR(fidelity_pure_mixed(basis_state(BasisLabel(1), spec), rho), chi(0, 0).real(), 1e-13);
  EXPECT_NEAR(fidelity_pure_mixed(basis_state(BasisLabel(2), spec), rho), chi(1, 1).real(), 1e-13);
}

TEST(Fidelity, UhlmannKnownCases) {
  std::mt19937_64 rng(6);
  const CMatrix rho = oracle::random_density(rng, 4, 3);
  EXPECT_NEAR(uhlmann_fidelity(rho, rho), 1.0, 1e-12);
  // Commuting diagonal states: (sum sqrt(p q))^2.
  CMatrix p = CMatrix::Zero(3, 3), q = CMatrix::Zero(3, 3);
  p.diagonal() << 0.5, 0.3, 0.2;
  q.diagonal() << 0.1, 0.6, 0.3;
  const double ref = std::pow(std::sqrt(0.05) + std::sqrt(0.18) + std::sqrt(0.06), 2);
  EXPECT_NEAR(uhlmann_fidelity(p, q), ref, 1e-12);
  EXPECT_NEAR(uhlmann_fidelity(q, p), ref, 1e-12);
  // Pure argument reduces to <psi|rho|psi>.
  const CVector psi = oracle::random_unit(rng, 4);
  EXPECT_NEAR(uhlmann_fidelity(psi * psi.adjoint(), rho), psi.dot(rho * psi).real(), 1e-12);
  CMatrix bad = p;
  bad(0, 0) = -0.5;
  EXPECT_THROW(uhlmann_fidelity(bad, q), InvalidInputError);
}

TEST(Fidelity, UhlmannOfDiagonalChiRows) {
  const std::vector<double> r1{0.972, 0.023, 0.001, 0.001};
  const std::vector<double> r2{0.031, 0.932, 0.032, 0.002};
  const ChiMatrix a = ChiMatrix::from_diagonal(r1, 1);
  const ChiMatrix b = ChiMatrix::from_diagonal(r2, 2);
  double ref = 0.0;
  for (int i = 0; i < 4; ++i) ref += std::sqrt(r1[i] / 0.997 * r2[i] / 0.997);
  EXPECT_NEAR(uhlmann_fidelity(a.matrix(), b.matrix()), ref * ref, 1e-12);
  EXPECT_NEAR(uhlmann_root(a.matrix(), b.matrix()), ref, 1e-12);
}
