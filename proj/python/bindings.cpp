#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "psq/code_space.hpp"
#include "psq/harness.hpp"
#include "psq/noise.hpp"
#include "psq/protocols.hpp"
#include "psq/state_library.hpp"
#include "psq/subtraction.hpp"

namespace py = pybind11;
using namespace psq;

namespace {

ModeSpec make_spec(const std::vector<double>& squeezing, std::optional<int> cutoff, double deficit_tol) {
  ModeSpec spec = cutoff ? ModeSpec::uniform(squeezing, *cutoff) : ModeSpec::automatic(squeezing);
  spec.deficit_tol = deficit_tol;
  spec.validate();
  return spec;
}

py::dict outcome_dict(const std::vector<MeasurementOutcome>& outcomes) {
  py::dict d;
  for (const auto& o : outcomes) {
    if (o.is_leak()) {
      d["LEAK"] = o.probability;
    } else {
      d[py::int_(o.label->value())] = o.probability;
    }
  }
  return d;
}

py::dict result_dict(const ProtocolResult& r) {
  py::dict d;
  d["estimate"] = r.estimate;
  d["std_error"] = r.std_error;
  d["n_samples"] = r.n_samples;
  d["exact_value"] = r.exact_value;
  d["seed"] = r.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Photon-subtracted squeezed-state qudit encoding";

  py::register_exception<InvalidInputError>(m, "InvalidInputError", PyExc_ValueError);
  py::register_exception<TruncationError>(m, "TruncationError", PyExc_RuntimeError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);
  py::register_exception<ZeroWeightError>(m, "ZeroWeightError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_MemoryError);

  m.def("auto_cutoff", &auto_cutoff, py::arg("s"), py::arg("tail_tol") = kDefaultTailTol);

  m.def(
      "squeezed_vacuum",
      [](double s, int cutoff, double tol) { return squeezed_vacuum(s, cutoff, tol).amplitudes(); },
      py::arg("s"), py::arg("cutoff"), py::arg("deficit_tol") = kDefaultDeficitTol,
      "Fock amplitudes of the truncated squeezed vacuum.");
  m.def(
      "photon_subtracted_squeezed",
      [](double s, int cutoff, double tol) {
        return photon_subtracted_squeezed(s, cutoff, tol).amplitudes();
      },
      py::arg("s"), py::arg("cutoff"), py::arg("deficit_tol") = kDefaultDeficitTol);
  m.def(
      "quadrature_moment",
      [](const CVector& amps, int cutoff, int order) {
        return quadrature_moment(FockVector(ModeSpec::uniform({0.0}, cutoff), amps), 0, order);
      },
      py::arg("amplitudes"), py::arg("cutoff"), py::arg("order") = 2,
      "<q^order> of a single-mode state given by its Fock amplitudes.");

  m.def(
      "gamma_from_c",
      [](const CVector& c, const std::vector<double>& s, std::optional<int> cutoff, double tol) {
        return gamma_from_c(GateCoefficients::normalize(c), make_spec(s, cutoff, tol)).values();
      },
      py::arg("c"), py::arg("squeezing"), py::arg("cutoff") = py::none(),
      py::arg("deficit_tol") = kDefaultDeficitTol);
  m.def(
      "c_from_gamma",
      [](const CVector& g, const std::vector<double>& s, std::optional<int> cutoff, double tol) {
        return c_from_gamma(QuditAmplitudes::normalize(g), make_spec(s, cutoff, tol)).values();
      },
      py::arg("gamma"), py::arg("squeezing"), py::arg("cutoff") = py::none(),
      py::arg("deficit_tol") = kDefaultDeficitTol);
  m.def(
      "beta_encode", [](const CVector& x, Complex beta) { return beta_encode(x, beta).values(); },
      py::arg("x"), py::arg("beta"));

  m.def(
      "measure_J",
      [](const CVector& gamma, const std::vector<double>& s, std::optional<int> cutoff, double tol) {
        const ModeSpec spec = make_spec(s, cutoff, tol);
        return outcome_dict(CodeState::pure(QuditAmplitudes::normalize(gamma), spec).measure_J());
      },
      py::arg("gamma"), py::arg("squeezing"), py::arg("cutoff") = py::none(),
      py::arg("deficit_tol") = kDefaultDeficitTol,
      "Outcome probabilities of the J measurement on an encoded state.");

  m.def(
      "lossy_basis_fidelity",
      [](int j, const std::vector<double>& s, double tau, std::optional<int> cutoff, double tol) {
        return lossy_basis_fidelity(BasisLabel(j), make_spec(s, cutoff, tol), tau);
      },
      py::arg("j"), py::arg("squeezing"), py::arg("tau"), py::arg("cutoff") = py::none(),
      py::arg("deficit_tol") = kDefaultDeficitTol);
  m.def(
      "lossy_pair_fidelity",
      [](int j, int k, const std::vector<double>& s, double tau, std::optional<int> cutoff, double tol) {
        return lossy_pair_fidelity(BasisLabel(j), BasisLabel(k), make_spec(s, cutoff, tol), tau);
      },
      py::arg("j"), py::arg("k"), py::arg("squeezing"), py::arg("tau"), py::arg("cutoff") = py::none(),
      py::arg("deficit_tol") = kDefaultDeficitTol);
  m.def("cat_loss_fidelity", &cat_loss_fidelity, py::arg("alpha"), py::arg("tau"), py::arg("cutoff"));

  m.def(
      "scalar_product_terms",
      [](const CVector& y, const CVector& z) {
        return scalar_product_terms(QuditAmplitudes::normalize(y), QuditAmplitudes::normalize(z));
      },
      py::arg("y"), py::arg("z"));
  m.def(
      "scalar_product_sampled",
      [](const CVector& y, const CVector& z, std::int64_t n, std::uint64_t seed, unsigned threads) {
        py::list out;
        for (const auto& r : scalar_product_sampled(QuditAmplitudes::normalize(y),
                                                    QuditAmplitudes::normalize(z), n, seed,
                                                    threads ? threads : default_threads())) {
          out.append(result_dict(r));
        }
        return out;
      },
      py::arg("y"), py::arg("z"), py::arg("samples"), py::arg("seed"), py::arg("threads") = 0);

  m.def("predicted_variance_A", &predicted_variance_A, py::arg("x_norm_sq"), py::arg("beta"), py::arg("s1"));
  m.def("invert_norm", &invert_norm, py::arg("A"), py::arg("beta"), py::arg("s1"));
  m.def(
      "distance_exact",
      [](const CVector& y, const CVector& z, Complex beta, double s1) {
        return distance_exact(DistanceQuery{y, z, beta, s1, {}});
      },
      py::arg("y"), py::arg("z"), py::arg("beta") = Complex(1.0, 0.0), py::arg("s1") = 0.5);
  m.def(
      "distance_sampled",
      [](const CVector& y, const CVector& z, std::int64_t n, std::uint64_t seed, Complex beta, double s1,
         unsigned threads) {
        const DistanceResult r = distance_sampled(DistanceQuery{y, z, beta, s1, {}}, n, seed,
                                                    threads ? threads : default_threads());
        py::dict d = result_dict(r.result);
        d["a_measured"] = r.a_measured;
        d["a_exact"] = r.a_exact;
        return d;
      },
      py::arg("y"), py::arg("z"), py::arg("samples"), py::arg("seed"), py::arg("beta") = Complex(1.0, 0.0),
      py::arg("s1") = 0.5, py::arg("threads") = 0);

  m.def("cluster_g2", [] { return cluster_g2().values(); });
  m.def("hypergraph_hyp3", [] { return hypergraph_hyp3().values(); });
  m.def(
      "fingerprint_state", [](const std::vector<int>& bits) { return fingerprint_state(bits).values(); },
      py::arg("bits"));

  m.def(
      "run_config",
      [](const std::string& text) {
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(validate_config(text));
        }
        return py::make_tuple(r.exit_code, r.output, r.error);
      },
      py::arg("config_json"),
      "Runs a harness configuration given as JSON text. Returns (exit_code, output, error).");
}
