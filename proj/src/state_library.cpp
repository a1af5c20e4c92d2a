#include "psq/state_library.hpp"

#include <cmath>
#include <numbers>

namespace psq {

QuditAmplitudes cluster_g2() {
  CVector g(4);
  g << 0.5, 0.5, 0.5, -0.5;
  return QuditAmplitudes(g);
}

QuditAmplitudes hypergraph_hyp3() {
  CVector g = CVector::Constant(8, 1.0 / std::sqrt(8.0));
  g[7] = -g[7];
  return QuditAmplitudes(g);
}

QuditAmplitudes fingerprint_state(const std::vector<int>& bits) {
  if (bits.empty()) throw InvalidInputError("bits: need at least one bit");
  const double amp = 1.0 / std::sqrt(static_cast<double>(bits.size()));
  CVector g(static_cast<Eigen::Index>(bits.size()));
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] != 0 && bits[j] != 1) throw InvalidInputError("bits: entries must be 0 or 1");
    g[static_cast<Eigen::Index>(j)] = bits[j] ? -amp : amp;
  }
  return QuditAmplitudes(g);
}

LogicalGate LogicalGate::H(int qubit) {
  CMatrix m(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  m << r, r, r, -r;
  return {"H", m, {qubit}};
}

LogicalGate LogicalGate::T(int qubit) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = std::polar(1.0, std::numbers::pi / 4.0);
  return {"T", m, {qubit}};
}

LogicalGate LogicalGate::CZ(int control, int target) {
  CMatrix m = CMatrix::Identity(4, 4);
  m(3, 3) = -1.0;
  return {"CZ", m, {control, target}};
}

QuditAmplitudes apply_logical_gate(const LogicalGate& gate, const QuditAmplitudes& gamma) {
  const std::size_t dim = gamma.size();
  if ((dim & (dim - 1)) != 0 || dim < 2) {
    throw InvalidInputError("logical gates need M = 2^n modes, got M = " + std::to_string(dim));
  }
  int qubits = 0;
  while ((std::size_t{1} << qubits) < dim) ++qubits;
  const auto k = gate.targets.size();
  if (k == 0 || gate.matrix.rows() != (1 << k) || gate.matrix.cols() != (1 << k)) {
    throw InvalidInputError("gate " + gate.name + ": matrix does not match its targets");
  }
  std::vector<std::size_t> masks;
  for (int q : gate.targets) {
    if (q < 0 || q >= qubits) {
      throw InvalidInputError("gate " + gate.name + ": qubit " + std::to_string(q) +
                              " outside 0.." + std::to_string(qubits - 1));
    }
    const std::size_t mask = std::size_t{1} << (qubits - 1 - q);
    for (std::size_t other : masks) {
      if (other == mask) throw InvalidInputError("gate " + gate.name + ": repeated target");
    }
    masks.push_back(mask);
  }
  std::size_t all = 0;
  for (std::size_t mask : masks) all |= mask;

  const CVector& in = gamma.values();
  CVector out = CVector::Zero(in.size());
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & all) continue;
    // Local index r: bit (k-1-t) of r is the value of target t.
    std::vector<std::size_t> index(std::size_t{1} << k);
    for (std::size_t r = 0; r < index.size(); ++r) {
      std::size_t full = base;
      for (std::size_t t = 0; t < k; ++t) {
        if (r & (std::size_t{1} << (k - 1 - t))) full |= masks[t];
      }
      index[r] = full;
    }
    for (std::size_t r = 0; r < index.size(); ++r) {
      Complex acc = 0.0;
      for (std::size_t c = 0; c < index.size(); ++c) {
        acc += gate.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
               in[static_cast<Eigen::Index>(index[c])];
      }
      out[static_cast<Eigen::Index>(index[r])] = acc;
    }
  }
  return QuditAmplitudes(out);
}

}  // namespace psq
