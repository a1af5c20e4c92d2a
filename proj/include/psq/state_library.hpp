#pragma once

// Example qudit states and logical gates for M = 2^n modes read as n
// qubits. Basis label j (0-based) is the binary word of the qubit values,
// qubit 0 being the most significant bit; library BasisLabels are j + 1.

#include <string>
#include <vector>

#include "psq/subtraction.hpp"

namespace psq {

/// (|00> + |01> + |10> - |11>)/2.
QuditAmplitudes cluster_g2();
/// Uniform superposition of 8 labels with a minus sign on label 7.
QuditAmplitudes hypergraph_hyp3();
/// gamma_j = (-1)^bits_j / sqrt(M). Bits must be 0 or 1.
QuditAmplitudes fingerprint_state(const std::vector<int>& bits);

struct LogicalGate {
  std::string name;
  CMatrix matrix;            ///< 2^k x 2^k on the target qubits
  std::vector<int> targets;  ///< qubit indices, first is most significant

  static LogicalGate H(int qubit);
  /// diag(1, e^{i pi/4}).
  static LogicalGate T(int qubit);
  static LogicalGate CZ(int control, int target);
};

/// Applies the gate to the code-space amplitudes. Throws InvalidInputError
/// when M is not a power of two or a target is out of range.
QuditAmplitudes apply_logical_gate(const LogicalGate& gate, const QuditAmplitudes& gamma);

}  // namespace psq
