#pragma once

// Pre-detection loss: every mode is mixed with vacuum on a beam splitter of
// transmittivity tau and the ancilla is traced out. The single-mode channel
// has Kraus operators <n-k|K_k|n> = sqrt(C(n,k) tau^(n-k) (1-tau)^k).

#include <vector>

#include "psq/code_space.hpp"
#include "psq/fock.hpp"

namespace psq {

/// Throws InvalidInputError unless 0 <= tau <= 1.
void check_transmittivity(double tau);

/// K_0 .. K_cutoff for one mode.
std::vector<CMatrix> loss_kraus_operators(int cutoff, double tau);

FockDensity loss_single(const FockDensity& rho, double tau);
/// Same single-mode channel applied to every mode.
FockDensity loss_multi(const FockDensity& rho, double tau);
FockDensity loss_multi(const FockVector& psi, double tau);

/// <f|L(|f><f|)|f> = sum_k |<f|K_k|f>|^2 for a normalized single-mode state.
double pure_loss_fidelity(const CVector& f, double tau);

/// <j|L(|j><j|)|j> as a product of single-mode fidelities. A mode with
/// s = 0 uses the |1> limit of the photon-subtracted factor.
double lossy_basis_fidelity(BasisLabel j, const ModeSpec& spec, double tau);
/// Same quantity evaluated on the full tensor space.
double lossy_basis_fidelity_full(BasisLabel j, const ModeSpec& spec, double tau);

/// Uhlmann fidelity of L(|j><j|) and L(|k><k|). Only modes j and k differ,
/// so the result is F(L(ps_j), L(s_j)) F(L(s_k), L(ps_k)).
double lossy_pair_fidelity(BasisLabel j, BasisLabel k, const ModeSpec& spec, double tau);
double lossy_pair_fidelity_full(BasisLabel j, BasisLabel k, const ModeSpec& spec, double tau);

struct CatSpec {
  Complex alpha;
  int cutoff;
  double deficit_tol = kDefaultDeficitTol;
};

/// Cutoff at which the coherent component |alpha> is resolved.
int cat_cutoff(double alpha_abs);

/// Squared norm of the truncated |alpha> + |-alpha>.
double cat_norm_squared(const CatSpec& spec);
/// Normalized even cat state. Throws TruncationError when |alpha> leaks
/// more than deficit_tol above the cutoff.
FockVector cat_state(const CatSpec& spec);

/// Fidelity of the even cat with its lossy image.
double cat_loss_fidelity(Complex alpha, double tau, int cutoff);

}  // namespace psq
