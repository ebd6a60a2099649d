#pragma once

// Dressed phonons B = a^dag b_g^dag b_e / sqrt(N Delta) on the three-mode
// (N, Delta) sector, where the r.f. field is a quantized photon mode.

#include <vector>

#include "qphonon/dynamics.hpp"
#include "qphonon/gardiner.hpp"

namespace qphonon {

struct DressedAlgebra {
  SectorPtr sector;
  double eta = 0.0;   // 1/N
  double eta0 = 0.0;  // 1/Delta
  double q_d = 0.0;   // 1 - 2 (eta + eta0)
  OperatorMatrix lower;  // B
  OperatorMatrix raise;  // B^dag
  OperatorMatrix excited_number;

  PhononOperators phonons() const { return {lower, raise, excited_number}; }
};

/// Throws std::invalid_argument unless the sector is three-mode with
/// N, Delta >= 1; InvariantViolation if adjointness or the exact commutator
///   [B, B^dag] = 1 - 2 (eta0 + eta) N_e + eta0 eta (3 N_e^2 - N_e)
/// fails at kExactTolerance.
DressedAlgebra make_dressed(const SectorPtr& sector);

AlgebraReport verify_dressed(const DressedAlgebra& algebra);

struct DressedParams {
  int n_total = 1;
  int delta = 1;
  double omega_e = 1.0;
  double omega_g = 0.0;
  double omega_0 = 0.0;
  double g = 0.0;

  double omega_delta() const { return omega_e - omega_g - omega_0; }
  double mu_d() const;
  /// Fixes g so that g sqrt(N Delta) = mu_d.
  static DressedParams with_mu_d(int n_total, int delta, double mu_d, double omega_e, double omega_g = 0.0,
                                 double omega_0 = 0.0);
  void validate() const;
};

/// omega_e N_e + omega_g N_g + omega_0 N_0 + g (a^dag b_g^dag b_e + h.c.)
OperatorMatrix dressed_hamiltonian(const DressedParams& params, const SectorPtr& sector);
/// omega_g N + omega_0 Delta + omega_delta N_e + mu_d (B + B^dag)
OperatorMatrix dressed_hamiltonian(const DressedParams& params, const DressedAlgebra& algebra);

/// Exact evolution from |n_0 = Delta, n_e = 0, n_g = N> on the three-mode
/// sector, next to the two-mode perturbative machinery run with
/// (omega_e, mu, eta) -> (omega_delta, mu_d, eta + eta0).
RunAnalysis dressed_first_order(const DressedParams& params, const std::vector<double>& time_grid, RaiseSign sign,
                                const EvolveOptions& evolve_options = {},
                                const QuadratureOptions& quad_options = {});

}  // namespace qphonon
