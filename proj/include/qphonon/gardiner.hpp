#pragma once

// Number-conserving phonon operators b = b_g^dag b_e / sqrt(N) on the two-mode
// sector V^N, the q-deformed constants derived from them, and residual checks
// for every identity the finite representation satisfies.

#include <string>
#include <vector>

#include "json.hpp"
#include "qphonon/fock.hpp"

namespace qphonon {

/// One checked identity: max-entry (or norm) residual against its tolerance.
struct IdentityResidual {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;

  bool pass() const { return value <= tolerance; }
};

struct AlgebraReport {
  std::vector<IdentityResidual> residuals;

  bool all_pass() const;
  const IdentityResidual& find(const std::string& name) const;
  /// Flat {prefix + name: {residual, tolerance, pass}} map.
  void append_to(nlohmann::json& out, const std::string& prefix) const;
};

inline constexpr double kExactTolerance = 1e-12;
inline constexpr double kConstructionTolerance = 1e-10;

/// Ladder, number and phonon operators shared by the plain and dressed
/// algebras; this is what observable extraction consumes.
struct PhononOperators {
  OperatorMatrix lower;
  OperatorMatrix raise;
  OperatorMatrix excited_number;
};

struct GardinerAlgebra {
  SectorPtr sector;
  double eta = 0.0;
  double q = 0.0;
  OperatorMatrix lower;  // b
  OperatorMatrix raise;  // b^dag
  OperatorMatrix h;      // I - (2/N) N_e
  OperatorMatrix excited_number;

  int n_total() const { return sector->n_total(); }
  PhononOperators phonons() const { return {lower, raise, excited_number}; }
};

/// Builds b, b^dag and h on a two-mode sector and verifies adjointness, the
/// exact commutator, the su(2) relations and both ladder endpoints. Throws
/// std::invalid_argument for N = 0 or a three-mode sector, and
/// InvariantViolation if any residual exceeds kExactTolerance.
GardinerAlgebra make_algebra(const SectorPtr& sector);

/// f(x; eta) = sqrt(1 + 2(1 - 2x) eta + eta^2) - eta with the principal root.
/// Throws std::domain_error on a negative radicand.
double f_function(double x, double eta);

/// f evaluated on the root branch that matches [b, b^dag]: the radicand equals
/// (1 + eta - 2 eta n_e)^2, whose square root changes sign once n_e passes
/// (N + 1) / 2. `upper_branch` selects the negative root.
double f_function_branch(double x, double eta, bool upper_branch);

/// <n> = n - n(n-1) eta; equal to n (N - n + 1) / N when eta = 1/N.
double q_number(int n, double eta);
double q_factorial(int n, double eta);

/// (b^dag)^n |0> / sqrt(<n>!). Throws std::out_of_range unless 0 <= n <= N.
StateVector q_fock_state(const GardinerAlgebra& algebra, int n);

AlgebraReport verify_algebra(const GardinerAlgebra& algebra);

/// Quadratures X1 = (b + b^dag)/sqrt2, X2 = (b - b^dag)/(i sqrt2).
OperatorMatrix quadrature_x1(const PhononOperators& ops);
OperatorMatrix quadrature_x2(const PhononOperators& ops);

}  // namespace qphonon
