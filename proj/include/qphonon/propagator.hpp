#pragma once

// Fixed-step fourth-order propagation of i d/dt |psi> = H(t) |psi> for
// Hamiltonians of the form H(t) = D + V(t), D static and diagonal.
//
// The diagonal part is integrated exactly (interaction picture); V_I(t) is
// stepped with the two-point Gauss-Legendre Magnus expansion,
//   K = h/2 (V1 + V2) - i sqrt(3)/12 h^2 [V2, V1],
// and exp(-iK) is applied to the state by a scaled Taylor series truncated at
// machine precision. K is never formed; only products K v are.

#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>

#include "qphonon/fock.hpp"

namespace qphonon {

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

class PropagatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DriveTerm {
  SparseMatrix op;
  std::function<Complex(double)> coefficient;
};

/// D + sum_k c_k(t) O_k. The terms must add up to a Hermitian matrix at
/// every t; callers pass each off-diagonal block together with its adjoint.
struct DrivenHamiltonian {
  SectorPtr sector;
  Eigen::VectorXd diagonal;
  std::vector<DriveTerm> drive;

  SparseMatrix drive_at(double t) const;
  OperatorMatrix at(double t) const;
};

SparseMatrix to_sparse(const OperatorMatrix& op);

struct PropagatorOptions {
  double max_step = 0.02;
  double norm_tolerance = 1e-8;
};

struct Trajectory {
  std::vector<double> time_grid;
  std::vector<StateVector> states;
  double step = 0.0;       // largest sub-step actually used
  double norm_drift = 0.0; // max | ||psi|| - 1 | over the grid
};

/// `initial` is the state at time_grid.front(). Throws PropagatorError if
/// the norm drifts by more than options.norm_tolerance; the message names the
/// time and the step.
Trajectory propagate(const DrivenHamiltonian& hamiltonian, const StateVector& initial,
                     const std::vector<double>& time_grid, const PropagatorOptions& options = {});

struct ConvergenceGate {
  std::vector<OperatorMatrix> observables;  // Hermitian
  double tolerance = 1e-8;
  int max_halvings = 8;
};

struct ConvergedTrajectory {
  Trajectory trajectory;          // the finer of the last two runs
  double halving_change = 0.0;    // max change in any <O> or Var(O) on the last halving
  int halvings = 0;
  bool converged = false;
};

/// Halves max_step until one more halving moves every expectation and
/// variance of the gate observables by less than gate.tolerance.
ConvergedTrajectory propagate_converged(const DrivenHamiltonian& hamiltonian, const StateVector& initial,
                                        const std::vector<double>& time_grid, const ConvergenceGate& gate,
                                        PropagatorOptions options = {});

}  // namespace qphonon
