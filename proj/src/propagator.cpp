#include "qphonon/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qphonon/quadrature.hpp"

namespace qphonon {

namespace {

const double kGaussOffset = std::sqrt(3.0) / 6.0;
const double kMagnusCommutator = std::sqrt(3.0) / 12.0;

double inf_norm(const SparseMatrix& m) {
  double best = 0.0;
  for (int r = 0; r < m.outerSize(); ++r) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) row += std::abs(it.value());
    best = std::max(best, row);
  }
  return best;
}

class Stepper {
 public:
  explicit Stepper(const DrivenHamiltonian& h) : h_(h) {}

  SparseMatrix interaction_drive(double t) const {
    SparseMatrix v = h_.drive_at(t);
    for (int r = 0; r < v.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(v, r); it; ++it) {
        const double gap = h_.diagonal(it.row()) - h_.diagonal(it.col());
        it.valueRef() *= std::exp(kI * (gap * t));
      }
    }
    return v;
  }

  // phi <- exp(-i K) phi for the Magnus exponent of [t, t + dt].
  void step(Vector& phi, double t, double dt) const {
    const SparseMatrix v1 = interaction_drive(t + (0.5 - kGaussOffset) * dt);
    const SparseMatrix v2 = interaction_drive(t + (0.5 + kGaussOffset) * dt);
    const double n1 = inf_norm(v1);
    const double n2 = inf_norm(v2);
    const double bound = 0.5 * dt * (n1 + n2) + 2.0 * kMagnusCommutator * dt * dt * n1 * n2;
    if (bound == 0.0) return;

    const int pieces = std::max(1, static_cast<int>(std::ceil(bound)));
    const Complex linear = 0.5 * dt / pieces;
    const Complex quadratic = -kI * kMagnusCommutator * dt * dt / static_cast<double>(pieces);
    auto minus_i_k = [&](const Vector& x) -> Vector {
      const Vector a = v1 * x;
      const Vector b = v2 * x;
      Vector kx = linear * (a + b) + quadratic * (v2 * a - v1 * b);
      return -kI * kx;
    };

    for (int p = 0; p < pieces; ++p) {
      Vector term = phi;
      Vector sum = phi;
      for (int k = 1; k <= 60; ++k) {
        term = minus_i_k(term) / static_cast<double>(k);
        sum += term;
        if (term.norm() <= 1e-17 * sum.norm()) break;
      }
      phi = std::move(sum);
    }
  }

  Vector to_schrodinger(const Vector& phi, double t) const {
    Vector psi(phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) psi(i) = std::exp(-kI * (h_.diagonal(i) * t)) * phi(i);
    return psi;
  }

  Vector to_interaction(const Vector& psi, double t) const {
    Vector phi(psi.size());
    for (Eigen::Index i = 0; i < psi.size(); ++i) phi(i) = std::exp(kI * (h_.diagonal(i) * t)) * psi(i);
    return phi;
  }

 private:
  const DrivenHamiltonian& h_;
};

}  // namespace

SparseMatrix DrivenHamiltonian::drive_at(double t) const {
  const int dim = sector->dimension();
  SparseMatrix out(dim, dim);
  for (const auto& term : drive) {
    const Complex c = term.coefficient(t);
    if (c != Complex(0.0)) out += c * term.op;
  }
  out.prune(Complex(0.0));
  return out;
}

OperatorMatrix DrivenHamiltonian::at(double t) const {
  OperatorMatrix op{sector, Matrix(drive_at(t))};
  op.entries.diagonal() += diagonal.cast<Complex>();
  return op;
}

SparseMatrix to_sparse(const OperatorMatrix& op) {
  SparseMatrix s = op.entries.sparseView();
  s.prune(Complex(0.0));
  return s;
}

Trajectory propagate(const DrivenHamiltonian& hamiltonian, const StateVector& initial,
                     const std::vector<double>& time_grid, const PropagatorOptions& options) {
  require_time_grid(time_grid);
  require_same_sector(*hamiltonian.sector, *initial.sector);
  if (!(options.max_step > 0.0)) throw std::invalid_argument("max_step must be positive");
  if (hamiltonian.diagonal.size() != hamiltonian.sector->dimension()) {
    throw std::invalid_argument("diagonal length does not match the sector");
  }

  const Stepper stepper(hamiltonian);
  Trajectory out;
  out.time_grid = time_grid;
  out.states.reserve(time_grid.size());

  const double initial_norm = initial.norm();
  Vector phi = stepper.to_interaction(initial.amplitudes, time_grid.front());
  out.states.push_back(initial);

  for (std::size_t k = 1; k < time_grid.size(); ++k) {
    const double left = time_grid[k - 1];
    const double span = time_grid[k] - left;
    const int substeps = std::max(1, static_cast<int>(std::ceil(span / options.max_step - 1e-12)));
    const double dt = span / substeps;
    out.step = std::max(out.step, dt);
    for (int s = 0; s < substeps; ++s) stepper.step(phi, left + s * dt, dt);

    StateVector state{initial.sector, stepper.to_schrodinger(phi, time_grid[k])};
    const double drift = std::abs(state.norm() - initial_norm);
    out.norm_drift = std::max(out.norm_drift, drift);
    if (drift > options.norm_tolerance) {
      std::ostringstream msg;
      msg << "norm drift " << drift << " at t = " << time_grid[k] << " with step " << dt
          << "; reduce max_step";
      throw PropagatorError(msg.str());
    }
    out.states.push_back(std::move(state));
  }
  return out;
}

ConvergedTrajectory propagate_converged(const DrivenHamiltonian& hamiltonian, const StateVector& initial,
                                        const std::vector<double>& time_grid, const ConvergenceGate& gate,
                                        PropagatorOptions options) {
  auto measure = [&](const Trajectory& traj) {
    std::vector<double> values;
    for (const auto& state : traj.states) {
      for (const auto& op : gate.observables) {
        values.push_back(expectation(state, op).real());
        values.push_back(variance(state, op));
      }
    }
    return values;
  };

  ConvergedTrajectory out;
  Trajectory coarse = propagate(hamiltonian, initial, time_grid, options);
  std::vector<double> coarse_values = measure(coarse);
  for (int halving = 1; halving <= gate.max_halvings; ++halving) {
    options.max_step = 0.5 * options.max_step;
    Trajectory fine = propagate(hamiltonian, initial, time_grid, options);
    const std::vector<double> fine_values = measure(fine);
    double change = 0.0;
    for (std::size_t i = 0; i < fine_values.size(); ++i) {
      change = std::max(change, std::abs(fine_values[i] - coarse_values[i]));
    }
    out.trajectory = std::move(fine);
    out.halving_change = change;
    out.halvings = halving;
    if (change < gate.tolerance) {
      out.converged = true;
      return out;
    }
    coarse_values = fine_values;
  }
  return out;
}

}  // namespace qphonon
