#include "qphonon/dressed.hpp"

#include <cmath>
#include <stdexcept>

namespace qphonon {

DressedAlgebra make_dressed(const SectorPtr& sector) {
  if (!sector->has_photon()) throw std::invalid_argument("dressed phonons need a three-mode sector");
  if (sector->n_total() < 1 || *sector->delta() < 1) {
    throw std::invalid_argument("dressed phonons need N >= 1 and Delta >= 1");
  }
  DressedAlgebra alg;
  alg.sector = sector;
  alg.eta = 1.0 / sector->n_total();
  alg.eta0 = 1.0 / *sector->delta();
  alg.q_d = 1.0 - 2.0 * (alg.eta + alg.eta0);
  const double norm = 1.0 / std::sqrt(static_cast<double>(sector->n_total()) * *sector->delta());
  alg.lower = norm * transfer_operator(sector, TransferKind::dressed_lower);
  alg.raise = norm * transfer_operator(sector, TransferKind::dressed_raise);
  alg.excited_number = number_operator(sector, Mode::excited);

  const auto report = verify_dressed(alg);
  for (const char* name : {"adjoint", "commutator_exact"}) {
    const auto& r = report.find(name);
    if (!r.pass()) {
      throw InvariantViolation("dressed algebra on " + sector->describe() + ": " + r.name + " residual " +
                               std::to_string(r.value));
    }
  }
  return alg;
}

AlgebraReport verify_dressed(const DressedAlgebra& alg) {
  AlgebraReport report;
  const auto& sector = alg.sector;
  const int dim = sector->dimension();
  const double eta_sum = alg.eta + alg.eta0;
  const double eta_prod = alg.eta * alg.eta0;

  report.residuals.push_back({"adjoint", max_entry_deviation(alg.raise, adjoint(alg.lower)), 0.0});

  const auto comm = commutator(alg.lower, alg.raise);
  OperatorMatrix closed = zero_operator(sector);
  double second_order = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double n = i;
    closed.entries(i, i) = 1.0 - 2.0 * eta_sum * n + eta_prod * (3.0 * n * n - n);
    // Distance from the q_d (first-order) eigenvalue is the eta eta0 term itself.
    const double first_order_gap = std::abs(comm.entries(i, i).real() - (1.0 - 2.0 * eta_sum * n));
    second_order = std::max(second_order, std::abs(first_order_gap - eta_prod * n * (3.0 * n - 1.0)));
  }
  report.residuals.push_back({"commutator_exact", max_entry_deviation(comm, closed), kExactTolerance});
  report.residuals.push_back({"second_order_term", second_order, kExactTolerance});
  report.residuals.push_back(
      {"vacuum_annihilation", alg.lower.entries.col(0).norm(), 0.0});
  return report;
}

double DressedParams::mu_d() const { return g * std::sqrt(static_cast<double>(n_total) * delta); }

DressedParams DressedParams::with_mu_d(int n_total, int delta, double mu_d, double omega_e, double omega_g,
                                       double omega_0) {
  DressedParams p{n_total, delta, omega_e, omega_g, omega_0, 0.0};
  p.validate();
  p.g = mu_d / std::sqrt(static_cast<double>(n_total) * delta);
  return p;
}

void DressedParams::validate() const {
  if (n_total < 1 || delta < 1) throw std::invalid_argument("dressed runs need N >= 1 and Delta >= 1");
  for (double v : {omega_e, omega_g, omega_0, g}) {
    if (!std::isfinite(v)) throw std::invalid_argument("dressed parameters must be finite");
  }
}

namespace {

void require_match(const DressedParams& p, const FockSector& sector) {
  if (!sector.has_photon() || sector.n_total() != p.n_total || *sector.delta() != p.delta) {
    throw SectorMismatch("dressed parameters do not match " + sector.describe());
  }
}

}  // namespace

OperatorMatrix dressed_hamiltonian(const DressedParams& p, const SectorPtr& sector) {
  require_match(p, *sector);
  return p.omega_e * number_operator(sector, Mode::excited) + p.omega_g * number_operator(sector, Mode::ground) +
         p.omega_0 * number_operator(sector, Mode::photon) +
         p.g * (transfer_operator(sector, TransferKind::dressed_lower) +
                transfer_operator(sector, TransferKind::dressed_raise));
}

OperatorMatrix dressed_hamiltonian(const DressedParams& p, const DressedAlgebra& alg) {
  require_match(p, *alg.sector);
  const double constant = p.omega_g * p.n_total + p.omega_0 * p.delta;
  return constant * identity(alg.sector) + p.omega_delta() * alg.excited_number +
         p.mu_d() * (alg.lower + alg.raise);
}

RunAnalysis dressed_first_order(const DressedParams& p, const std::vector<double>& time_grid, RaiseSign sign,
                                const EvolveOptions& evolve_options, const QuadratureOptions& quad_options) {
  p.validate();
  const auto sector = FockSector::build(p.n_total, p.delta);
  const auto alg = make_dressed(sector);
  const auto ops = alg.phonons();

  DrivenHamiltonian h;
  h.sector = sector;
  h.diagonal = Eigen::VectorXd(sector->dimension());
  for (int i = 0; i < sector->dimension(); ++i) {
    const auto& occ = sector->label(i);
    h.diagonal(i) = p.omega_e * occ.excited + p.omega_g * occ.ground + p.omega_0 * occ.photon;
  }
  const double g = p.g;
  h.drive.push_back({to_sparse(transfer_operator(sector, TransferKind::dressed_lower)), [g](double) { return g; }});
  h.drive.push_back({to_sparse(transfer_operator(sector, TransferKind::dressed_raise)), [g](double) { return g; }});

  ConvergenceGate gate;
  gate.observables = {ops.excited_number, quadrature_x1(ops), quadrature_x2(ops)};
  gate.tolerance = evolve_options.step_tolerance;
  gate.max_halvings = evolve_options.max_halvings;
  PropagatorOptions prop;
  prop.max_step = evolve_options.max_step;
  auto run = propagate_converged(h, basis_state(sector, 0), time_grid, gate, prop);
  if (!run.converged) {
    throw PropagatorError("dressed run: step halving did not settle (last change " +
                          std::to_string(run.halving_change) + ")");
  }

  // Same first-order equation with substituted constants.
  const ModelParams substituted{p.n_total, p.omega_delta(), PulseProfile::constant(p.mu_d())};
  const double eta_sum = alg.eta + alg.eta0;
  ObservableSeries series;
  series.time_grid = time_grid;
  series.exact = observables_exact(run.trajectory, ops);
  series.pert = observables_perturbative(perturbative_solution(substituted, time_grid, sign, quad_options), eta_sum);
  auto a = summarize_run(std::move(series), eta_sum, p.n_total);
  a.step = run.trajectory.step;
  a.halving_change = run.halving_change;
  return a;
}

}  // namespace qphonon
