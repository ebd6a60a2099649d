#include "qphonon/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "qphonon/quadrature.hpp"

namespace qphonon {

namespace {

PhononOperators plain_phonons(const SectorPtr& sector) {
  const double norm = 1.0 / std::sqrt(static_cast<double>(sector->n_total()));
  return {norm * transfer_operator(sector, TransferKind::lower_excited),
          norm * transfer_operator(sector, TransferKind::raise_excited), number_operator(sector, Mode::excited)};
}

void require_two_mode(const ModelParams& params, const SectorPtr& sector) {
  if (sector->has_photon() || sector->n_total() != params.n_total) {
    throw SectorMismatch("model with N = " + std::to_string(params.n_total) + " does not live on " +
                         sector->describe());
  }
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
  return out;
}

}  // namespace

Complex ModelParams::coupling(double t) const { return mu(t) / std::sqrt(static_cast<double>(n_total)); }

void ModelParams::validate() const {
  if (n_total < 1) throw std::invalid_argument("n_total must be >= 1");
  if (!std::isfinite(omega_e)) throw std::invalid_argument("omega_e must be finite");
}

OperatorMatrix hamiltonian_at(double t, const ModelParams& params, const SectorPtr& sector) {
  require_two_mode(params, sector);
  const Complex g = params.coupling(t);
  return params.omega_e * number_operator(sector, Mode::excited) +
         g * transfer_operator(sector, TransferKind::raise_excited) +
         std::conj(g) * transfer_operator(sector, TransferKind::lower_excited);
}

OperatorMatrix hamiltonian_at(double t, const ModelParams& params, const GardinerAlgebra& algebra) {
  require_two_mode(params, algebra.sector);
  const Complex g = params.coupling(t);
  const double root_n = std::sqrt(static_cast<double>(params.n_total));
  return params.omega_e * algebra.excited_number + root_n * (g * algebra.raise + std::conj(g) * algebra.lower);
}

DrivenHamiltonian driven_hamiltonian(const ModelParams& params, const SectorPtr& sector) {
  require_two_mode(params, sector);
  DrivenHamiltonian h;
  h.sector = sector;
  h.diagonal = Eigen::VectorXd(sector->dimension());
  for (int i = 0; i < sector->dimension(); ++i) h.diagonal(i) = params.omega_e * sector->label(i).excited;
  h.drive.push_back({to_sparse(transfer_operator(sector, TransferKind::raise_excited)),
                     [params](double t) { return params.coupling(t); }});
  h.drive.push_back({to_sparse(transfer_operator(sector, TransferKind::lower_excited)),
                     [params](double t) { return std::conj(params.coupling(t)); }});
  return h;
}

EvolveResult evolve(const StateVector& initial, const ModelParams& params, const std::vector<double>& time_grid,
                    const EvolveOptions& options) {
  params.validate();
  if (std::abs(initial.norm() - 1.0) > 1e-10) throw std::invalid_argument("initial state must be normalized");
  const auto hamiltonian = driven_hamiltonian(params, initial.sector);
  const auto ops = plain_phonons(initial.sector);

  ConvergenceGate gate;
  gate.observables = {ops.excited_number, quadrature_x1(ops), quadrature_x2(ops)};
  gate.tolerance = options.step_tolerance;
  gate.max_halvings = options.max_halvings;
  PropagatorOptions prop;
  prop.max_step = options.max_step;

  auto converged = propagate_converged(hamiltonian, initial, time_grid, gate, prop);
  if (!converged.converged) {
    throw PropagatorError("step halving did not settle below " + std::to_string(options.step_tolerance) +
                          " (last change " + std::to_string(converged.halving_change) + " at step " +
                          std::to_string(converged.trajectory.step) + ")");
  }
  return {std::move(converged.trajectory), converged.halving_change, converged.halvings};
}

std::vector<Complex> beta(const ModelParams& params, const std::vector<double>& time_grid,
                          const QuadratureOptions& options) {
  return perturbative_solution(params, time_grid, RaiseSign::minus, options).beta;
}

PerturbativeSolution perturbative_solution(const ModelParams& params, const std::vector<double>& time_grid,
                                           RaiseSign sign, const QuadratureOptions& options) {
  const RefinedGrid grid(time_grid, options.max_step);
  const double w = params.omega_e;
  const auto& nodes = grid.nodes();

  const auto drive = grid.sample([&](double s) { return std::exp(kI * (w * s)) * params.mu(s); });
  const auto drive_integral = grid.cumulative(drive);
  std::vector<Complex> beta_fine(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    beta_fine[i] = -kI * std::exp(-kI * (w * nodes[i])) * drive_integral[i];
  }

  std::vector<Complex> alpha_integrand(nodes.size());
  std::vector<Complex> xi_integrand(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    alpha_integrand[i] = drive[i] * std::norm(beta_fine[i]);
    xi_integrand[i] = params.mu(nodes[i]) * std::conj(beta_fine[i]);
  }
  const auto alpha_integral = grid.at_output(grid.cumulative(alpha_integrand));
  const auto xi_integral = grid.at_output(grid.cumulative(xi_integrand));

  PerturbativeSolution sol;
  sol.time_grid = time_grid;
  sol.omega_e = w;
  sol.sign = sign;
  sol.beta = grid.at_output(beta_fine);
  const std::size_t n = time_grid.size();
  sol.alpha.resize(n);
  sol.xi.resize(n);
  sol.b1_raise_coeff.resize(n);
  sol.b1_number_coeff.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = time_grid[k];
    const Complex rotate = std::exp(-kI * (w * t));
    sol.alpha[k] = 2.0 * kI * rotate * alpha_integral[k];
    sol.xi[k] = 2.0 * kI * rotate * xi_integral[k];
    sol.b1_raise_coeff[k] = value(sign) * sol.beta[k] * sol.beta[k] * std::conj(rotate);
    sol.b1_number_coeff[k] = -2.0 * sol.beta[k];
  }
  return sol;
}

ExactColumns observables_exact(const Trajectory& trajectory, const PhononOperators& ops) {
  const auto& sector = ops.lower.sector;
  const auto x1 = quadrature_x1(ops);
  const auto x2 = quadrature_x2(ops);
  const auto comm = commutator(x1, x2);
  const auto phonon_number = ops.raise * ops.lower;
  const auto atoms = number_operator(sector, Mode::excited) + number_operator(sector, Mode::ground);
  std::optional<OperatorMatrix> photons_plus_excited;
  if (sector->has_photon()) {
    photons_plus_excited = number_operator(sector, Mode::photon) + number_operator(sector, Mode::excited);
  }

  ExactColumns out;
  for (const auto& state : trajectory.states) {
    require_same_sector(*state.sector, *sector);
    out.mean_ne.push_back(expectation(state, ops.excited_number).real());
    out.mean_phonon_number.push_back(expectation(state, phonon_number).real());
    const double v1 = variance(state, x1);
    const double v2 = variance(state, x2);
    out.var_x1.push_back(v1);
    out.var_x2.push_back(v2);
    out.product.push_back(v1 * v2);
    out.commutator_x1x2.push_back(expectation(state, comm));
    double err = std::abs(expectation(state, atoms).real() - sector->n_total());
    if (photons_plus_excited) {
      err = std::max(err, std::abs(expectation(state, *photons_plus_excited).real() - *sector->delta()));
    }
    out.conservation_error = std::max(out.conservation_error, err);
  }
  return out;
}

PerturbativeColumns observables_perturbative(const PerturbativeSolution& sol, double eta) {
  PerturbativeColumns out;
  out.beta = sol.beta;
  for (std::size_t k = 0; k < sol.time_grid.size(); ++k) {
    const Complex b = sol.beta[k];
    const Complex rotate = std::exp(kI * (sol.omega_e * sol.time_grid[k]));
    const double b2 = std::norm(b);
    const double squeeze = (sol.b1_raise_coeff[k] / rotate).real();
    const double stretch = (sol.xi[k] * rotate).real();
    const double v1 = 0.5 + eta * (stretch + squeeze);
    const double v2 = 0.5 + eta * (stretch - squeeze);
    out.mean_ne_order0.push_back(b2);
    out.mean_ne_order1.push_back(b2 + eta * (b2 * b2 + 2.0 * (b * std::conj(sol.alpha[k])).real()));
    out.var_x1.push_back(v1);
    out.var_x2.push_back(v2);
    out.product.push_back(0.25 - eta * b2);
    out.product_from_variances.push_back(0.25 + 0.5 * ((v1 - 0.5) + (v2 - 0.5)));
  }
  return out;
}

std::pair<double, double> closed_form_variances(Complex beta, double eta) {
  const double b2 = std::norm(beta);
  const double twice_re_square = 2.0 * (beta * beta).real();
  return {0.5 - eta * (b2 + twice_re_square), 0.5 - eta * (b2 - twice_re_square)};
}

double validity_indicator(const std::vector<Complex>& beta, double eta) {
  double best = 0.0;
  for (const auto& b : beta) best = std::max(best, std::norm(b));
  return best * eta;
}

double quadrature_commutator_residual(const GardinerAlgebra& algebra) {
  const auto ops = algebra.phonons();
  const auto comm = commutator(quadrature_x1(ops), quadrature_x2(ops));
  const auto expected = kI * (identity(algebra.sector) - (2.0 * algebra.eta) * algebra.excited_number);
  return max_entry_deviation(comm, expected);
}

ModelParams reference_model(int n_total) {
  return {n_total, 1.0, PulseProfile::gaussian(0.6, 0.8, 4.0, 1.0)};
}

std::vector<double> uniform_grid(double t_end, std::size_t samples) {
  if (samples == 0) throw std::invalid_argument("grid needs at least one sample");
  if (samples == 1) return {0.0};
  std::vector<double> grid(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    grid[k] = t_end * static_cast<double>(k) / static_cast<double>(samples - 1);
  }
  return grid;
}

std::vector<double> reference_grid() { return uniform_grid(10.0, 201); }

RunAnalysis summarize_run(ObservableSeries series, double eta, int n_total) {
  RunAnalysis a;
  a.n_total = n_total;
  a.eta = eta;
  a.series = std::move(series);

  const auto& ex = a.series.exact;
  const auto& pt = a.series.pert;
  a.e0 = max_abs_diff(ex.mean_ne, pt.mean_ne_order0);
  a.e1 = max_abs_diff(ex.mean_ne, pt.mean_ne_order1);
  a.var_x1_err = max_abs_diff(ex.var_x1, pt.var_x1);
  a.var_x2_err = max_abs_diff(ex.var_x2, pt.var_x2);
  a.uncertainty_gap = max_abs_diff(ex.product, pt.product);
  a.robertson_slack_min = std::numeric_limits<double>::infinity();
  a.minimization_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < a.series.time_grid.size(); ++k) {
    const double slack = ex.product[k] - 0.25 * std::norm(ex.commutator_x1x2[k]);
    a.robertson_slack_min = std::min(a.robertson_slack_min, slack);
    a.minimization_gap = std::max(a.minimization_gap, slack);
    const Complex predicted = kI * (1.0 - 2.0 * eta * ex.mean_phonon_number[k]);
    a.commutator_gap = std::max(a.commutator_gap, std::abs(ex.commutator_x1x2[k] - predicted));
  }
  a.conservation_error = ex.conservation_error;
  a.validity = validity_indicator(pt.beta, eta);
  a.validity_warning = a.validity > kValidityThreshold;
  if (a.validity_warning) {
    spdlog::warn("N = {}: max |beta|^2 eta = {:.3g} exceeds {}; first-order expansion not perturbative", n_total,
                 a.validity, kValidityThreshold);
  }
  return a;
}

RunAnalysis analyze_run(const ModelParams& params, const std::vector<double>& time_grid, RaiseSign sign,
                        const EvolveOptions& evolve_options, const QuadratureOptions& quad_options) {
  params.validate();
  const auto sector = FockSector::build(params.n_total);
  const auto run = evolve(basis_state(sector, 0), params, time_grid, evolve_options);

  ObservableSeries series;
  series.time_grid = time_grid;
  series.exact = observables_exact(run.trajectory, plain_phonons(sector));
  series.pert = observables_perturbative(perturbative_solution(params, time_grid, sign, quad_options), params.eta());
  auto a = summarize_run(std::move(series), params.eta(), params.n_total);
  a.step = run.trajectory.step;
  a.halving_change = run.halving_change;
  return a;
}

SignResolution resolve_raise_sign(int n_small, int n_large) {
  SignResolution res;
  res.n_small = n_small;
  res.n_large = n_large;
  const auto grid = reference_grid();
  double err[2][2] = {};  // [size][sign]
  const int sizes[2] = {n_small, n_large};
  for (int s = 0; s < 2; ++s) {
    const auto params = reference_model(sizes[s]);
    const auto run = analyze_run(params, grid, RaiseSign::minus);
    for (int k = 0; k < 2; ++k) {
      const RaiseSign sign = k == 0 ? RaiseSign::plus : RaiseSign::minus;
      const auto pred = observables_perturbative(perturbative_solution(params, grid, sign), params.eta());
      err[s][k] = max_abs_diff(run.series.exact.var_x1, pred.var_x1);
    }
  }
  res.error_plus = err[1][0];
  res.error_minus = err[1][1];
  res.ratio_plus = err[1][0] / err[0][0];
  res.ratio_minus = err[1][1] / err[0][1];
  res.sign = res.error_plus < res.error_minus ? RaiseSign::plus : RaiseSign::minus;

  // Halving eta should quarter the right error and halve the wrong one.
  const double scale = static_cast<double>(n_small) / n_large;
  auto scales_like = [scale](double ratio, double power) {
    const double target = std::pow(scale, power);
    return std::abs(ratio - target) <= 0.25 * target;
  };
  const double right = res.sign == RaiseSign::plus ? res.ratio_plus : res.ratio_minus;
  const double wrong = res.sign == RaiseSign::plus ? res.ratio_minus : res.ratio_plus;
  res.separated = scales_like(right, 2.0) && scales_like(wrong, 1.0);
  return res;
}

const SignResolution& resolved_raise_sign() {
  static std::once_flag once;
  static SignResolution cached;
  std::call_once(once, [] { cached = resolve_raise_sign(); });
  return cached;
}

double rabi_frequency(double g, double omega_e, double omega_f) {
  const double detuning = omega_e - omega_f;
  return std::sqrt(0.25 * detuning * detuning + g * g);
}

std::vector<double> rabi_reference(double g, double omega_e, double omega_f, int n_total,
                                   const std::vector<double>& time_grid) {
  require_time_grid(time_grid);
  std::vector<double> out(time_grid.size(), 0.0);
  if (g == 0.0) return out;
  const double omega = rabi_frequency(g, omega_e, omega_f);
  const double fraction = (g * g) / (omega * omega);
  for (std::size_t k = 0; k < time_grid.size(); ++k) {
    const double s = std::sin(omega * time_grid[k]);
    out[k] = n_total * fraction * s * s;
  }
  return out;
}

std::vector<ModeAmplitudes> mode_amplitude_evolution(Complex alpha_g0, Complex alpha_e0, double g, double omega_e,
                                                     double omega_f, const std::vector<double>& time_grid) {
  require_time_grid(time_grid);
  // Rotating frame: excited amplitude carries e^{+i omega_f t}; the generator
  // is then [[omega_e - omega_f, g], [g, 0]] on (excited, ground).
  Eigen::Matrix2d generator;
  generator << omega_e - omega_f, g, g, 0.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(generator);
  const Eigen::Matrix2cd modes = eig.eigenvectors().cast<Complex>();

  double cached_dt = -1.0;
  Eigen::Matrix2cd step;
  auto step_for = [&](double dt) -> const Eigen::Matrix2cd& {
    if (dt != cached_dt) {
      Eigen::Vector2cd phases;
      for (int i = 0; i < 2; ++i) phases(i) = std::exp(-kI * (eig.eigenvalues()(i) * dt));
      step = modes * phases.asDiagonal() * modes.adjoint();
      cached_dt = dt;
    }
    return step;
  };

  std::vector<ModeAmplitudes> out;
  out.reserve(time_grid.size());
  Eigen::Vector2cd state(alpha_e0 * std::exp(kI * (omega_f * time_grid.front())), alpha_g0);
  out.push_back({alpha_g0, alpha_e0});
  for (std::size_t k = 1; k < time_grid.size(); ++k) {
    state = step_for(time_grid[k] - time_grid[k - 1]) * state;
    out.push_back({state(1), state(0) * std::exp(-kI * (omega_f * time_grid[k]))});
  }
  return out;
}

}  // namespace qphonon
