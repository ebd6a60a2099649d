#pragma once

// Output-coupling dynamics on V^N: exact propagation under
// H(t) = omega_e N_e + mu(t) b^dag + conj(mu(t)) b, the first-order-in-eta
// expansion of the phonon Heisenberg equation, and the observables that
// compare the two.

#include <utility>
#include <vector>

#include "qphonon/gardiner.hpp"
#include "qphonon/propagator.hpp"
#include "qphonon/pulse.hpp"

namespace qphonon {

struct ModelParams {
  int n_total = 1;
  double omega_e = 1.0;
  PulseProfile mu;

  double eta() const { return 1.0 / n_total; }
  /// g(t) = mu(t) / sqrt(N)
  Complex coupling(double t) const;
  /// Throws std::invalid_argument if n_total < 1 or omega_e is not finite.
  void validate() const;
};

/// Built from the bare transfer products: omega_e N_e + g b_e^dag b_g + h.c.
OperatorMatrix hamiltonian_at(double t, const ModelParams& params, const SectorPtr& sector);
/// Built from the phonon operators: omega_e N_e + sqrt(N) (g b^dag + h.c.).
OperatorMatrix hamiltonian_at(double t, const ModelParams& params, const GardinerAlgebra& algebra);

DrivenHamiltonian driven_hamiltonian(const ModelParams& params, const SectorPtr& sector);

struct EvolveOptions {
  double max_step = 0.02;
  double step_tolerance = 1e-8;
  int max_halvings = 8;
};

struct EvolveResult {
  Trajectory trajectory;
  double halving_change = 0.0;
  int halvings = 0;
};

/// Exact evolution on the sector of `initial`. The step is halved until the
/// expectations and variances of N_e, X1 and X2 move by less than
/// options.step_tolerance; PropagatorError if that never happens or if the
/// norm drifts.
EvolveResult evolve(const StateVector& initial, const ModelParams& params, const std::vector<double>& time_grid,
                    const EvolveOptions& options = {});

struct QuadratureOptions {
  double max_step = 0.005;
};

/// beta(t) = -i int_0^t e^{-i omega_e (t - s)} mu(s) ds
std::vector<Complex> beta(const ModelParams& params, const std::vector<double>& time_grid,
                          const QuadratureOptions& options = {});

/// Sign s of the b0^dag coefficient s beta^2 e^{i omega_e t} in the
/// first-order operator b1.
enum class RaiseSign : int { plus = 1, minus = -1 };

inline double value(RaiseSign s) { return static_cast<double>(static_cast<int>(s)); }

struct PerturbativeSolution {
  std::vector<double> time_grid;
  double omega_e = 0.0;
  RaiseSign sign = RaiseSign::minus;
  std::vector<Complex> beta;
  std::vector<Complex> alpha;
  std::vector<Complex> xi;
  std::vector<Complex> b1_raise_coeff;   // s beta^2 e^{i omega_e t}
  std::vector<Complex> b1_number_coeff;  // -2 beta
};

/// b(t) = b0 e^{-i omega_e t} + beta + eta b1 with
///   b1    = xi b0 + s beta^2 e^{i omega_e t} b0^dag - 2 beta b0^dag b0 + alpha,
///   alpha = 2i int_0^t e^{-i omega_e (t - s)} mu |beta|^2 ds,
///   xi    = 2i e^{-i omega_e t} int_0^t mu conj(beta) ds.
PerturbativeSolution perturbative_solution(const ModelParams& params, const std::vector<double>& time_grid,
                                           RaiseSign sign, const QuadratureOptions& options = {});

struct ExactColumns {
  std::vector<double> mean_ne;
  std::vector<double> mean_phonon_number;  // <b^dag b>
  std::vector<double> var_x1;
  std::vector<double> var_x2;
  std::vector<double> product;
  std::vector<Complex> commutator_x1x2;
  double conservation_error = 0.0;  // max |<N_e + N_g> - N| (two-mode) or the worse of both charges
};

struct PerturbativeColumns {
  std::vector<Complex> beta;
  std::vector<double> mean_ne_order0;
  std::vector<double> mean_ne_order1;
  std::vector<double> var_x1;
  std::vector<double> var_x2;
  std::vector<double> product;                 // 1/4 - eta |beta|^2
  std::vector<double> product_from_variances;  // var_x1 * var_x2 truncated at O(eta)
};

struct ObservableSeries {
  std::vector<double> time_grid;
  ExactColumns exact;
  PerturbativeColumns pert;
};

ExactColumns observables_exact(const Trajectory& trajectory, const PhononOperators& ops);

/// Vacuum moments of the first-order expansion:
///   <N_e>    = |beta|^2 + eta (|beta|^4 + 2 Re(beta conj(alpha)))
///   Var X1,2 = 1/2 + eta Re(xi e^{i w t} +- b1_raise_coeff e^{-i w t})
///   product  = 1/4 - eta |beta|^2
PerturbativeColumns observables_perturbative(const PerturbativeSolution& solution, double eta);

/// The quoted closed form 1/2 - eta (|beta|^2 +- (beta^2 + conj(beta)^2)).
/// Its Re(beta^2) coefficient is twice what the expansion gives, so it is
/// not used for the perturbative columns; it is kept for comparison.
std::pair<double, double> closed_form_variances(Complex beta, double eta);

/// max_t |beta(t)|^2 eta; above kValidityThreshold the expansion is not
/// perturbative.
double validity_indicator(const std::vector<Complex>& beta, double eta);
inline constexpr double kValidityThreshold = 0.25;

/// Max-entry residual of [X1, X2] - i (I - (2/N) N_e).
double quadrature_commutator_residual(const GardinerAlgebra& algebra);

/// A fixed smooth pulse with max |beta|^2 near 2.2 for omega_e = 1 on
/// [0, 10]: gaussian, amplitude 0.6, carrier 0.8, center 4, width 1.
ModelParams reference_model(int n_total);
std::vector<double> uniform_grid(double t_end, std::size_t samples);
std::vector<double> reference_grid();

struct RunAnalysis {
  int n_total = 0;
  double eta = 0.0;
  ObservableSeries series;
  double e0 = 0.0;                  // max |<N_e> - |beta|^2|
  double e1 = 0.0;                  // max |<N_e> - first-order prediction|
  double var_x1_err = 0.0;
  double var_x2_err = 0.0;
  double uncertainty_gap = 0.0;     // max |product_exact - (1/4 - eta |beta|^2)|
  double robertson_slack_min = 0.0; // min (product_exact - |<[X1,X2]>|^2 / 4)
  double minimization_gap = 0.0;    // max of the same slack
  double commutator_gap = 0.0;      // max |<[X1,X2]> - i (1 - 2 eta <b^dag b>)|
  double conservation_error = 0.0;
  double validity = 0.0;
  bool validity_warning = false;
  double step = 0.0;
  double halving_change = 0.0;
};

/// Reduces exact and perturbative columns sharing one grid to error metrics;
/// `eta` is the deformation the perturbative columns were built with.
RunAnalysis summarize_run(ObservableSeries series, double eta, int n_total);

/// Exact run from the vacuum |N;0> plus the perturbative prediction on the
/// same grid, reduced to error metrics.
RunAnalysis analyze_run(const ModelParams& params, const std::vector<double>& time_grid, RaiseSign sign,
                        const EvolveOptions& evolve_options = {}, const QuadratureOptions& quad_options = {});

struct SignResolution {
  RaiseSign sign = RaiseSign::minus;
  int n_small = 0;
  int n_large = 0;
  double error_plus = 0.0;   // max |Var X1 exact - prediction(+1)| at n_large
  double error_minus = 0.0;
  double ratio_plus = 0.0;   // error(n_large) / error(n_small)
  double ratio_minus = 0.0;
  bool separated = false;    // one sign scales like 1/N^2, the other like 1/N
};

/// Evolves the reference pulse exactly at N = n_small and n_large, predicts
/// Var X1 under both signs and keeps the sign whose error falls off as 1/N^2.
SignResolution resolve_raise_sign(int n_small = 128, int n_large = 256);
/// resolve_raise_sign() with the defaults, computed once per process.
const SignResolution& resolved_raise_sign();

/// Monochromatic two-level transfer: |beta(t)|^2 = N (g/Omega)^2 sin^2(Omega t),
/// Omega = sqrt((omega_e - omega_f)^2 / 4 + g^2).
std::vector<double> rabi_reference(double g, double omega_e, double omega_f, int n_total,
                                   const std::vector<double>& time_grid);
double rabi_frequency(double g, double omega_e, double omega_f);

struct ModeAmplitudes {
  Complex ground;
  Complex excited;
};

/// Coherent amplitudes under the bilinear two-mode Hamiltonian with drive
/// g e^{-i omega_f t} b_e^dag b_g + h.c., advanced interval by interval with
/// the exact 2x2 rotating-frame propagator.
std::vector<ModeAmplitudes> mode_amplitude_evolution(Complex alpha_g0, Complex alpha_e0, double g, double omega_e,
                                                     double omega_f, const std::vector<double>& time_grid);

}  // namespace qphonon
