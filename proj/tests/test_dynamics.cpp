#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qphonon/dynamics.hpp"

using namespace qphonon;

namespace {

double max_abs(const std::vector<double>& a, const std::vector<double>& b) {
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
  return out;
}

}  // namespace

TEST(Model, Validation) {
  EXPECT_THROW((ModelParams{0, 1.0, {}}).validate(), std::invalid_argument);
  EXPECT_THROW((ModelParams{3, NAN, {}}).validate(), std::invalid_argument);
  const ModelParams p{4, 1.0, PulseProfile::constant(2.0)};
  EXPECT_DOUBLE_EQ(p.eta(), 0.25);
  EXPECT_DOUBLE_EQ(p.coupling(0.0).real(), 1.0);
}

TEST(Model, HamiltonianFormsAgreeOnRandomSamples) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> size(1, 60);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = size(rng);
    const ModelParams p{n, u(rng), PulseProfile::gaussian({u(rng), u(rng)}, u(rng), u(rng), 0.5 + std::abs(u(rng)))};
    const auto sector = FockSector::build(n);
    const auto alg = make_algebra(sector);
    const double t = 5.0 * std::abs(u(rng));
    const auto bare = hamiltonian_at(t, p, sector);
    EXPECT_TRUE(is_hermitian(bare));
    EXPECT_LE(max_entry_deviation(bare, hamiltonian_at(t, p, alg)), 1e-12) << trial;
  }
}

TEST(Model, SectorMismatch) {
  const ModelParams p{4, 1.0, {}};
  EXPECT_THROW(hamiltonian_at(0.0, p, FockSector::build(5)), SectorMismatch);
  EXPECT_THROW(driven_hamiltonian(p, FockSector::build(4, 2)), SectorMismatch);
}

TEST(Beta, ConstantDriveClosedForm) {
  const double w = 1.3;
  const Complex mu(0.4, -0.1);
  const ModelParams p{10, w, PulseProfile::constant(mu)};
  const auto grid = uniform_grid(6.0, 61);
  const auto b = beta(p, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Complex expected = -mu * (1.0 - std::exp(-kI * (w * grid[k]))) / w;
    EXPECT_LE(std::abs(b[k] - expected), 1e-10);
  }
}

TEST(Beta, ResonantMonochromaticGrowsLinearly) {
  const double w = 0.9;
  const ModelParams p{10, w, PulseProfile::monochromatic(0.3, w)};
  const auto grid = uniform_grid(5.0, 26);
  const auto b = beta(p, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    EXPECT_LE(std::abs(b[k] - (-kI * 0.3 * t * std::exp(-kI * (w * t)))), 1e-10);
  }
}

TEST(Beta, ZeroDriveIsZero) {
  const ModelParams p{10, 1.0, {}};
  for (const auto& b : beta(p, uniform_grid(3.0, 11))) EXPECT_EQ(b, Complex(0.0));
}

TEST(Perturbative, AlphaSmallTimeLeadingTerm) {
  const double mu = 0.3;
  const ModelParams p{10, 1.0, PulseProfile::constant(mu)};
  for (double t : {0.02, 0.01}) {
    const auto sol = perturbative_solution(p, {0.0, t}, RaiseSign::minus, {t / 40});
    const Complex lead = (2.0 * kI / 3.0) * mu * mu * mu * t * t * t;
    EXPECT_LE(std::abs(sol.alpha[1] - lead) / std::abs(lead), 2.0 * t);
  }
}

TEST(Perturbative, XiRotatedRealPartIsMinusBetaSquared) {
  const auto p = reference_model(64);
  const auto grid = reference_grid();
  const auto sol = perturbative_solution(p, grid, RaiseSign::minus);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double stretch = (sol.xi[k] * std::exp(kI * (p.omega_e * grid[k]))).real();
    EXPECT_NEAR(stretch, -std::norm(sol.beta[k]), 1e-9);
  }
}

TEST(Perturbative, SignFlipsOnlyTheRaiseCoefficient) {
  const auto p = reference_model(64);
  const auto grid = uniform_grid(6.0, 31);
  const auto plus = perturbative_solution(p, grid, RaiseSign::plus);
  const auto minus = perturbative_solution(p, grid, RaiseSign::minus);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_EQ(plus.b1_raise_coeff[k], -minus.b1_raise_coeff[k]);
    EXPECT_EQ(plus.alpha[k], minus.alpha[k]);
    EXPECT_EQ(plus.b1_number_coeff[k], -2.0 * plus.beta[k]);
  }
}

TEST(Perturbative, ProductFromVariancesMatchesClosedProduct) {
  const auto p = reference_model(64);
  const auto cols = observables_perturbative(perturbative_solution(p, reference_grid(), RaiseSign::minus), p.eta());
  EXPECT_LE(max_abs(cols.product, cols.product_from_variances), 1e-10);
}

TEST(Perturbative, ClosedFormVariancesAsPrinted) {
  const auto [v1, v2] = closed_form_variances(1.0, 0.01);
  EXPECT_NEAR(v1, 0.47, 1e-15);
  EXPECT_NEAR(v2, 0.51, 1e-15);
}

TEST(Perturbative, ValidityIndicator) {
  EXPECT_DOUBLE_EQ(validity_indicator({Complex(1.0), Complex(0.0, 2.0)}, 0.1), 0.4);
  EXPECT_TRUE(validity_indicator({Complex(2.0)}, 0.1) > kValidityThreshold);
}

TEST(Evolve, ZeroDriveKeepsObservablesConstant) {
  const ModelParams p{20, 1.0, {}};
  const auto sector = FockSector::build(20);
  const auto run = evolve(basis_state(sector, 0), p, uniform_grid(5.0, 11));
  const auto cols = observables_exact(run.trajectory, make_algebra(sector).phonons());
  for (std::size_t k = 0; k < cols.mean_ne.size(); ++k) {
    EXPECT_EQ(cols.mean_ne[k], 0.0);
    EXPECT_NEAR(cols.var_x1[k], 0.5, 1e-14);
    EXPECT_NEAR(cols.var_x2[k], 0.5, 1e-14);
  }
}

TEST(Evolve, SingleAtomResonantRabi) {
  const double g = 0.2;
  const ModelParams p{1, 1.0, PulseProfile::monochromatic(g, 1.0)};
  const auto sector = FockSector::build(1);
  const auto grid = uniform_grid(20.0, 41);
  const auto run = evolve(basis_state(sector, 0), p, grid);
  const auto ne = number_operator(sector, Mode::excited);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double s = std::sin(g * grid[k]);
    EXPECT_NEAR(expectation(run.trajectory.states[k], ne).real(), s * s, 1e-9);
  }
}

// Atoms flop independently, so the excited fraction cannot depend on N at fixed g.
TEST(Evolve, ExcitedFractionIndependentOfNAtFixedCoupling) {
  const double g = 0.15;
  const auto grid = uniform_grid(12.0, 25);
  std::vector<double> reference;
  for (int n : {1, 3, 8, 21}) {
    const ModelParams p{n, 1.0, PulseProfile::gaussian(g * std::sqrt(double(n)), 0.7, 5.0, 2.0)};
    const auto sector = FockSector::build(n);
    const auto run = evolve(basis_state(sector, 0), p, grid);
    const auto ne = number_operator(sector, Mode::excited);
    std::vector<double> fraction;
    for (const auto& s : run.trajectory.states) fraction.push_back(expectation(s, ne).real() / n);
    if (reference.empty()) {
      reference = fraction;
    } else {
      EXPECT_LE(max_abs(fraction, reference), 1e-8) << n;
    }
  }
}

TEST(Evolve, RejectsBadInitialState) {
  const ModelParams p{4, 1.0, {}};
  const auto sector = FockSector::build(4);
  StateVector bad = basis_state(sector, 0);
  bad.amplitudes *= 2.0;
  EXPECT_THROW(evolve(bad, p, {0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(evolve(basis_state(FockSector::build(5), 0), p, {0.0, 1.0}), SectorMismatch);
}

TEST(Evolve, ConservesAtomNumberAndStaysAboveRobertson) {
  const auto a = analyze_run(reference_model(32), reference_grid(), RaiseSign::minus);
  EXPECT_LE(a.conservation_error, 1e-10);
  EXPECT_GE(a.robertson_slack_min, -1e-9);
  EXPECT_LE(a.halving_change, 1e-8);
  EXPECT_FALSE(a.validity_warning);
  EXPECT_EQ(a.series.exact.mean_ne.size(), reference_grid().size());
}

TEST(Evolve, FirstOrderBeatsZerothOrder) {
  const auto a = analyze_run(reference_model(64), reference_grid(), RaiseSign::minus);
  EXPECT_LT(a.e1, 0.05 * a.e0);
  EXPECT_LT(a.var_x1_err, 1e-2);
}

TEST(Evolve, CommutatorIdentityOnOperators) {
  for (int n : {1, 2, 5, 10, 50, 200}) {
    EXPECT_LE(quadrature_commutator_residual(make_algebra(FockSector::build(n))), 1e-12);
  }
}

TEST(Sign, ResolutionPicksMinusAtModerateSize) {
  const auto res = resolve_raise_sign(32, 64);
  EXPECT_EQ(res.sign, RaiseSign::minus);
  EXPECT_GT(res.error_plus / res.error_minus, 10.0);
  EXPECT_TRUE(res.separated);
}

TEST(Rabi, FrequencyAndReference) {
  EXPECT_DOUBLE_EQ(rabi_frequency(0.1, 1.0, 1.0), 0.1);
  EXPECT_NEAR(rabi_frequency(0.1, 1.2, 1.0), std::sqrt(0.02), 1e-15);
  const auto grid = uniform_grid(30.0, 31);
  const auto resonant = rabi_reference(0.1, 1.0, 1.0, 10, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double s = std::sin(0.1 * grid[k]);
    EXPECT_NEAR(resonant[k], 10.0 * s * s, 1e-12);
  }
  for (double v : rabi_reference(0.0, 1.0, 0.5, 10, grid)) EXPECT_EQ(v, 0.0);
}

TEST(Rabi, DetunedPeakIsHalf) {
  const double g = 0.1;
  const double omega = rabi_frequency(g, 1.0 + 2.0 * g, 1.0);
  const auto peak = rabi_reference(g, 1.0 + 2.0 * g, 1.0, 1, {0.5 * M_PI / omega});
  EXPECT_NEAR(peak[0], 0.5, 1e-14);
}

TEST(Rabi, TwoByTwoAmplitudesMatchAnalytic) {
  const double g = 0.1;
  for (double detuning : {0.0, g, 2.0 * g}) {
    const double omega = rabi_frequency(g, 1.0 + detuning, 1.0);
    const auto grid = uniform_grid(10.0 * 2.0 * M_PI / omega, 501);
    const auto amps = mode_amplitude_evolution(std::sqrt(10.0), 0.0, g, 1.0 + detuning, 1.0, grid);
    const auto ref = rabi_reference(g, 1.0 + detuning, 1.0, 10, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      EXPECT_NEAR(std::norm(amps[k].excited), ref[k], 1e-9);
      EXPECT_NEAR(std::norm(amps[k].excited) + std::norm(amps[k].ground), 10.0, 1e-11);
    }
  }
}

TEST(Grid, UniformGrid) {
  const auto g = uniform_grid(2.0, 5);
  EXPECT_EQ(g, (std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0}));
  EXPECT_EQ(reference_grid().size(), 201u);
}

TEST(Perturbative, ZeroDeformationReducesToOrderZero) {
  const auto p = reference_model(64);
  const auto cols = observables_perturbative(perturbative_solution(p, reference_grid(), RaiseSign::minus), 0.0);
  for (std::size_t k = 0; k < cols.beta.size(); ++k) {
    EXPECT_EQ(cols.mean_ne_order1[k], cols.mean_ne_order0[k]);
    EXPECT_EQ(cols.var_x1[k], 0.5);
    EXPECT_EQ(cols.var_x2[k], 0.5);
  }
}
