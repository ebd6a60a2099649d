#include <gtest/gtest.h>

#include <cmath>

#include "qphonon/pulse.hpp"
#include "qphonon/quadrature.hpp"

using namespace qphonon;

TEST(TimeGrid, Validation) {
  EXPECT_THROW(require_time_grid({}), std::invalid_argument);
  EXPECT_THROW(require_time_grid({-1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(require_time_grid({0.0, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(require_time_grid({0.0, NAN}), std::invalid_argument);
  EXPECT_THROW(require_time_grid({0.0, INFINITY}), std::invalid_argument);
  EXPECT_NO_THROW(require_time_grid({0.0}));
  EXPECT_NO_THROW(require_time_grid({0.5, 2.0}));
}

TEST(RefinedGridTest, NodesCoverOutputWithEvenSubsteps) {
  const RefinedGrid g({0.0, 0.3, 1.0}, 0.1);
  EXPECT_DOUBLE_EQ(g.nodes().front(), 0.0);
  EXPECT_EQ(g.output_node(0), 0u);
  EXPECT_DOUBLE_EQ(g.nodes()[g.output_node(1)], 0.3);
  EXPECT_DOUBLE_EQ(g.nodes()[g.output_node(2)], 1.0);
  EXPECT_EQ((g.output_node(1) - g.output_node(0)) % 2, 0u);
  EXPECT_EQ((g.output_node(2) - g.output_node(1)) % 2, 0u);
  for (std::size_t i = 1; i < g.nodes().size(); ++i) EXPECT_LE(g.nodes()[i] - g.nodes()[i - 1], 0.1 + 1e-15);
}

TEST(RefinedGridTest, GridNotStartingAtZeroIntegratesFromZero) {
  const RefinedGrid g({2.0}, 0.05);
  const auto f = g.sample([](double) { return Complex(1.0); });
  EXPECT_NEAR(g.at_output(g.cumulative(f))[0].real(), 2.0, 1e-14);
}

TEST(RefinedGridTest, ExactForQuadratics) {
  const RefinedGrid g({0.0, 0.7, 1.9, 3.0}, 0.13);
  const auto f = g.sample([](double t) { return Complex(3.0 * t * t - t + 2.0, t); });
  const auto F = g.cumulative(f);
  for (std::size_t i = 0; i < g.nodes().size(); ++i) {
    const double t = g.nodes()[i];
    EXPECT_NEAR(F[i].real(), t * t * t - 0.5 * t * t + 2.0 * t, 1e-12);
    EXPECT_NEAR(F[i].imag(), 0.5 * t * t, 1e-12);
  }
}

TEST(RefinedGridTest, FourthOrderOnSmoothIntegrand) {
  auto error = [](double h) {
    const RefinedGrid g({0.0, 5.0}, h);
    const auto F = g.cumulative(g.sample([](double t) { return Complex(std::cos(t), 0.0); }));
    double worst = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) worst = std::max(worst, std::abs(F[i].real() - std::sin(g.nodes()[i])));
    return worst;
  };
  const double ratio = error(0.05) / error(0.1);
  EXPECT_NEAR(ratio, 1.0 / 16.0, 0.03);
}

TEST(RefinedGridTest, LengthMismatchThrows) {
  const RefinedGrid g({0.0, 1.0}, 0.1);
  EXPECT_THROW(g.cumulative({Complex(1.0)}), std::invalid_argument);
  EXPECT_THROW(RefinedGrid({0.0, 1.0}, 0.0), std::invalid_argument);
}

TEST(Pulse, Shapes) {
  const auto c = PulseProfile::constant({0.5, 0.25});
  EXPECT_EQ(c(3.0), Complex(0.5, 0.25));
  const auto m = PulseProfile::monochromatic(2.0, 1.5);
  EXPECT_NEAR(std::abs(m(0.7) - 2.0 * std::exp(Complex(0.0, -1.05))), 0.0, 1e-15);
  const auto g = PulseProfile::gaussian(1.0, 0.0, 4.0, 2.0);
  EXPECT_NEAR(g(4.0).real(), 1.0, 1e-15);
  EXPECT_NEAR(g(6.0).real(), std::exp(-0.5), 1e-15);
  EXPECT_TRUE(PulseProfile{}.is_zero());
  EXPECT_FALSE(m.is_zero());
}

TEST(Pulse, RejectsBadParameters) {
  EXPECT_THROW(PulseProfile::gaussian(1.0, 0.0, 0.0, -1.0), std::invalid_argument);
  EXPECT_THROW(PulseProfile::gaussian(1.0, 0.0, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(PulseProfile::constant({NAN, 0.0}), std::invalid_argument);
  EXPECT_THROW(PulseProfile::monochromatic(1.0, INFINITY), std::invalid_argument);
}
