#include <gtest/gtest.h>

#include <cmath>

#include "qphonon/gardiner.hpp"

using namespace qphonon;

namespace {

const std::vector<int> kSizes = {1, 2, 5, 10, 50, 200};

OperatorMatrix diagonal_op(const SectorPtr& s, const std::function<double(int)>& f) {
  auto op = zero_operator(s);
  for (int i = 0; i < s->dimension(); ++i) op.entries(i, i) = f(i);
  return op;
}

}  // namespace

TEST(Gardiner, RejectsEmptyAndThreeModeSectors) {
  EXPECT_THROW(make_algebra(FockSector::build(0)), std::invalid_argument);
  EXPECT_THROW(make_algebra(FockSector::build(3, 2)), std::invalid_argument);
}

TEST(Gardiner, ConstantsFollowN) {
  const auto alg = make_algebra(FockSector::build(10));
  EXPECT_DOUBLE_EQ(alg.eta, 0.1);
  EXPECT_DOUBLE_EQ(alg.q, 0.8);
}

TEST(Gardiner, ExactCommutatorAndNumberRelation) {
  for (int n : kSizes) {
    const auto alg = make_algebra(FockSector::build(n));
    const auto s = alg.sector;
    const auto closed = diagonal_op(s, [n](int k) { return 1.0 - 2.0 * k / n; });
    EXPECT_LE(max_entry_deviation(commutator(alg.lower, alg.raise), closed), 1e-12) << n;
    const auto number = diagonal_op(s, [n](int k) { return (n - k + 1.0) * k / n; });
    EXPECT_LE(max_entry_deviation(alg.raise * alg.lower, number), 1e-12) << n;
  }
}

TEST(Gardiner, SmallNByHand) {
  // N = 1: b = |0><1|, [b, b^dag] = diag(1, -1).
  const auto alg = make_algebra(FockSector::build(1));
  EXPECT_NEAR(alg.lower.entries(0, 1).real(), 1.0, 1e-15);
  const auto c = commutator(alg.lower, alg.raise);
  EXPECT_NEAR(c.entries(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(c.entries(1, 1).real(), -1.0, 1e-15);
}

TEST(Gardiner, VerifyAlgebraPassesForAllSizes) {
  for (int n : kSizes) {
    const auto report = verify_algebra(make_algebra(FockSector::build(n)));
    for (const auto& r : report.residuals) EXPECT_TRUE(r.pass()) << "N = " << n << " " << r.name << " " << r.value;
    EXPECT_TRUE(report.all_pass());
  }
}

TEST(Gardiner, FindUnknownResidualThrows) {
  const auto report = verify_algebra(make_algebra(FockSector::build(2)));
  EXPECT_THROW(report.find("nope"), std::out_of_range);
}

TEST(Gardiner, ReportJsonCarriesToleranceAndFlag) {
  nlohmann::json j;
  verify_algebra(make_algebra(FockSector::build(5))).append_to(j, "N5.");
  ASSERT_TRUE(j.contains("N5.commutator_exact"));
  EXPECT_TRUE(j["N5.commutator_exact"]["pass"].get<bool>());
  EXPECT_DOUBLE_EQ(j["N5.commutator_exact"]["tolerance"].get<double>(), kExactTolerance);
}

TEST(FFunction, Values) {
  EXPECT_DOUBLE_EQ(f_function(0.0, 0.0), 1.0);
  EXPECT_NEAR(f_function(0.0, 0.1), 1.0, 1e-15);        // sqrt(1.21) - 0.1
  EXPECT_NEAR(f_function(1.0, 0.5), std::sqrt(0.25) - 0.5, 1e-15);
  EXPECT_THROW(f_function(10.0, 0.5), std::domain_error);
}

TEST(FFunction, BranchSelectsSign) {
  // Radicand (1 + eta - 2 eta n)^2 with n above (N+1)/2 needs the negative root.
  const int n_total = 4;
  const double eta = 0.25;
  const int n = 4;
  const double x = (n_total - n + 1.0) * n / n_total;
  EXPECT_NEAR(f_function_branch(x, eta, true), 1.0 - 2.0 * eta * n, 1e-14);
  EXPECT_GT(f_function_branch(x, eta, false), 0.0);
}

TEST(FFunction, EigenvaluesOfCommutatorMatchPhysicalBranch) {
  for (int n : kSizes) {
    const double eta = 1.0 / n;
    for (int k = 0; k <= n; ++k) {
      const double x = (n - k + 1.0) * k / n;
      EXPECT_NEAR(f_function_branch(x, eta, 2 * k > n + 1), 1.0 - 2.0 * eta * k, 1e-10) << n << " " << k;
    }
  }
}

TEST(QNumbers, MatchesClosedForm) {
  for (int n_total : {1, 7, 100}) {
    for (int n = 0; n <= n_total; ++n) {
      EXPECT_NEAR(q_number(n, 1.0 / n_total), n * (n_total - n + 1.0) / n_total, 1e-12);
    }
  }
  EXPECT_DOUBLE_EQ(q_factorial(0, 0.3), 1.0);
  EXPECT_NEAR(q_factorial(3, 0.0), 6.0, 1e-15);
  EXPECT_NEAR(q_factorial(3, 0.25), 1.0 * 1.5 * 1.5, 1e-15);
}

TEST(QNumbers, LadderElementsExhaustive) {
  for (int n_total = 1; n_total <= 100; ++n_total) {
    const auto alg = make_algebra(FockSector::build(n_total));
    double worst = 0.0;
    for (int n = 0; n < n_total; ++n) {
      const double element = std::norm(alg.raise.entries(n + 1, n));
      worst = std::max(worst, std::abs(element - q_number(n + 1, alg.eta)));
    }
    EXPECT_LE(worst, 1e-12) << n_total;
  }
}

TEST(QFock, StatesAreNormalizedBasisStates) {
  for (int n_total : {1, 10, 200}) {
    const auto alg = make_algebra(FockSector::build(n_total));
    for (int n = 0; n <= n_total; n += std::max(1, n_total / 10)) {
      const auto psi = q_fock_state(alg, n);
      EXPECT_NEAR(std::abs(psi.amplitudes(n)), 1.0, 1e-10) << n_total << " " << n;
      EXPECT_NEAR(psi.norm(), 1.0, 1e-10);
    }
    EXPECT_THROW(q_fock_state(alg, n_total + 1), std::out_of_range);
    EXPECT_THROW(q_fock_state(alg, -1), std::out_of_range);
  }
}

TEST(QCommutator, DeviationIsSecondOrder) {
  for (int n_total : kSizes) {
    const auto alg = make_algebra(FockSector::build(n_total));
    const auto qc = q_commutator(alg.lower, alg.raise, alg.q) - identity(alg.sector);
    for (int n = 0; n <= n_total; ++n) {
      const double dev = apply(qc, basis_state(alg.sector, n)).norm();
      EXPECT_NEAR(dev, 2.0 * alg.eta * alg.eta * n * (n - 1.0), 1e-12) << n_total << " " << n;
    }
  }
}

TEST(QCommutator, ClosesOnLowStates) {
  const auto alg = make_algebra(FockSector::build(30));
  const auto qc = q_commutator(alg.lower, alg.raise, alg.q) - identity(alg.sector);
  for (int n : {0, 1}) EXPECT_LE(apply(qc, basis_state(alg.sector, n)).norm(), 1e-14);
}

TEST(Su2, RescaledRelations) {
  for (int n : kSizes) {
    const auto alg = make_algebra(FockSector::build(n));
    const double c = 2.0 / n;
    EXPECT_LE(max_entry_deviation(commutator(alg.h, alg.raise), -c * alg.raise), 1e-12);
    EXPECT_LE(max_entry_deviation(commutator(alg.h, alg.lower), c * alg.lower), 1e-12);
  }
}

TEST(Endpoints, AnnihilationIsExact) {
  for (int n : kSizes) {
    const auto alg = make_algebra(FockSector::build(n));
    EXPECT_EQ(apply(alg.lower, basis_state(alg.sector, 0)).norm(), 0.0);
    EXPECT_EQ(apply(alg.raise, basis_state(alg.sector, n)).norm(), 0.0);
    EXPECT_EQ(expectation(basis_state(alg.sector, 0), alg.h).real(), 1.0);
  }
}

TEST(Quadratures, AreHermitianAndVacuumIsMinimal) {
  const auto alg = make_algebra(FockSector::build(40));
  const auto x1 = quadrature_x1(alg.phonons());
  const auto x2 = quadrature_x2(alg.phonons());
  EXPECT_TRUE(is_hermitian(x1));
  EXPECT_TRUE(is_hermitian(x2));
  const auto vac = basis_state(alg.sector, 0);
  EXPECT_NEAR(variance(vac, x1), 0.5, 1e-14);
  EXPECT_NEAR(variance(vac, x2), 0.5, 1e-14);
}
