#include "qphonon/gardiner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qphonon {

namespace {

double radicand(double x, double eta) {
  const double r = 1.0 + 2.0 * (1.0 - 2.0 * x) * eta + eta * eta;
  if (r >= 0.0) return r;
  // The radicand is a perfect square on V^N and touches zero for odd N.
  const double slack = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + eta) * (1.0 + eta);
  if (r >= -slack) return 0.0;
  throw std::domain_error("f(x; eta): negative radicand " + std::to_string(r));
}

double column_norm(const Matrix& m, int column) { return m.col(column).norm(); }

}  // namespace

bool AlgebraReport::all_pass() const {
  return std::all_of(residuals.begin(), residuals.end(), [](const auto& r) { return r.pass(); });
}

const IdentityResidual& AlgebraReport::find(const std::string& name) const {
  for (const auto& r : residuals) {
    if (r.name == name) return r;
  }
  throw std::out_of_range("no residual named " + name);
}

void AlgebraReport::append_to(nlohmann::json& out, const std::string& prefix) const {
  for (const auto& r : residuals) {
    out[prefix + r.name] = {{"residual", r.value}, {"tolerance", r.tolerance}, {"pass", r.pass()}};
  }
}

GardinerAlgebra make_algebra(const SectorPtr& sector) {
  if (sector->has_photon()) throw std::invalid_argument("phonon algebra needs a two-mode sector");
  const int n = sector->n_total();
  if (n < 1) throw std::invalid_argument("phonon algebra needs N >= 1 (eta = 1/N)");

  GardinerAlgebra alg;
  alg.sector = sector;
  alg.eta = 1.0 / n;
  alg.q = 1.0 - 2.0 * alg.eta;
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  alg.lower = norm * transfer_operator(sector, TransferKind::lower_excited);
  alg.raise = norm * transfer_operator(sector, TransferKind::raise_excited);
  alg.excited_number = number_operator(sector, Mode::excited);
  alg.h = identity(sector) - (2.0 * alg.eta) * alg.excited_number;

  const auto report = verify_algebra(alg);
  for (const char* name : {"adjoint", "commutator_exact", "su2_raise", "su2_lower", "vacuum_annihilation",
                           "top_annihilation"}) {
    const auto& r = report.find(name);
    if (!r.pass()) {
      throw InvariantViolation("phonon algebra on " + sector->describe() + ": " + r.name + " residual " +
                               std::to_string(r.value));
    }
  }
  return alg;
}

double f_function(double x, double eta) { return std::sqrt(radicand(x, eta)) - eta; }

double f_function_branch(double x, double eta, bool upper_branch) {
  const double root = std::sqrt(radicand(x, eta));
  return (upper_branch ? -root : root) - eta;
}

double q_number(int n, double eta) {
  const double k = n;
  return k - k * (k - 1.0) * eta;
}

double q_factorial(int n, double eta) {
  double out = 1.0;
  for (int k = 1; k <= n; ++k) out *= q_number(k, eta);
  return out;
}

StateVector q_fock_state(const GardinerAlgebra& algebra, int n) {
  if (n < 0 || n > algebra.n_total()) {
    throw std::out_of_range("q-Fock index " + std::to_string(n) + " outside 0.." +
                            std::to_string(algebra.n_total()));
  }
  // The 1/sqrt(<n>!) is spread over the ladder so that large N cannot overflow.
  StateVector state = basis_state(algebra.sector, 0);
  for (int k = 1; k <= n; ++k) {
    state = apply(algebra.raise, state);
    state.amplitudes /= std::sqrt(q_number(k, algebra.eta));
  }
  return state;
}

AlgebraReport verify_algebra(const GardinerAlgebra& alg) {
  AlgebraReport report;
  auto add = [&](std::string name, double value, double tol) {
    report.residuals.push_back({std::move(name), value, tol});
  };

  const auto& sector = alg.sector;
  const int n_total = alg.n_total();
  const int dim = sector->dimension();
  const double eta = alg.eta;
  const auto id = identity(sector);
  const auto& ne = alg.excited_number;

  add("adjoint", max_entry_deviation(alg.raise, adjoint(alg.lower)), 0.0);

  const auto comm = commutator(alg.lower, alg.raise);
  add("commutator_exact", max_entry_deviation(comm, id - (2.0 * eta) * ne), kExactTolerance);

  const auto number = alg.raise * alg.lower;
  OperatorMatrix number_closed = zero_operator(sector);
  for (int i = 0; i < dim; ++i) number_closed.entries(i, i) = (n_total - i + 1.0) * i / n_total;
  add("number_relation", max_entry_deviation(number, number_closed), kExactTolerance);

  // Both sides diagonal in the number basis: compare entrywise.
  double f_branch = 0.0;
  double f_principal = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double x = number.entries(i, i).real();
    const double target = comm.entries(i, i).real();
    const bool upper = 2 * i > n_total + 1;
    f_branch = std::max(f_branch, std::abs(f_function_branch(x, eta, upper) - target));
    if (!upper) f_principal = std::max(f_principal, std::abs(f_function(x, eta) - target));
  }
  add("f_form", f_branch, kConstructionTolerance);
  add("f_form_principal_lower_half", f_principal, kConstructionTolerance);

  const auto deviation = q_commutator(alg.lower, alg.raise, alg.q) - id;
  double q_dev = 0.0;
  double q_low = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double norm = column_norm(deviation.entries, i);
    q_dev = std::max(q_dev, std::abs(norm - 2.0 * eta * eta * i * (i - 1.0)));
    if (i <= 1) q_low = std::max(q_low, norm);
  }
  add("q_commutator_deviation", q_dev, kExactTolerance);
  add("q_commutator_low_span", q_low, kExactTolerance);

  add("su2_raise", max_entry_deviation(commutator(alg.h, alg.raise), (-2.0 * eta) * alg.raise), kExactTolerance);
  add("su2_lower", max_entry_deviation(commutator(alg.h, alg.lower), (2.0 * eta) * alg.lower), kExactTolerance);

  add("vacuum_annihilation", column_norm(alg.lower.entries, 0), 0.0);
  add("top_annihilation", column_norm(alg.raise.entries, dim - 1), 0.0);
  add("vacuum_h_eigenvalue", (alg.h.entries.col(0) - id.entries.col(0)).norm(), 0.0);

  double ladder = 0.0;
  double ladder_gap = 0.0;
  const auto raise_lower = alg.lower * alg.raise;
  for (int i = 0; i + 1 < dim; ++i) {
    const double element = alg.raise.entries(i + 1, i).real();
    ladder = std::max(ladder, std::abs(element * element - q_number(i + 1, eta)));
  }
  for (int i = 0; i < dim; ++i) {
    const double gap = (raise_lower.entries(i, i) - number.entries(i, i)).real();
    ladder_gap = std::max(ladder_gap, std::abs(gap - (1.0 - 2.0 * i * eta)));
  }
  add("ladder_q_number", ladder, kExactTolerance);
  add("ladder_difference", ladder_gap, kExactTolerance);

  // Same ladder as q_fock_state, carried along the chain to stay O(N^3).
  double fock = 0.0;
  Vector state = basis_state(sector, 0).amplitudes;
  for (int i = 0; i < dim; ++i) {
    if (i > 0) state = alg.raise.entries * state / std::sqrt(q_number(i, eta));
    fock = std::max(fock, (state - basis_state(sector, i).amplitudes).norm());
  }
  add("q_fock_states", fock, kConstructionTolerance);
  return report;
}

OperatorMatrix quadrature_x1(const PhononOperators& ops) {
  return (1.0 / std::sqrt(2.0)) * (ops.lower + ops.raise);
}

OperatorMatrix quadrature_x2(const PhononOperators& ops) {
  return Complex(0.0, -1.0 / std::sqrt(2.0)) * (ops.lower - ops.raise);
}

}  // namespace qphonon
