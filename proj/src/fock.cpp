#include "qphonon/fock.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

namespace qphonon {

FockSector::FockSector(int n_total, std::optional<int> delta) : n_total_(n_total), delta_(delta) {
  const int top = delta ? std::min(n_total, *delta) : n_total;
  basis_.reserve(static_cast<std::size_t>(top + 1));
  for (int n_e = 0; n_e <= top; ++n_e) {
    basis_.push_back({delta ? *delta - n_e : 0, n_e, n_total - n_e});
  }
}

SectorPtr FockSector::build(int n_total, std::optional<int> delta) {
  if (n_total < 0) throw std::invalid_argument("n_total must be non-negative");
  if (delta && *delta < 0) throw std::invalid_argument("delta must be non-negative");
  return SectorPtr(new FockSector(n_total, delta));
}

std::vector<int> FockSector::occupations(Mode mode) const {
  if (mode == Mode::photon && !has_photon()) {
    throw ModeAbsent("photon mode requested on a two-mode sector");
  }
  std::vector<int> out;
  out.reserve(basis_.size());
  for (const auto& occ : basis_) {
    switch (mode) {
      case Mode::photon: out.push_back(occ.photon); break;
      case Mode::excited: out.push_back(occ.excited); break;
      case Mode::ground: out.push_back(occ.ground); break;
    }
  }
  return out;
}

std::string FockSector::describe() const {
  std::string s = "sector(N=" + std::to_string(n_total_);
  if (delta_) s += ", Delta=" + std::to_string(*delta_);
  return s + ")";
}

void to_json(nlohmann::json& j, const FockSector& sector) {
  j = nlohmann::json{{"n_total", sector.n_total()}};
  if (sector.delta()) j["delta"] = *sector.delta();
  auto labels = nlohmann::json::array();
  for (const auto& occ : sector.basis()) {
    if (sector.has_photon()) {
      labels.push_back({occ.photon, occ.excited, occ.ground});
    } else {
      labels.push_back({occ.excited, occ.ground});
    }
  }
  j["basis"] = std::move(labels);
}

SectorPtr sector_from_json(const nlohmann::json& j) {
  std::optional<int> delta;
  if (j.contains("delta")) delta = j.at("delta").get<int>();
  return FockSector::build(j.at("n_total").get<int>(), delta);
}

void require_same_sector(const FockSector& a, const FockSector& b) {
  if (!(a == b)) throw SectorMismatch("operand sectors differ: " + a.describe() + " vs " + b.describe());
}

StateVector basis_state(const SectorPtr& sector, int index) {
  if (index < 0 || index >= sector->dimension()) {
    throw std::out_of_range("basis index " + std::to_string(index) + " outside " + sector->describe());
  }
  Vector v = Vector::Zero(sector->dimension());
  v(index) = 1.0;
  return {sector, std::move(v)};
}

OperatorMatrix identity(const SectorPtr& sector) {
  return {sector, Matrix::Identity(sector->dimension(), sector->dimension())};
}

OperatorMatrix zero_operator(const SectorPtr& sector) {
  return {sector, Matrix::Zero(sector->dimension(), sector->dimension())};
}

OperatorMatrix number_operator(const SectorPtr& sector, Mode mode) {
  const auto occ = sector->occupations(mode);
  OperatorMatrix op = zero_operator(sector);
  for (int i = 0; i < sector->dimension(); ++i) op.entries(i, i) = occ[static_cast<std::size_t>(i)];
  return op;
}

OperatorMatrix transfer_operator(const SectorPtr& sector, TransferKind kind) {
  const bool dressed = kind == TransferKind::dressed_raise || kind == TransferKind::dressed_lower;
  if (dressed && !sector->has_photon()) {
    throw ModeAbsent("dressed transfer requires a three-mode sector");
  }
  if (!dressed && sector->has_photon()) {
    // b_e^dag b_g alone changes n_photon + n_excited.
    throw std::invalid_argument("plain transfer does not preserve " + sector->describe());
  }
  OperatorMatrix op = zero_operator(sector);
  const int dim = sector->dimension();
  for (int i = 0; i < dim; ++i) {
    const auto& occ = sector->label(i);
    const double n0 = occ.photon;
    const double ne = occ.excited;
    const double ng = occ.ground;
    switch (kind) {
      case TransferKind::raise_excited:
        if (i + 1 < dim) op.entries(i + 1, i) = std::sqrt((ne + 1) * ng);
        break;
      case TransferKind::lower_excited:
        if (i > 0) op.entries(i - 1, i) = std::sqrt(ne * (ng + 1));
        break;
      case TransferKind::dressed_raise:
        if (i + 1 < dim) op.entries(i + 1, i) = std::sqrt(n0 * ng * (ne + 1));
        break;
      case TransferKind::dressed_lower:
        if (i > 0) op.entries(i - 1, i) = std::sqrt((n0 + 1) * (ng + 1) * ne);
        break;
    }
  }
  return op;
}

OperatorMatrix adjoint(const OperatorMatrix& op) { return {op.sector, op.entries.adjoint()}; }

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_sector(*a.sector, *b.sector);
  return {a.sector, a.entries + b.entries};
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_sector(*a.sector, *b.sector);
  return {a.sector, a.entries - b.entries};
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_sector(*a.sector, *b.sector);
  return {a.sector, a.entries * b.entries};
}

OperatorMatrix operator*(Complex scale, const OperatorMatrix& op) { return {op.sector, scale * op.entries}; }
OperatorMatrix operator*(double scale, const OperatorMatrix& op) { return {op.sector, scale * op.entries}; }

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) { return q_commutator(a, b, 1.0); }

OperatorMatrix q_commutator(const OperatorMatrix& a, const OperatorMatrix& b, double q) {
  require_same_sector(*a.sector, *b.sector);
  return {a.sector, a.entries * b.entries - q * (b.entries * a.entries)};
}

double max_entry_deviation(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_sector(*a.sector, *b.sector);
  if (a.dimension() == 0) return 0.0;
  return (a.entries - b.entries).cwiseAbs().maxCoeff();
}

bool is_hermitian(const OperatorMatrix& op, double tolerance) {
  if (op.dimension() == 0) return true;
  return (op.entries - op.entries.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

Complex expectation(const StateVector& state, const OperatorMatrix& op) {
  require_same_sector(*state.sector, *op.sector);
  return state.amplitudes.dot(op.entries * state.amplitudes);
}

double variance(const StateVector& state, const OperatorMatrix& op) {
  require_same_sector(*state.sector, *op.sector);
  const double scale = op.dimension() ? std::max(1.0, op.entries.cwiseAbs().maxCoeff()) : 1.0;
  if (!is_hermitian(op, 1e-12 * scale)) throw NotHermitian("variance requires a Hermitian operator");
  const Vector m_psi = op.entries * state.amplitudes;
  const double mean = state.amplitudes.dot(m_psi).real();
  const double second = m_psi.squaredNorm();
  const double v = second - mean * mean;
  if (v >= 0.0) return v;
  if (v < -1e-12 * std::max(1.0, second)) {
    throw InvariantViolation("variance " + std::to_string(v) + " is negative beyond roundoff");
  }
  spdlog::debug("clamping roundoff variance {} to zero", v);
  return 0.0;
}

StateVector apply(const OperatorMatrix& op, const StateVector& state) {
  require_same_sector(*op.sector, *state.sector);
  return {state.sector, op.entries * state.amplitudes};
}

}  // namespace qphonon
