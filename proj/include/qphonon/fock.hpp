#pragma once

// Particle-number-conserving Fock sectors of two- and three-mode boson
// systems, with dense operator and state representations on them.
//
// A two-mode sector holds the excited (untrapped) mode and the trapped ground
// mode at fixed total atom number N. A three-mode sector adds one photon mode
// and additionally fixes Delta = n_photon + n_excited. In both cases the basis
// is ordered by ascending n_excited, so basis index == n_excited.

#include <complex>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace qphonon {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

class SectorMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ModeAbsent : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotHermitian : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a construction-time identity check fails.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { photon, excited, ground };

/// Normal-ordered mode-transfer products. The plain kinds are b_e^dag b_g
/// (raise) and b_g^dag b_e (lower); the dressed kinds carry the photon as well,
/// a b_g b_e^dag (raise) and a^dag b_g^dag b_e (lower).
enum class TransferKind { raise_excited, lower_excited, dressed_raise, dressed_lower };

struct Occupation {
  int photon = 0;
  int excited = 0;
  int ground = 0;

  friend bool operator==(const Occupation&, const Occupation&) = default;
};

class FockSector;
using SectorPtr = std::shared_ptr<const FockSector>;

class FockSector {
 public:
  /// Throws std::invalid_argument on negative inputs.
  static SectorPtr build(int n_total, std::optional<int> delta = std::nullopt);

  int n_total() const { return n_total_; }
  std::optional<int> delta() const { return delta_; }
  bool has_photon() const { return delta_.has_value(); }
  int dimension() const { return static_cast<int>(basis_.size()); }
  const std::vector<Occupation>& basis() const { return basis_; }
  const Occupation& label(int index) const { return basis_.at(static_cast<std::size_t>(index)); }

  /// Occupation of `mode` for every basis state, in basis order.
  std::vector<int> occupations(Mode mode) const;

  std::string describe() const;

  friend bool operator==(const FockSector& a, const FockSector& b) {
    return a.n_total_ == b.n_total_ && a.delta_ == b.delta_;
  }

 private:
  FockSector(int n_total, std::optional<int> delta);

  int n_total_;
  std::optional<int> delta_;
  std::vector<Occupation> basis_;
};

void to_json(nlohmann::json& j, const FockSector& sector);
SectorPtr sector_from_json(const nlohmann::json& j);

struct StateVector {
  SectorPtr sector;
  Vector amplitudes;

  double norm() const { return amplitudes.norm(); }
};

struct OperatorMatrix {
  SectorPtr sector;
  Matrix entries;

  int dimension() const { return static_cast<int>(entries.rows()); }
};

void require_same_sector(const FockSector& a, const FockSector& b);

StateVector basis_state(const SectorPtr& sector, int index);
OperatorMatrix identity(const SectorPtr& sector);
OperatorMatrix zero_operator(const SectorPtr& sector);

OperatorMatrix number_operator(const SectorPtr& sector, Mode mode);
OperatorMatrix transfer_operator(const SectorPtr& sector, TransferKind kind);

OperatorMatrix adjoint(const OperatorMatrix& op);
OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator*(Complex scale, const OperatorMatrix& op);
OperatorMatrix operator*(double scale, const OperatorMatrix& op);

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);
/// a b - q b a
OperatorMatrix q_commutator(const OperatorMatrix& a, const OperatorMatrix& b, double q);

/// Largest |entry| of a - b; sectors must match.
double max_entry_deviation(const OperatorMatrix& a, const OperatorMatrix& b);
bool is_hermitian(const OperatorMatrix& op, double tolerance = 1e-12);

Complex expectation(const StateVector& state, const OperatorMatrix& op);
/// <M^2> - <M>^2. Roundoff negatives down to -1e-12 are clamped to zero;
/// anything below that is reported as an InvariantViolation.
double variance(const StateVector& state, const OperatorMatrix& op);
/// Unnormalized M|psi>.
StateVector apply(const OperatorMatrix& op, const StateVector& state);

}  // namespace qphonon
