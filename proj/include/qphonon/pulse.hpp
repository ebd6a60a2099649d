#pragma once

#include <variant>

#include "qphonon/fock.hpp"

namespace qphonon {

/// Effective drive mu(t) = g(t) sqrt(N). Carrier phases are e^{-i omega_f t},
/// so omega_f = omega_e is resonant with the excited-mode rotation.
struct ConstantPulse {
  Complex amplitude;
};

struct MonochromaticPulse {
  Complex amplitude;
  double omega_f = 0.0;
};

struct GaussianPulse {
  Complex amplitude;
  double omega_f = 0.0;
  double center = 0.0;
  double width = 1.0;
};

class PulseProfile {
 public:
  using Variant = std::variant<ConstantPulse, MonochromaticPulse, GaussianPulse>;

  PulseProfile() : shape_(ConstantPulse{0.0}) {}
  /// Throws std::invalid_argument for non-finite parameters or width <= 0.
  PulseProfile(Variant shape);  // NOLINT(google-explicit-constructor)

  static PulseProfile constant(Complex amplitude) { return {ConstantPulse{amplitude}}; }
  static PulseProfile monochromatic(Complex amplitude, double omega_f) {
    return {MonochromaticPulse{amplitude, omega_f}};
  }
  static PulseProfile gaussian(Complex amplitude, double omega_f, double center, double width) {
    return {GaussianPulse{amplitude, omega_f, center, width}};
  }

  Complex operator()(double t) const;
  const Variant& shape() const { return shape_; }
  bool is_zero() const;

 private:
  Variant shape_;
};

}  // namespace qphonon
