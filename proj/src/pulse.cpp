#include "qphonon/pulse.hpp"

#include <cmath>
#include <stdexcept>

namespace qphonon {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

PulseProfile::PulseProfile(Variant shape) : shape_(std::move(shape)) {
  std::visit(Overloaded{
                 [](const ConstantPulse& p) {
                   if (!finite(p.amplitude)) throw std::invalid_argument("pulse amplitude must be finite");
                 },
                 [](const MonochromaticPulse& p) {
                   if (!finite(p.amplitude)) throw std::invalid_argument("pulse amplitude must be finite");
                   if (!std::isfinite(p.omega_f)) throw std::invalid_argument("omega_f must be finite");
                 },
                 [](const GaussianPulse& p) {
                   if (!finite(p.amplitude)) throw std::invalid_argument("pulse amplitude must be finite");
                   if (!std::isfinite(p.omega_f) || !std::isfinite(p.center)) {
                     throw std::invalid_argument("pulse parameters must be finite");
                   }
                   if (!(p.width > 0.0) || !std::isfinite(p.width)) {
                     throw std::invalid_argument("gaussian width must be positive");
                   }
                 },
             },
             shape_);
}

Complex PulseProfile::operator()(double t) const {
  return std::visit(Overloaded{
                        [](const ConstantPulse& p) { return p.amplitude; },
                        [t](const MonochromaticPulse& p) { return p.amplitude * std::exp(-kI * p.omega_f * t); },
                        [t](const GaussianPulse& p) {
                          const double u = (t - p.center) / p.width;
                          return p.amplitude * std::exp(-0.5 * u * u) * std::exp(-kI * p.omega_f * t);
                        },
                    },
                    shape_);
}

bool PulseProfile::is_zero() const {
  return std::visit([](const auto& p) { return p.amplitude == Complex(0.0); }, shape_);
}

}  // namespace qphonon
