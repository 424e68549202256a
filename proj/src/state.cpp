#include "qsl/state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qsl {

namespace {

constexpr double kPoleTolerance = 1e-12;

Complex inner(const Spinor& a, const Spinor& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

// Rotates the global phase so the first nonzero amplitude is real and >= 0.
Spinor fix_phase(Spinor v) {
  const Complex& lead = std::abs(v[0]) > 0.0 ? v[0] : v[1];
  const double mag = std::abs(lead);
  if (mag > 0.0) {
    const Complex rot = std::conj(lead) / mag;
    v[0] *= rot;
    v[1] *= rot;
    if (std::abs(v[0]) > 0.0) v[0] = std::abs(v[0]);
    else v[1] = std::abs(v[1]);
  }
  return v;
}

}  // namespace

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

double norm(const Spinor& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

PureState::PureState(Complex amp0, Complex amp1) : amp_{amp0, amp1} {
  const double n2 = std::norm(amp0) + std::norm(amp1);
  if (!(std::abs(n2 - 1.0) <= kNormTolerance)) {
    throw std::invalid_argument("PureState: amplitudes not normalized (|a0|^2+|a1|^2 = " +
                                std::to_string(n2) + ")");
  }
}

PureState PureState::normalized(const Spinor& v) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("PureState: cannot normalize a zero or non-finite spinor");
  }
  return PureState(Spinor{v[0] / n, v[1] / n}, true);
}

double HamiltonianParams::energy() const { return std::hypot(omega, lambda); }

PureState ground_state(const HamiltonianParams& params) {
  const double w = params.omega;
  const double l = params.lambda;
  const double e = params.energy();
  if (e == 0.0) {
    throw std::domain_error("Hamiltonian is zero; eigenbasis undefined");
  }
  // Null vectors of H + E. Pick the one whose components do not cancel.
  Spinor v = l <= 0.0 ? Spinor{e - l, -w} : Spinor{w, -(l + e)};
  return PureState::normalized(fix_phase(v));
}

double fidelity_overlap(const PureState& a, const PureState& b) {
  const double f = std::abs(inner(a.spinor(), b.spinor()));
  return std::clamp(f, 0.0, 1.0);
}

double fubini_study_distance(const PureState& a, const PureState& b) {
  const Spinor& u = a.spinor();
  const Spinor& v = b.spinor();
  const double parallel = std::abs(inner(u, v));
  const double perpendicular = std::abs(u[0] * v[1] - u[1] * v[0]);
  return 2.0 * std::atan2(perpendicular, parallel);
}

double infidelity(const PureState& a, const PureState& b) {
  const double half = std::sin(0.5 * fubini_study_distance(a, b));
  return half * half;
}

double energy_variance(const PureState& state, const HamiltonianParams& params) {
  const auto [chi, phi] = to_bloch(state);
  const double sc = std::sin(chi);
  const double cc = std::cos(chi);
  const double sp = std::sin(phi);
  const double cp = std::cos(phi);
  const double w = params.omega;
  const double l = params.lambda;
  // lambda^2 sin^2 chi + omega^2 (1 - sin^2 chi cos^2 phi)
  //   - 2 lambda omega sin chi cos chi cos phi, regrouped into squares.
  const double a = l * sc * sp;
  const double b = l * sc * cp - w * cc;
  const double c = w * sc * sp;
  return std::sqrt(a * a + b * b + c * c);
}

double energy_variance_matrix(const PureState& state, const HamiltonianParams& params) {
  const Spinor& psi = state.spinor();
  const double w = params.omega;
  const double l = params.lambda;
  const Spinor h_psi{l * psi[0] + w * psi[1], w * psi[0] - l * psi[1]};
  const double mean = inner(psi, h_psi).real();
  const Spinor residual{h_psi[0] - mean * psi[0], h_psi[1] - mean * psi[1]};
  return norm(residual);
}

BlochAngles to_bloch(const PureState& state) {
  const double r0 = std::abs(state.amp0());
  const double r1 = std::abs(state.amp1());
  const double chi = 2.0 * std::atan2(r1, r0);
  if (std::sin(chi) < kPoleTolerance) return {chi, 0.0};
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double phi = std::arg(state.amp1()) - std::arg(state.amp0());
  phi = std::fmod(phi, two_pi);
  if (phi < 0.0) phi += two_pi;
  if (phi >= two_pi) phi = 0.0;
  return {chi, phi};
}

PureState from_bloch(double chi, double phi) {
  return PureState::normalized(
      Spinor{std::cos(0.5 * chi), std::polar(std::sin(0.5 * chi), phi)});
}

PureState from_bloch(const BlochAngles& angles) { return from_bloch(angles.chi, angles.phi); }

BlochVector bloch_vector(const PureState& state) {
  const Complex c = std::conj(state.amp0()) * state.amp1();
  return {2.0 * c.real(), 2.0 * c.imag(), std::norm(state.amp0()) - std::norm(state.amp1())};
}

BlochVector bloch_vector(const BlochAngles& a) {
  return {std::sin(a.chi) * std::cos(a.phi), std::sin(a.chi) * std::sin(a.phi), std::cos(a.chi)};
}

double theta_of(double omega, double gamma) {
  if (!(omega > 0.0) || !(gamma >= 0.0)) {
    throw std::invalid_argument("theta_of: need omega > 0 and gamma >= 0");
  }
  if (gamma == 0.0) return std::numbers::pi / 2.0;
  return std::atan2(omega, gamma);
}

double endpoint_distance(double theta) { return std::numbers::pi - 2.0 * theta; }

}  // namespace qsl
