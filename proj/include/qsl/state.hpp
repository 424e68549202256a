// Two-level pure states, Bloch-sphere geometry and the Hamiltonian
// H = omega * sigma_x + lambda * sigma_z (hbar = 1 everywhere).

#pragma once

#include <array>
#include <complex>

namespace qsl {

using Complex = std::complex<double>;

/// Raw amplitude pair, not necessarily normalized. Used by integrators
/// between renormalization steps.
using Spinor = std::array<Complex, 2>;

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
};

/// Polar angle chi in [0, pi] and azimuth phi in [0, 2pi).
struct BlochAngles {
  double chi = 0.0;
  double phi = 0.0;
};

/// Normalized pair of amplitudes in the {|0>, |1>} basis.
class PureState {
 public:
  static constexpr double kNormTolerance = 1e-12;

  /// Throws std::invalid_argument unless |a0|^2 + |a1|^2 = 1 within 1e-12.
  PureState(Complex amp0, Complex amp1);

  /// Rescales an arbitrary nonzero spinor onto the unit sphere.
  static PureState normalized(const Spinor& v);

  static PureState up_z() { return {1.0, 0.0}; }
  static PureState down_z() { return {0.0, 1.0}; }

  const Complex& amp0() const { return amp_[0]; }
  const Complex& amp1() const { return amp_[1]; }
  const Spinor& spinor() const { return amp_; }

 private:
  explicit PureState(const Spinor& v, bool /*trusted*/) : amp_(v) {}
  Spinor amp_;
};

struct HamiltonianParams {
  double omega = 1.0;
  double lambda = 0.0;

  double energy() const;  // sqrt(omega^2 + lambda^2)
};

/// Eigenvector of omega*sx + lambda*sz for eigenvalue -sqrt(omega^2+lambda^2).
/// The first nonzero amplitude is real and nonnegative.
/// Throws std::domain_error when omega = lambda = 0.
PureState ground_state(const HamiltonianParams& params);

/// |<a|b>|, clamped to [0, 1].
double fidelity_overlap(const PureState& a, const PureState& b);

/// 2 arccos |<a|b>|, evaluated as 2 atan2(|a x b|, |<a|b>|) so that it stays
/// accurate near both 0 and pi.
double fubini_study_distance(const PureState& a, const PureState& b);

/// 1 - |<a|b>|^2, computed as sin^2(d/2) from the Fubini-Study distance so it
/// keeps its relative accuracy far below machine epsilon.
double infidelity(const PureState& a, const PureState& b);

/// Standard deviation of H in `state`, from the Bloch-angle form of the
/// variance. Written as a sum of squares (|h x r|^2 with h = (omega, 0, lambda))
/// which is algebraically the usual expansion in chi and phi but does not
/// cancel catastrophically near eigenstates.
double energy_variance(const PureState& state, const HamiltonianParams& params);

/// Same quantity from 2x2 matrix algebra: || (H - <H>) psi ||.
double energy_variance_matrix(const PureState& state, const HamiltonianParams& params);

/// phi is set to 0 at the poles (sin chi < 1e-12).
BlochAngles to_bloch(const PureState& state);
PureState from_bloch(double chi, double phi);
PureState from_bloch(const BlochAngles& angles);

BlochVector bloch_vector(const PureState& state);
BlochVector bloch_vector(const BlochAngles& angles);

/// theta = arctan(omega / gamma), in (0, pi/2]; gamma = 0 gives pi/2.
double theta_of(double omega, double gamma);

/// Fubini-Study distance between g(omega, -gamma) and g(omega, +gamma): pi - 2 theta.
double endpoint_distance(double theta);

double norm(const Spinor& v);

}  // namespace qsl
