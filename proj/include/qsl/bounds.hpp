// Quantum speed limit bounds on the evolution time, from trajectories and in
// closed form for the lambda0 -> infinity composite pulse.

#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>

#include "qsl/dynamics.hpp"
#include "qsl/protocols.hpp"

namespace qsl {

/// The trajectory never accumulates the requested action.
class InsufficientActionError : public std::runtime_error {
 public:
  InsufficientActionError(double required, double available);
  double deficit() const { return required_ - available_; }
  double required() const { return required_; }
  double available() const { return available_; }

 private:
  double required_;
  double available_;
};

enum class BoundMethod { trajectory, closed_form };
std::string_view to_string(BoundMethod method);

struct Bound {
  double value = 0.0;
  BoundMethod method = BoundMethod::trajectory;
};

struct BoundsReport {
  ProtocolKind kind = ProtocolKind::composite_unconstrained;
  double omega = 0.0;
  double gamma = 0.0;
  double theta = 0.0;
  double s = 0.0;          // distance between initial and target state
  double s_path = 0.0;     // length of the simulated path
  double T = 0.0;          // optimal evolution time
  double duration = 0.0;   // duration of the simulated schedule
  double fidelity = 0.0;   // |<target|final>|^2
  double infidelity = 0.0; // 1 - fidelity, without cancellation
  double delta_e_max = 0.0;

  // Preferred value of each bound: closed form where one exists.
  Bound T_A, T_B, T_C, T_m, T_piecewise;

  double T_A_traj = 0.0;
  double T_B_traj = 0.0;
  double T_C_traj = 0.0;
  double T_piecewise_traj = 0.0;
  std::optional<double> T_A_closed;
  std::optional<double> T_B_closed;
  std::optional<double> T_C_closed;
  std::optional<double> T_C_raw;  // before clamping at zero
  std::optional<double> T_piecewise_closed;
};

/// Smallest tau with action_at(traj, tau) >= s_target. A shortfall up to
/// 1e-9 * max(1, s_target) is treated as reaching the target at the end.
double bound_TA_trajectory(const Trajectory& traj, double s_target);

/// 0 if (pi/2) sin(theta) >= pi - 2 theta, else (pi - 2 theta - (pi/2) sin(theta)) / (2 omega).
double bound_TA_closed(double theta, double omega);

/// (s / s_path) * duration, with s the distance between the first and last sample.
double bound_TB(const Trajectory& traj);

/// arccos|<psi_0|psi_T>| divided by the time-averaged delta_e. Same value as
/// bound_TB by a different route.
double bound_TB_mean_variance(const Trajectory& traj);

/// s / (s + pi sin(theta)) * T(theta).
double bound_TB_closed(double theta, double omega);

/// (pi - 2 theta - pi sin(theta)) / (2 omega), possibly negative.
double bound_TC_closed_raw(double theta, double omega);
/// max(0, bound_TC_closed_raw).
double bound_TC_closed(double theta, double omega);

/// Lower bound on the duration needed to cover s_target when the recorded
/// speeds 2 delta_e may be used in any order: fastest stretches first. Equals
/// the closed form for the ideal composite pulse and s / (2 delta_e) when
/// delta_e is constant.
double bound_TC_trajectory(const Trajectory& traj, double s_target);

/// (s/2) / delta_e_max; an infinite delta_e_max gives 0.
/// Throws std::invalid_argument for delta_e_max <= 0 with s > 0.
double bound_Tm(double s, double delta_e_max);

/// a-priori variance envelope |c| + |omega| for |lambda| <= c.
double delta_e_envelope(double c, double omega);

/// Sum over segments of the constant-Hamiltonian bound
/// arccos|<psi_start|psi_end>| / delta_e.
double piecewise_mt_bound(const ControlSchedule& schedule, const Trajectory& traj);

/// lambda0 -> infinity composite pulse: 0 + (pi - 2 theta)/(2 omega) + 0.
double piecewise_mt_closed(double theta, double omega);

/// Root of (pi/2) sin(theta) = pi - 2 theta; T_A vanishes for theta above it.
double ta_vanishing_theta();
/// Root of pi sin(theta) = pi - 2 theta; raw T_C is negative above it.
double tc_vanishing_theta();

struct ProtocolRun {
  ProtocolSpec spec;
  ControlSchedule schedule;
  Trajectory trajectory;
  BoundsReport report;
};

/// Builds the schedule, integrates it (step h if given, per-segment default
/// otherwise) and evaluates every bound.
ProtocolRun run_protocol(const ProtocolSpec& spec, std::optional<double> h = std::nullopt);

}  // namespace qsl
