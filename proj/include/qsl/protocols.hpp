// Time-optimal control schedules that steer g(omega, -gamma) to g(omega, +gamma).

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qsl/dynamics.hpp"
#include "qsl/state.hpp"

namespace qsl {

enum class ProtocolKind { composite_unconstrained, bang_off_bang, bang_bang };

std::string_view to_string(ProtocolKind kind);
/// Accepts "composite", "composite_unconstrained", "bang_off_bang", "bang_bang".
ProtocolKind parse_protocol_kind(std::string_view name);

struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::composite_unconstrained;
  double omega = 1.0;
  double gamma = 0.0;
  double lambda0 = 10.0;  // composite only
  double c = 0.0;         // constrained kinds only
};

/// Raised when a constrained schedule cannot be found.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Initial and target states of the control problem.
PureState initial_state(double omega, double gamma);
PureState target_state(double omega, double gamma);

/// (+lambda0, t0), (0, T), (-lambda0, t0) with lambda0 t0 = pi/4 and
/// T = arctan(gamma/omega)/omega.
ControlSchedule composite_pulse_schedule(double omega, double gamma, double lambda0);

/// True when lambda0 < 10 omega, i.e. the bangs are far from instantaneous.
bool composite_lambda0_is_small(double omega, double lambda0);

/// Infidelity bound for the finite-lambda0 composite pulse, 2 (omega/lambda0)^2.
double composite_infidelity_envelope(double omega, double lambda0);

/// (1/omega) arctan(gamma/omega).
double optimal_time_unconstrained(double omega, double gamma);

/// c * gamma / omega^2 compared with 1 picks the constrained regime.
ProtocolKind constrained_kind(double omega, double gamma, double c);

/// Bang-off-bang (+c, t1), (0, t2), (-c, t1) when c > omega^2/gamma, bang-bang
/// (+c, t1), (-c, t1) when c < omega^2/gamma. Durations come from a
/// reachability solve on the closed-form propagator; the sign of the first
/// bang is whichever reaches the target sooner (the returned schedule carries
/// it). Throws std::invalid_argument for c <= 0, gamma <= 0 or
/// c = omega^2/gamma, SolverError when no schedule fits in [0, 10 pi/omega].
ControlSchedule constrained_schedule(double omega, double gamma, double c);

/// Schedule for any spec. gamma = 0 yields a single zero-length segment since
/// the initial state already is the target.
ControlSchedule build_schedule(const ProtocolSpec& spec);

/// Analytic optimal duration: the lambda0 -> infinity time for the composite
/// pulse, the solved total duration for constrained kinds.
double optimal_time(const ProtocolSpec& spec, const ControlSchedule& schedule);

}  // namespace qsl
