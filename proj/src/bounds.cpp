#include "qsl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

namespace qsl {

namespace {

constexpr double kPi = std::numbers::pi;

double action_slack(double s_target) { return 1e-9 * std::max(1.0, s_target); }

double solve_on(double lo, double hi, double (*f)(double)) {
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (a + b);
}

}  // namespace

InsufficientActionError::InsufficientActionError(double required, double available)
    : std::runtime_error("trajectory action " + std::to_string(available) +
                         " never reaches the distance " + std::to_string(required) +
                         " (deficit " + std::to_string(required - available) + ")"),
      required_(required),
      available_(available) {}

std::string_view to_string(BoundMethod method) {
  return method == BoundMethod::closed_form ? "closed_form" : "trajectory";
}

double bound_TA_trajectory(const Trajectory& traj, double s_target) {
  if (!(s_target >= 0.0)) throw std::invalid_argument("bound_TA: s_target must be >= 0");
  if (s_target == 0.0) return 0.0;
  const auto& s = traj.samples();
  const double total = s.back().action;
  if (total < s_target) {
    if (s_target - total <= action_slack(s_target)) return traj.duration();
    throw InsufficientActionError(s_target, total);
  }
  // Bisection for the first sample whose action reaches the target.
  std::size_t lo = 0;
  std::size_t hi = s.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (s[mid].action >= s_target) hi = mid;
    else lo = mid;
  }
  if (s[lo].action >= s_target) return s[lo].t;
  const double span = s[hi].action - s[lo].action;
  const double w = span > 0.0 ? (s_target - s[lo].action) / span : 1.0;
  return s[lo].t + w * (s[hi].t - s[lo].t);
}

double bound_TA_closed(double theta, double omega) {
  const double dist = endpoint_distance(theta);
  const double first_bang = 0.5 * kPi * std::sin(theta);
  if (first_bang >= dist) return 0.0;
  return (dist - first_bang) / (2.0 * omega);
}

double bound_TB(const Trajectory& traj) {
  const double duration = traj.duration();
  if (duration == 0.0) return 0.0;
  const double dist = fubini_study_distance(traj.front().state, traj.back().state);
  const double len = path_length(traj);
  if (len == 0.0) return 0.0;
  return dist / len * duration;
}

double bound_TB_mean_variance(const Trajectory& traj) {
  const double duration = traj.duration();
  if (duration == 0.0) return 0.0;
  const double mean_de = path_length(traj) / (2.0 * duration);
  if (mean_de == 0.0) return 0.0;
  return std::acos(fidelity_overlap(traj.front().state, traj.back().state)) / mean_de;
}

double bound_TB_closed(double theta, double omega) {
  const double dist = endpoint_distance(theta);
  if (dist == 0.0) return 0.0;
  const double optimal = dist / (2.0 * omega);
  return dist / (dist + kPi * std::sin(theta)) * optimal;
}

double bound_TC_closed_raw(double theta, double omega) {
  return (endpoint_distance(theta) - kPi * std::sin(theta)) / (2.0 * omega);
}

double bound_TC_closed(double theta, double omega) {
  return std::max(0.0, bound_TC_closed_raw(theta, omega));
}

double bound_TC_trajectory(const Trajectory& traj, double s_target) {
  if (!(s_target >= 0.0)) throw std::invalid_argument("bound_TC: s_target must be >= 0");
  if (s_target == 0.0) return 0.0;
  const auto& s = traj.samples();
  const double total = s.back().action;
  if (total < s_target) {
    if (s_target - total <= action_slack(s_target)) return traj.duration();
    throw InsufficientActionError(s_target, total);
  }
  struct Stretch {
    double dt;
    double ds;
  };
  std::vector<Stretch> stretches;
  stretches.reserve(s.size());
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double dt = s[i].t - s[i - 1].t;
    if (dt > 0.0) stretches.push_back({dt, s[i].action - s[i - 1].action});
  }
  std::sort(stretches.begin(), stretches.end(),
            [](const Stretch& a, const Stretch& b) { return a.ds * b.dt > b.ds * a.dt; });
  double covered = 0.0;
  double elapsed = 0.0;
  for (const auto& st : stretches) {
    if (covered + st.ds >= s_target) {
      return elapsed + (s_target - covered) / st.ds * st.dt;
    }
    covered += st.ds;
    elapsed += st.dt;
  }
  return elapsed;
}

double bound_Tm(double s, double delta_e_max) {
  if (!(s >= 0.0)) throw std::invalid_argument("bound_Tm: s must be >= 0");
  if (s == 0.0 || std::isinf(delta_e_max)) return 0.0;
  if (!(delta_e_max > 0.0)) {
    throw std::invalid_argument("bound_Tm: delta_e_max must be positive when s > 0");
  }
  return 0.5 * s / delta_e_max;
}

double delta_e_envelope(double c, double omega) { return std::abs(c) + std::abs(omega); }

double piecewise_mt_bound(const ControlSchedule& schedule, const Trajectory& traj) {
  const auto& b = traj.boundaries();
  if (b.size() != schedule.size() + 1) {
    throw std::invalid_argument("piecewise_mt_bound: trajectory does not match the schedule");
  }
  const auto& s = traj.samples();
  double total = 0.0;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto& seg = schedule.segments()[i];
    if (seg.duration == 0.0) continue;
    const HamiltonianParams params{schedule.omega(), seg.lambda_value};
    const PureState& start = s[b[i]].state;
    const PureState& end = s[b[i + 1]].state;
    const double de = energy_variance(start, params);
    const double de_end = energy_variance(end, params);
    if (std::abs(de - de_end) > 1e-9 * std::max(1.0, de)) {
      throw std::logic_error("piecewise_mt_bound: delta_e not conserved on segment " +
                             std::to_string(i));
    }
    const double half = 0.5 * fubini_study_distance(start, end);
    if (half == 0.0) continue;
    if (de == 0.0) {
      throw std::logic_error("piecewise_mt_bound: stationary segment " + std::to_string(i) +
                             " moved the state");
    }
    total += half / de;
  }
  return total;
}

double piecewise_mt_closed(double theta, double omega) {
  return endpoint_distance(theta) / (2.0 * omega);
}

double ta_vanishing_theta() {
  return solve_on(0.1, kPi / 2.0,
                  [](double th) { return 0.5 * kPi * std::sin(th) - endpoint_distance(th); });
}

double tc_vanishing_theta() {
  return solve_on(0.05, kPi / 2.0 - 1e-3,
                  [](double th) { return kPi * std::sin(th) - endpoint_distance(th); });
}

ProtocolRun run_protocol(const ProtocolSpec& spec, std::optional<double> h) {
  ControlSchedule schedule = build_schedule(spec);
  const PureState psi0 = initial_state(spec.omega, spec.gamma);
  const PureState target = target_state(spec.omega, spec.gamma);
  Trajectory traj = integrate_rk4(psi0, schedule, h);

  BoundsReport r;
  r.kind = spec.kind;
  r.omega = spec.omega;
  r.gamma = spec.gamma;
  r.theta = theta_of(spec.omega, spec.gamma);
  r.s = endpoint_distance(r.theta);
  r.s_path = path_length(traj);
  r.duration = traj.duration();
  r.T = optimal_time(spec, schedule);
  r.infidelity = infidelity(traj.back().state, target);
  r.fidelity = 1.0 - r.infidelity;

  r.T_A_traj = bound_TA_trajectory(traj, r.s);
  r.T_B_traj = bound_TB(traj);
  r.T_C_traj = bound_TC_trajectory(traj, r.s);
  r.T_piecewise_traj = piecewise_mt_bound(schedule, traj);

  const bool composite = spec.kind == ProtocolKind::composite_unconstrained;
  const bool trivial = spec.gamma == 0.0;
  r.delta_e_max = composite ? std::numeric_limits<double>::infinity()
                            : delta_e_envelope(spec.c, spec.omega);
  r.T_m = {trivial ? 0.0 : bound_Tm(r.s, r.delta_e_max), BoundMethod::closed_form};

  if (composite || trivial) {
    r.T_A_closed = bound_TA_closed(r.theta, spec.omega);
    r.T_B_closed = bound_TB_closed(r.theta, spec.omega);
    r.T_C_raw = bound_TC_closed_raw(r.theta, spec.omega);
    r.T_C_closed = bound_TC_closed(r.theta, spec.omega);
    r.T_piecewise_closed = piecewise_mt_closed(r.theta, spec.omega);
  }
  if (composite) {
    r.T_A = {*r.T_A_closed, BoundMethod::closed_form};
    r.T_B = {*r.T_B_closed, BoundMethod::closed_form};
    r.T_C = {*r.T_C_closed, BoundMethod::closed_form};
    r.T_piecewise = {*r.T_piecewise_closed, BoundMethod::closed_form};
  } else {
    r.T_A = {r.T_A_traj, BoundMethod::trajectory};
    r.T_B = {r.T_B_traj, BoundMethod::trajectory};
    r.T_C = {r.T_C_traj, BoundMethod::trajectory};
    r.T_piecewise = {r.T_piecewise_traj, BoundMethod::trajectory};
  }
  return ProtocolRun{spec, std::move(schedule), std::move(traj), r};
}

}  // namespace qsl
