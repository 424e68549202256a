#include "qsl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "qsl/format.hpp"

namespace qsl {

ControlSchedule::ControlSchedule(double omega, std::vector<ControlSegment> segments)
    : omega_(omega), segments_(std::move(segments)) {
  if (segments_.empty()) throw std::invalid_argument("ControlSchedule: no segments");
  if (!std::isfinite(omega_)) throw std::invalid_argument("ControlSchedule: omega not finite");
  for (const auto& seg : segments_) {
    if (!std::isfinite(seg.lambda_value)) {
      throw std::invalid_argument("ControlSchedule: lambda not finite");
    }
    if (!(seg.duration >= 0.0) || !std::isfinite(seg.duration)) {
      throw std::invalid_argument("ControlSchedule: duration must be finite and >= 0");
    }
  }
}

double ControlSchedule::total_duration() const {
  double total = 0.0;
  for (const auto& seg : segments_) total += seg.duration;
  return total;
}

double ControlSchedule::max_energy_scale() const {
  double scale = std::abs(omega_);
  for (const auto& seg : segments_) scale = std::max(scale, std::abs(seg.lambda_value));
  return scale;
}

Trajectory::Trajectory(std::vector<Sample> samples, std::vector<std::size_t> boundaries,
                       double max_step_drift)
    : samples_(std::move(samples)),
      boundaries_(std::move(boundaries)),
      max_step_drift_(max_step_drift) {
  if (samples_.empty()) throw std::invalid_argument("Trajectory: no samples");
  if (samples_.front().t != 0.0) throw std::invalid_argument("Trajectory: must start at t = 0");
  for (std::size_t b : boundaries_) {
    if (b >= samples_.size()) throw std::invalid_argument("Trajectory: boundary out of range");
  }
}

PureState propagate_constant(const PureState& state, double omega, double lambda, double dt) {
  if (!(dt >= 0.0)) throw std::invalid_argument("propagate_constant: dt must be >= 0");
  const double e = std::hypot(omega, lambda);
  if (e == 0.0 || dt == 0.0) return state;
  const double nx = omega / e;
  const double nz = lambda / e;
  const double c = std::cos(e * dt);
  const Complex s{0.0, -std::sin(e * dt)};
  // cos(E dt) I - i sin(E dt) (nx sx + nz sz)
  const Complex& a = state.amp0();
  const Complex& b = state.amp1();
  return PureState::normalized(
      Spinor{c * a + s * (nz * a + nx * b), c * b + s * (nx * a - nz * b)});
}

PureState propagate_schedule(const PureState& initial, const ControlSchedule& schedule) {
  PureState psi = initial;
  for (const auto& seg : schedule.segments()) {
    psi = propagate_constant(psi, schedule.omega(), seg.lambda_value, seg.duration);
  }
  return psi;
}

double default_step(const ControlSegment& segment, double omega) {
  const double scale = std::max(std::abs(omega), std::abs(segment.lambda_value));
  double h = 1e-4 * segment.duration;
  if (scale > 0.0) h = std::min(h, 1e-3 / scale);
  return h;
}

namespace {

// -i H psi
Spinor rhs(const Spinor& psi, double omega, double lambda) {
  const Complex mi{0.0, -1.0};
  return {mi * (lambda * psi[0] + omega * psi[1]), mi * (omega * psi[0] - lambda * psi[1])};
}

Spinor axpy(const Spinor& x, double a, const Spinor& k) {
  return {x[0] + a * k[0], x[1] + a * k[1]};
}

template <typename StepFn>
Trajectory integrate_impl(const PureState& initial, const ControlSchedule& schedule,
                          StepFn&& step_for) {
  const double omega = schedule.omega();
  std::vector<Trajectory::Sample> samples;
  std::vector<std::size_t> boundaries;
  double max_drift = 0.0;

  samples.push_back({0.0, initial,
                     energy_variance(initial, {omega, schedule.segments().front().lambda_value}),
                     0.0});

  double t_start = 0.0;
  for (const auto& seg : schedule.segments()) {
    boundaries.push_back(samples.size() - 1);
    const HamiltonianParams params{omega, seg.lambda_value};
    // A boundary sample belongs to two segments; its variance is reported
    // under the Hamiltonian that acts from there on.
    if (seg.duration == 0.0) continue;
    samples.back().delta_e = energy_variance(samples.back().state, params);

    const double h_req = step_for(seg);
    if (!(h_req > 0.0) || !std::isfinite(h_req)) {
      throw std::invalid_argument("integrate_rk4: step must be positive and finite");
    }
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(seg.duration / h_req - 1e-9)));
    const double h = seg.duration / static_cast<double>(n);

    Spinor psi = samples.back().state.spinor();
    double de_prev = samples.back().delta_e;
    double action = samples.back().action;
    for (std::size_t i = 1; i <= n; ++i) {
      const Spinor k1 = rhs(psi, omega, seg.lambda_value);
      const Spinor k2 = rhs(axpy(psi, 0.5 * h, k1), omega, seg.lambda_value);
      const Spinor k3 = rhs(axpy(psi, 0.5 * h, k2), omega, seg.lambda_value);
      const Spinor k4 = rhs(axpy(psi, h, k3), omega, seg.lambda_value);
      for (int c = 0; c < 2; ++c) {
        psi[c] += (h / 6.0) * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
      }
      max_drift = std::max(max_drift, std::abs(norm(psi) - 1.0));
      const PureState state = PureState::normalized(psi);
      psi = state.spinor();

      const double de = energy_variance(state, params);
      action += h * (de_prev + de);  // trapezoid on 2 * delta_e
      de_prev = de;
      const double t = i == n ? t_start + seg.duration : t_start + h * static_cast<double>(i);
      samples.push_back({t, state, de, action});
    }
    t_start += seg.duration;
  }
  boundaries.push_back(samples.size() - 1);
  return Trajectory(std::move(samples), std::move(boundaries), max_drift);
}

}  // namespace

Trajectory integrate_rk4(const PureState& initial, const ControlSchedule& schedule, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("integrate_rk4: step must be positive");
  return integrate_impl(initial, schedule, [h](const ControlSegment&) { return h; });
}

Trajectory integrate_rk4(const PureState& initial, const ControlSchedule& schedule) {
  const double omega = schedule.omega();
  return integrate_impl(initial, schedule,
                        [omega](const ControlSegment& seg) { return default_step(seg, omega); });
}

Trajectory integrate_rk4(const PureState& initial, const ControlSchedule& schedule,
                         std::optional<double> h) {
  return h ? integrate_rk4(initial, schedule, *h) : integrate_rk4(initial, schedule);
}

double path_length(const Trajectory& traj) { return traj.back().action; }

double arc_length(const Trajectory& traj) {
  const auto& s = traj.samples();
  double total = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    total += fubini_study_distance(s[i - 1].state, s[i].state);
  }
  return total;
}

double action_at(const Trajectory& traj, double tau) {
  const auto& s = traj.samples();
  if (!(tau >= 0.0) || tau > traj.duration()) {
    throw std::out_of_range("action_at: tau = " + std::to_string(tau) + " outside [0, " +
                            std::to_string(traj.duration()) + "]");
  }
  auto it = std::lower_bound(s.begin(), s.end(), tau,
                             [](const Trajectory::Sample& a, double t) { return a.t < t; });
  if (it == s.begin()) return it->action;
  if (it == s.end()) return s.back().action;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  if (hi.t == lo.t) return hi.action;
  const double w = (tau - lo.t) / (hi.t - lo.t);
  return lo.action + w * (hi.action - lo.action);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,re_amp0,im_amp0,re_amp1,im_amp1,x,y,z,delta_e,action\n";
  for (const auto& s : traj.samples()) {
    const BlochVector r = bloch_vector(s.state);
    out << fmt_num(s.t) << ',' << fmt_num(s.state.amp0().real()) << ','
        << fmt_num(s.state.amp0().imag()) << ',' << fmt_num(s.state.amp1().real()) << ','
        << fmt_num(s.state.amp1().imag()) << ',' << fmt_num(r.x) << ',' << fmt_num(r.y) << ','
        << fmt_num(r.z) << ',' << fmt_num(s.delta_e) << ',' << fmt_num(s.action) << '\n';
  }
}

void write_trajectory_json(std::ostream& out, const Trajectory& traj) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& s : traj.samples()) {
    const BlochVector r = bloch_vector(s.state);
    rows.push_back({{"t", s.t},
                    {"re_amp0", s.state.amp0().real()},
                    {"im_amp0", s.state.amp0().imag()},
                    {"re_amp1", s.state.amp1().real()},
                    {"im_amp1", s.state.amp1().imag()},
                    {"x", r.x},
                    {"y", r.y},
                    {"z", r.z},
                    {"delta_e", s.delta_e},
                    {"action", s.action}});
  }
  out << rows.dump(2) << '\n';
}

}  // namespace qsl
