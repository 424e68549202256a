// Piecewise-constant drives, RK4 time evolution and the action integral.

#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "qsl/state.hpp"

namespace qsl {

struct ControlSegment {
  double lambda_value = 0.0;
  double duration = 0.0;
};

class ControlSchedule {
 public:
  /// Throws std::invalid_argument on an empty segment list, a negative or
  /// non-finite duration, or a non-finite lambda.
  ControlSchedule(double omega, std::vector<ControlSegment> segments);

  double omega() const { return omega_; }
  const std::vector<ControlSegment>& segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  double total_duration() const;

  /// Largest |H| scale over all segments, max(|omega|, |lambda_i|).
  double max_energy_scale() const;

 private:
  double omega_;
  std::vector<ControlSegment> segments_;
};

/// Time-sampled evolution. Every segment boundary is a sample.
class Trajectory {
 public:
  struct Sample {
    double t;
    PureState state;
    double delta_e;  // instantaneous energy standard deviation
    double action;   // integral of 2 * delta_e from 0 to t
  };

  Trajectory(std::vector<Sample> samples, std::vector<std::size_t> boundaries,
             double max_step_drift);

  const std::vector<Sample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  const Sample& front() const { return samples_.front(); }
  const Sample& back() const { return samples_.back(); }
  double duration() const { return samples_.back().t; }

  /// Sample index at the start of segment i; element size()-1 of the schedule
  /// has one extra entry for the final boundary.
  const std::vector<std::size_t>& boundaries() const { return boundaries_; }

  /// Largest | ||psi|| - 1 | seen after an RK4 step, before renormalizing.
  double max_step_drift() const { return max_step_drift_; }

 private:
  std::vector<Sample> samples_;
  std::vector<std::size_t> boundaries_;
  double max_step_drift_;
};

/// exp(-i H dt)|state> for constant H = omega sx + lambda sz, in closed form.
PureState propagate_constant(const PureState& state, double omega, double lambda, double dt);

/// Chains propagate_constant over every segment. Exact reference for RK4.
PureState propagate_schedule(const PureState& initial, const ControlSchedule& schedule);

/// Step used when the caller does not fix one:
/// min(1e-4 * duration, 1e-3 / max(omega, |lambda|)).
double default_step(const ControlSegment& segment, double omega);

/// Classic RK4 on i dpsi/dt = H(t) psi with a fixed step h, shrunk in every
/// segment so it divides the segment duration. The state is renormalized after
/// every step. Throws std::invalid_argument for h <= 0.
Trajectory integrate_rk4(const PureState& initial, const ControlSchedule& schedule, double h);

/// Same integrator with default_step chosen per segment.
Trajectory integrate_rk4(const PureState& initial, const ControlSchedule& schedule);

/// Convenience: fixed step if given, per-segment default otherwise.
Trajectory integrate_rk4(const PureState& initial, const ControlSchedule& schedule,
                         std::optional<double> h);

/// Final cumulative action (the path length in state space).
double path_length(const Trajectory& traj);

/// Sum of great-circle distances between consecutive samples.
double arc_length(const Trajectory& traj);

/// Action up to time tau by linear interpolation of the cumulative action.
/// Throws std::out_of_range when tau is outside [0, duration].
double action_at(const Trajectory& traj, double tau);

/// Columns: t, re_amp0, im_amp0, re_amp1, im_amp1, x, y, z, delta_e, action.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_json(std::ostream& out, const Trajectory& traj);

}  // namespace qsl
