#include "qsl/protocols.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace qsl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kReachTolerance = 1e-9;
constexpr int kScanPoints = 2048;

void require_positive_omega(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw std::invalid_argument("protocol: omega must be positive and finite");
  }
}

struct Candidate {
  double t1 = 0.0;
  double t2 = 0.0;
  double sign = 1.0;
  double total() const { return 2.0 * t1 + t2; }
};

// Bang-bang: the switching point sits on the equator (z = 0) because the
// second bang is the mirror image (z -> -z) of the first one.
std::optional<Candidate> solve_bang_bang(double omega, double gamma, double c, double sign) {
  const PureState psi0 = initial_state(omega, gamma);
  const double lambda = sign * c;
  const double period = kPi / std::hypot(omega, lambda);
  auto z_after = [&](double t) {
    return bloch_vector(propagate_constant(psi0, omega, lambda, t)).z;
  };

  double lo = 0.0;
  double f_lo = z_after(lo);
  for (int i = 1; i <= kScanPoints; ++i) {
    const double hi = period * i / kScanPoints;
    const double f_hi = z_after(hi);
    if (f_hi == 0.0) return Candidate{hi, 0.0, sign};
    if ((f_lo > 0.0) != (f_hi > 0.0)) {
      std::uintmax_t iters = 200;
      const auto [a, b] = boost::math::tools::toms748_solve(
          z_after, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), iters);
      return Candidate{0.5 * (a + b), 0.0, sign};
    }
    lo = hi;
    f_lo = f_hi;
  }
  return std::nullopt;
}

// Bang-off-bang: for a first bang of length t the free (sigma_x) rotation is
// fixed by requiring its midpoint on the equator; minimize the total time
// over t.
std::optional<Candidate> solve_bang_off_bang(double omega, double gamma, double c, double sign) {
  const PureState psi0 = initial_state(omega, gamma);
  const double lambda = sign * c;
  const double period = kPi / std::hypot(omega, lambda);
  auto free_time = [&](double t) {
    const BlochVector q = bloch_vector(propagate_constant(psi0, omega, lambda, t));
    double half = std::fmod(-std::atan2(q.z, q.y), kPi);
    if (half < 0.0) half += kPi;
    return half / omega;
  };
  auto total = [&](double t) { return 2.0 * t + free_time(t); };

  int best = 0;
  double best_total = std::numeric_limits<double>::infinity();
  std::vector<double> grid(kScanPoints + 1);
  for (int i = 0; i <= kScanPoints; ++i) {
    grid[i] = period * i / kScanPoints;
    const double v = total(grid[i]);
    if (v < best_total) {
      best_total = v;
      best = i;
    }
  }
  const double a = grid[std::max(best - 1, 0)];
  const double b = grid[std::min(best + 1, kScanPoints)];
  const auto [t_min, v_min] =
      boost::math::tools::brent_find_minima(total, a, b, std::numeric_limits<double>::digits / 2);
  Candidate cand{grid[best], free_time(grid[best]), sign};
  if (v_min < best_total) cand = Candidate{t_min, free_time(t_min), sign};
  return cand;
}

}  // namespace

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::composite_unconstrained: return "composite";
    case ProtocolKind::bang_off_bang: return "bang_off_bang";
    case ProtocolKind::bang_bang: return "bang_bang";
  }
  return "unknown";
}

ProtocolKind parse_protocol_kind(std::string_view name) {
  if (name == "composite" || name == "composite_unconstrained") {
    return ProtocolKind::composite_unconstrained;
  }
  if (name == "bang_off_bang") return ProtocolKind::bang_off_bang;
  if (name == "bang_bang") return ProtocolKind::bang_bang;
  throw std::invalid_argument("unknown protocol '" + std::string(name) + "'");
}

PureState initial_state(double omega, double gamma) { return ground_state({omega, -gamma}); }

PureState target_state(double omega, double gamma) { return ground_state({omega, gamma}); }

ControlSchedule composite_pulse_schedule(double omega, double gamma, double lambda0) {
  require_positive_omega(omega);
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) {
    throw std::invalid_argument("composite pulse: lambda0 must be positive");
  }
  const double t0 = kPi / (4.0 * lambda0);
  const double free = optimal_time_unconstrained(omega, gamma);
  return ControlSchedule(omega, {{lambda0, t0}, {0.0, free}, {-lambda0, t0}});
}

bool composite_lambda0_is_small(double omega, double lambda0) { return lambda0 < 10.0 * omega; }

double composite_infidelity_envelope(double omega, double lambda0) {
  const double r = omega / lambda0;
  return 2.0 * r * r;
}

double optimal_time_unconstrained(double omega, double gamma) {
  require_positive_omega(omega);
  if (!(gamma >= 0.0)) throw std::invalid_argument("optimal time: gamma must be >= 0");
  return std::atan(gamma / omega) / omega;
}

ProtocolKind constrained_kind(double omega, double gamma, double c) {
  require_positive_omega(omega);
  if (!(c > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("constrained protocol: need c > 0 and gamma > 0");
  }
  const double threshold = omega * omega / gamma;
  if (c == threshold) {
    throw std::invalid_argument("constrained protocol: c = omega^2/gamma is the regime boundary");
  }
  return c > threshold ? ProtocolKind::bang_off_bang : ProtocolKind::bang_bang;
}

ControlSchedule constrained_schedule(double omega, double gamma, double c) {
  const ProtocolKind kind = constrained_kind(omega, gamma, c);
  const double limit = 10.0 * kPi / omega;
  const PureState psi0 = initial_state(omega, gamma);
  const PureState target = target_state(omega, gamma);

  std::optional<ControlSchedule> best;
  for (double sign : {1.0, -1.0}) {
    const auto cand = kind == ProtocolKind::bang_bang
                          ? solve_bang_bang(omega, gamma, c, sign)
                          : solve_bang_off_bang(omega, gamma, c, sign);
    if (!cand || cand->total() > limit) continue;
    std::vector<ControlSegment> segs{{sign * c, cand->t1}};
    if (kind == ProtocolKind::bang_off_bang) segs.push_back({0.0, cand->t2});
    segs.push_back({-sign * c, cand->t1});
    ControlSchedule schedule(omega, std::move(segs));
    if (infidelity(propagate_schedule(psi0, schedule), target) > kReachTolerance) continue;
    if (!best || schedule.total_duration() < best->total_duration()) best = std::move(schedule);
  }
  if (!best) throw SolverError("target unreachable with given structure");
  return *best;
}

ControlSchedule build_schedule(const ProtocolSpec& spec) {
  require_positive_omega(spec.omega);
  if (!(spec.gamma >= 0.0)) throw std::invalid_argument("protocol: gamma must be >= 0");
  if (spec.gamma == 0.0) return ControlSchedule(spec.omega, {{0.0, 0.0}});
  if (spec.kind == ProtocolKind::composite_unconstrained) {
    return composite_pulse_schedule(spec.omega, spec.gamma, spec.lambda0);
  }
  const ProtocolKind regime = constrained_kind(spec.omega, spec.gamma, spec.c);
  if (regime != spec.kind) {
    throw std::invalid_argument(std::string("protocol: ") + std::string(to_string(spec.kind)) +
                                " requires c " +
                                (spec.kind == ProtocolKind::bang_bang ? "<" : ">") +
                                " omega^2/gamma");
  }
  return constrained_schedule(spec.omega, spec.gamma, spec.c);
}

double optimal_time(const ProtocolSpec& spec, const ControlSchedule& schedule) {
  if (spec.gamma == 0.0) return 0.0;
  if (spec.kind == ProtocolKind::composite_unconstrained) {
    return optimal_time_unconstrained(spec.omega, spec.gamma);
  }
  return schedule.total_duration();
}

}  // namespace qsl
