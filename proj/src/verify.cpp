#include "qsl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <numbers>
#include <random>
#include <sstream>

#include "qsl/bounds.hpp"
#include "qsl/format.hpp"

namespace qsl {

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  double worst = 0.0;
  std::string detail;
};

PropertyResult check(const std::string& name, double tol, const std::function<Outcome()>& body) {
  PropertyResult r{name, false, 0.0, tol, {}};
  try {
    const Outcome o = body();
    r.worst = o.worst;
    r.detail = o.detail;
    r.passed = std::isfinite(o.worst) && o.worst <= tol;
  } catch (const std::exception& e) {
    r.worst = std::numeric_limits<double>::infinity();
    r.detail = std::string("exception: ") + e.what();
  }
  return r;
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  PureState state() {
    std::normal_distribution<double> n(0.0, 1.0);
    return PureState::normalized(Spinor{Complex{n(rng_), n(rng_)}, Complex{n(rng_), n(rng_)}});
  }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
};

std::vector<ProtocolKind> protocol_kinds(const VerifyOptions& o) {
  if (o.protocol) return {*o.protocol};
  return {ProtocolKind::composite_unconstrained, ProtocolKind::bang_off_bang,
          ProtocolKind::bang_bang};
}

ProtocolSpec spec_for(ProtocolKind kind, double omega, double gamma, double lambda0) {
  ProtocolSpec s;
  s.kind = kind;
  s.omega = omega;
  s.gamma = gamma;
  s.lambda0 = lambda0;
  const double threshold = gamma > 0.0 ? omega * omega / gamma : 0.0;
  if (kind == ProtocolKind::bang_off_bang) s.c = 1.5 * threshold;
  if (kind == ProtocolKind::bang_bang) s.c = 0.5 * threshold;
  return s;
}

std::string tag(ProtocolKind k) { return std::string(to_string(k)); }

}  // namespace

std::vector<PropertyResult> run_verification(const VerifyOptions& opt) {
  std::vector<PropertyResult> out;
  Sampler rng(opt.seed);
  const auto kinds = protocol_kinds(opt);

  // Protocol runs shared by several dynamics checks.
  std::vector<std::pair<ProtocolKind, std::function<ProtocolRun()>>> runs;
  for (ProtocolKind k : kinds) {
    runs.emplace_back(k, [k, &opt] {
      return run_protocol(spec_for(k, opt.omega, opt.gamma, opt.lambda0), opt.step);
    });
  }

  // ---------- quantum core ----------
  out.push_back(check("core.distance_metric", 1e-12, [&] {
    Outcome o;
    for (int i = 0; i < 1000; ++i) {
      const PureState a = rng.state();
      const PureState b = rng.state();
      const double d_ab = fubini_study_distance(a, b);
      const double d_ba = fubini_study_distance(b, a);
      o.worst = std::max(o.worst, std::abs(d_ab - d_ba));
      o.worst = std::max(o.worst, fubini_study_distance(a, a));
      if (d_ab < 0.0 || d_ab > kPi) o.worst = std::max(o.worst, 1.0);
      if ((d_ab == 0.0) != (fidelity_overlap(a, b) == 1.0)) o.worst = std::max(o.worst, 1.0);
    }
    return o;
  }));

  out.push_back(check("core.variance_bloch_vs_matrix", 1e-12, [&] {
    Outcome o;
    for (int i = 0; i < 1000; ++i) {
      const PureState psi = rng.state();
      const HamiltonianParams p{rng.uniform(-5, 5), rng.uniform(-5, 5)};
      o.worst = std::max(o.worst, std::abs(energy_variance(psi, p) - energy_variance_matrix(psi, p)));
    }
    return o;
  }));

  out.push_back(check("core.ground_state_variance", 1e-12, [&] {
    Outcome o;
    for (int i = 0; i < 1000; ++i) {
      const HamiltonianParams p{rng.uniform(-5, 5), rng.uniform(-5, 5)};
      o.worst = std::max(o.worst, energy_variance(ground_state(p), p));
    }
    return o;
  }));

  out.push_back(check("core.endpoint_distance", 1e-12, [&] {
    Outcome o;
    for (int i = 0; i < 50; ++i) {
      const double w = 0.2 + 0.4 * (i % 10);
      const double g = 0.05 + 2.0 * (i / 10) + 0.3 * (i % 7);
      const double d = fubini_study_distance(ground_state({w, -g}), ground_state({w, g}));
      o.worst = std::max(o.worst, std::abs(d - (kPi - 2.0 * std::atan(w / g))));
    }
    return o;
  }));

  out.push_back(check("core.bloch_round_trip", 1e-12, [&] {
    Outcome o;
    for (int i = 0; i < 1000; ++i) {
      const PureState psi = rng.state();
      o.worst = std::max(o.worst, infidelity(psi, from_bloch(to_bloch(psi))));
    }
    return o;
  }));

  // ---------- dynamics ----------
  out.push_back(check("dynamics.unitarity_step_drift", 1e-10, [&] {
    Outcome o;
    std::ostringstream d;
    for (auto& [k, make] : runs) {
      const ProtocolRun run = make();
      double sample_norm = 0.0;
      for (const auto& s : run.trajectory.samples()) {
        sample_norm = std::max(sample_norm, std::abs(norm(s.state.spinor()) - 1.0));
      }
      if (sample_norm > 1e-9) o.worst = std::max(o.worst, 1.0);
      o.worst = std::max(o.worst, run.trajectory.max_step_drift());
      d << tag(k) << ":" << fmt_num(run.trajectory.max_step_drift()) << " ";
    }
    o.detail = d.str();
    return o;
  }));

  out.push_back(check("dynamics.rk4_vs_closed_form", 1e-8, [&] {
    Outcome o;
    std::ostringstream d;
    for (auto& [k, make] : runs) {
      const ProtocolRun run = make();
      const PureState exact = propagate_schedule(run.trajectory.front().state, run.schedule);
      const double inf = infidelity(exact, run.trajectory.back().state);
      o.worst = std::max(o.worst, inf);
      d << tag(k) << ":" << fmt_num(inf) << " ";
    }
    o.detail = d.str();
    return o;
  }));

  // Random schedules shared by the geometric checks.
  struct RandomCase {
    ControlSchedule schedule;
    Trajectory trajectory;
  };
  std::vector<RandomCase> cases;
  auto random_cases = [&]() -> const std::vector<RandomCase>& {
    if (!cases.empty()) return cases;
    for (int i = 0; i < 200; ++i) {
      const double w = rng.uniform(0.5, 2.0);
      std::vector<ControlSegment> segs(rng.integer(1, 5));
      for (auto& s : segs) s = {rng.uniform(-3.0, 3.0), rng.uniform(0.05, 1.0)};
      ControlSchedule sched(w, segs);
      Trajectory traj = integrate_rk4(rng.state(), sched, opt.step);
      cases.push_back({std::move(sched), std::move(traj)});
    }
    return cases;
  };

  out.push_back(check("dynamics.geometric_inequality", 1e-9, [&] {
    Outcome o;
    o.worst = -std::numeric_limits<double>::infinity();
    for (const auto& c : random_cases()) {
      const double dist = fubini_study_distance(c.trajectory.front().state, c.trajectory.back().state);
      o.worst = std::max(o.worst, dist - path_length(c.trajectory));
    }
    o.detail = "worst = max(distance - path_length)";
    return o;
  }));

  out.push_back(check("dynamics.action_vs_arc_length", 1e-5, [&] {
    Outcome o;
    for (const auto& c : random_cases()) {
      const double arc = arc_length(c.trajectory);
      if (arc > 0.0) o.worst = std::max(o.worst, std::abs(path_length(c.trajectory) - arc) / arc);
    }
    o.detail = "relative";
    return o;
  }));

  out.push_back(check("dynamics.speed_law", 1e-4, [&] {
    Outcome o;
    for (const auto& c : random_cases()) {
      const auto& s = c.trajectory.samples();
      const auto& b = c.trajectory.boundaries();
      for (std::size_t seg = 0; seg + 1 < b.size(); ++seg) {
        for (std::size_t i = b[seg] + 1; i + 1 <= b[seg + 1]; ++i) {
          const double ds = fubini_study_distance(s[i - 1].state, s[i].state) +
                            fubini_study_distance(s[i].state, s[i + 1].state);
          const double speed = ds / (s[i + 1].t - s[i - 1].t);
          const double expect = 2.0 * s[i].delta_e;
          o.worst = std::max(o.worst, std::abs(speed - expect) / std::max(expect, 1e-6));
        }
      }
    }
    o.detail = "relative, interior samples";
    return o;
  }));

  // ---------- protocols ----------
  out.push_back(check("protocols.reach_target", 1.0, [&] {
    Outcome o;
    std::ostringstream d;
    for (auto& [k, make] : runs) {
      const ProtocolRun run = make();
      const double inf = run.report.infidelity;
      const double allowed = k == ProtocolKind::composite_unconstrained
                                 ? composite_infidelity_envelope(opt.omega, opt.lambda0)
                                 : 1e-9;
      o.worst = std::max(o.worst, inf / allowed);
      d << tag(k) << ":" << fmt_num(inf) << "/" << fmt_num(allowed) << " ";
    }
    o.detail = "worst = infidelity / allowed; " + d.str();
    return o;
  }));

  // Near-instantaneous bangs so the free arc starts on the phi = 3pi/2 meridian.
  std::optional<ProtocolRun> sharp;
  auto sharp_composite = [&]() -> const ProtocolRun& {
    if (!sharp) {
      sharp = run_protocol(
          spec_for(ProtocolKind::composite_unconstrained, opt.omega, opt.gamma, 1e8 * opt.omega));
    }
    return *sharp;
  };
  auto middle_arc_max = [&](const std::function<double(const Trajectory::Sample&)>& dev) {
    const auto& s = sharp_composite().trajectory.samples();
    const auto& b = sharp_composite().trajectory.boundaries();
    double worst = 0.0;
    for (std::size_t i = b[1]; i <= b[2]; ++i) worst = std::max(worst, dev(s[i]));
    return worst;
  };

  out.push_back(check("protocols.composite_middle_arc_azimuth", 1e-6, [&] {
    return Outcome{middle_arc_max([](const Trajectory::Sample& x) {
                     return std::abs(to_bloch(x.state).phi - 1.5 * kPi);
                   }),
                   "lambda0 = 1e8 omega"};
  }));

  out.push_back(check("protocols.composite_middle_arc_variance", 1e-9, [&] {
    return Outcome{middle_arc_max([&](const Trajectory::Sample& x) {
                     return std::abs(energy_variance(x.state, {opt.omega, 0.0}) - opt.omega);
                   }),
                   "lambda0 = 1e8 omega"};
  }));

  out.push_back(check("protocols.bang_bang_constant_variance", 1e-6, [&] {
    const ProtocolRun run =
        run_protocol(spec_for(ProtocolKind::bang_bang, opt.omega, opt.gamma, opt.lambda0), opt.step);
    const auto& s = run.trajectory.samples();
    Outcome o;
    for (const auto& x : s) o.worst = std::max(o.worst, std::abs(x.delta_e - s.front().delta_e));
    return o;
  }));

  out.push_back(check("protocols.duration_monotone_in_c", 1e-12, [&] {
    Outcome o;
    const double threshold = opt.omega * opt.omega / opt.gamma;
    double prev = std::numeric_limits<double>::infinity();
    for (double f : {0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1.01, 1.1, 1.5, 2.0, 4.0, 10.0, 100.0}) {
      const double t = constrained_schedule(opt.omega, opt.gamma, f * threshold).total_duration();
      o.worst = std::max(o.worst, t - prev);
      prev = t;
    }
    o.detail = "worst = largest increase between consecutive c";
    return o;
  }));

  // ---------- bounds ----------
  std::vector<BoundsReport> grid_reports;
  auto sweep_reports = [&]() -> const std::vector<BoundsReport>& {
    if (!grid_reports.empty()) return grid_reports;
    for (ProtocolKind k : kinds) {
      for (int i = 0; i <= 20; ++i) {
        const double g = 0.5 * i * opt.omega;
        grid_reports.push_back(run_protocol(spec_for(k, opt.omega, g, opt.lambda0), opt.step).report);
      }
    }
    return grid_reports;
  };

  out.push_back(check("bounds.dominance", 1e-9, [&] {
    Outcome o;
    o.worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : sweep_reports()) {
      for (double v : {r.T_A.value, r.T_B.value, r.T_C.value, r.T_m.value, r.T_piecewise.value}) {
        o.worst = std::max(o.worst, v - r.T);
      }
      for (double v : {r.T_A_traj, r.T_B_traj, r.T_C_traj, r.T_piecewise_traj}) {
        o.worst = std::max(o.worst, v - r.duration);
      }
    }
    o.detail = "worst = max(bound - T)";
    return o;
  }));

  out.push_back(check("bounds.ordering", 1e-9, [&] {
    Outcome o;
    o.worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : sweep_reports()) {
      o.worst = std::max({o.worst, r.T_m.value - r.T_B.value, r.T_C.value - r.T_B.value,
                          r.T_B.value - r.T, r.T_C_traj - r.T_B_traj});
    }
    o.detail = "worst = max(T_m - T_B, T_C - T_B, T_B - T)";
    return o;
  }));

  out.push_back(check("bounds.saturation", 1e-3, [&] {
    Outcome o;
    std::ostringstream d;
    const BoundsReport zero =
        run_protocol(spec_for(ProtocolKind::composite_unconstrained, opt.omega, 0.0, opt.lambda0)).report;
    for (double v : {zero.T, zero.T_A.value, zero.T_B.value, zero.T_C.value, zero.T_piecewise.value}) {
      o.worst = std::max(o.worst, std::abs(v));
    }
    const double theta = theta_of(opt.omega, 1e3 * opt.omega);
    const double t = optimal_time_unconstrained(opt.omega, 1e3 * opt.omega);
    const std::pair<const char*, double> bounds[] = {
        {"T_A", bound_TA_closed(theta, opt.omega)},
        {"T_B", bound_TB_closed(theta, opt.omega)},
        {"T_C", bound_TC_closed(theta, opt.omega)},
        {"T_piecewise", piecewise_mt_closed(theta, opt.omega)}};
    for (const auto& [name, v] : bounds) {
      const double gap = (t - v) / t;
      o.worst = std::max(o.worst, gap);
      d << name << ":" << fmt_num(gap) << " ";
    }
    o.detail = "relative gap at gamma = 1e3 omega: " + d.str();
    return o;
  }));

  out.push_back(check("bounds.TA_TB_single_crossing", 0.0, [&] {
    int changes = 0;
    double prev = 0.0;
    double where = 0.0;
    for (int i = 1; i <= 4000; ++i) {
      const double g = 10.0 * opt.omega * i / 4000.0;
      const double th = theta_of(opt.omega, g);
      const double diff = bound_TA_closed(th, opt.omega) - bound_TB_closed(th, opt.omega);
      if (i > 1 && diff != 0.0 && prev != 0.0 && (diff > 0.0) != (prev > 0.0)) {
        ++changes;
        where = g;
      }
      if (diff != 0.0) prev = diff;
    }
    Outcome o;
    o.worst = std::abs(changes - 1);
    o.detail = std::to_string(changes) + " sign change(s), last near gamma = " + fmt_num(where);
    return o;
  }));

  out.push_back(check("bounds.closed_vs_trajectory", 1e-3, [&] {
    const ProtocolRun run = run_protocol(
        spec_for(ProtocolKind::composite_unconstrained, opt.omega, opt.gamma, opt.lambda0), opt.step);
    const BoundsReport& r = run.report;
    const double da = std::abs(r.T_A_traj - *r.T_A_closed);
    const double db = std::abs(r.T_B_traj - *r.T_B_closed);
    Outcome o;
    o.worst = std::max(da, db);
    o.detail = "lambda0 = " + fmt_num(opt.lambda0) + ", |dT_A| = " + fmt_num(da) +
               ", |dT_B| = " + fmt_num(db);
    return o;
  }));

  out.push_back(check("bounds.piecewise_mt_closed_tight", 1e-9, [&] {
    Outcome o;
    for (int i = 0; i <= 100; ++i) {
      const double g = 0.1 * i * opt.omega;
      const double gap = std::abs(piecewise_mt_closed(theta_of(opt.omega, g), opt.omega) -
                                  optimal_time_unconstrained(opt.omega, g));
      o.worst = std::max(o.worst, gap);
    }
    return o;
  }));

  out.push_back(check("bounds.piecewise_mt_trajectory_tight", 1e-4, [&] {
    const ProtocolRun run = run_protocol(
        spec_for(ProtocolKind::composite_unconstrained, opt.omega, opt.gamma, opt.lambda0), opt.step);
    return Outcome{std::abs(run.report.T_piecewise_traj - run.report.duration),
                   "lambda0 = " + fmt_num(opt.lambda0) + ", gap to the schedule duration"};
  }));

  out.push_back(check("bounds.TB_two_routes", 1e-10, [&] {
    Outcome o;
    for (auto& [k, make] : runs) {
      const ProtocolRun run = make();
      o.worst = std::max(o.worst, std::abs(bound_TB(run.trajectory) -
                                           bound_TB_mean_variance(run.trajectory)));
    }
    return o;
  }));

  return out;
}

}  // namespace qsl
