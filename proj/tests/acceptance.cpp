// Acceptance checks, one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when everything passes).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qsl/bounds.hpp"
#include "qsl/sweep.hpp"

using namespace qsl;

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << " [failed: " << what << "]";
    }
  }
};

// budget_s <= 0: no runtime limit.
int run(int id, const char* title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.passed = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0) o.require(secs < budget_s, "runtime budget " + num(budget_s) + " s");
  std::printf("%s %d %s (%.2f s):%s\n", o.passed ? "PASS" : "FAIL", id, title, secs,
              o.detail.str().c_str());
  std::fflush(stdout);
  return o.passed ? 0 : 1;
}

std::vector<SweepRow> sweep(ProtocolKind kind, int steps, double gmin, double gmax,
                            std::optional<double> lambda0 = std::nullopt) {
  SweepConfig c;
  c.protocol = kind;
  c.gamma_min = gmin;
  c.gamma_max = gmax;
  c.gamma_steps = steps;
  c.lambda0 = lambda0;
  return run_sweep(c);
}

// 1: T(gamma) against s(theta) / (2 omega).
void optimal_time_formula(Outcome& o) {
  double worst = 0.0;
  for (double g : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    const double T = optimal_time_unconstrained(1.0, g);
    worst = std::max(worst, std::abs(T - endpoint_distance(theta_of(1.0, g)) / 2.0));
  }
  const double t2 = optimal_time_unconstrained(1.0, 2.0);
  o.detail << " max|T - s/2w| = " << num(worst) << ", T(gamma=2) = " << num(t2);
  o.require(worst <= 1e-12, "T vs s/(2 omega) within 1e-12");
  o.require(std::abs(t2 - 1.1071487) <= 5e-8, "T(2) = 1.1071487");
}

// 2: every protocol lands on the target.
void protocol_correctness(Outcome& o) {
  const auto composite = run_protocol({ProtocolKind::composite_unconstrained, 1.0, 2.0, 1e4, 0.0});
  const auto bob = run_protocol({ProtocolKind::bang_off_bang, 1.0, 2.0, 0.0, 1.5 / 2.0});
  const auto bb = run_protocol({ProtocolKind::bang_bang, 1.0, 2.0, 0.0, 0.5 / 2.0});
  o.detail << " composite " << num(composite.report.infidelity) << ", bang_off_bang "
           << num(bob.report.infidelity) << ", bang_bang " << num(bb.report.infidelity);
  o.require(composite.report.infidelity <= 1e-4, "composite infidelity <= 1e-4");
  o.require(bob.report.infidelity <= 1e-9, "bang_off_bang infidelity <= 1e-9");
  o.require(bb.report.infidelity <= 1e-9, "bang_bang infidelity <= 1e-9");
}

// 3: unconstrained curves.
void unconstrained_curves(Outcome& o) {
  const auto rows = sweep(ProtocolKind::composite_unconstrained, 200, 0.0, 10.0);
  for (const auto& r : rows) o.require(r.report.has_value(), "row at gamma " + num(r.gamma));
  if (!o.passed) return;

  // (a) T_A vanishes exactly for theta >= theta*.
  const double theta_star = ta_vanishing_theta();
  int zero_rows = 0;
  bool consistent = true;
  for (const auto& r : rows) {
    if (r.gamma == 0.0) continue;
    const bool zero = r.report->T_A.value == 0.0;
    zero_rows += zero;
    if (zero != (r.report->theta >= theta_star)) consistent = false;
  }
  o.detail << " (a) theta* = " << num(theta_star) << ", " << zero_rows << " rows with T_A = 0;";
  o.require(std::abs(theta_star - 0.93) <= 0.01, "theta* ~ 0.93");
  o.require(zero_rows > 0 && consistent, "T_A = 0 region matches theta >= theta*");

  // (b) single sign change of T_A - T_B on (0, 10].
  int changes = 0;
  double last_sign = 0.0;
  double crossing = 0.0;
  for (const auto& r : rows) {
    if (r.gamma == 0.0) continue;
    const double d = r.report->T_A.value - r.report->T_B.value;
    if (d == 0.0) continue;
    const double sg = d > 0.0 ? 1.0 : -1.0;
    if (last_sign != 0.0 && sg != last_sign) {
      ++changes;
      crossing = r.gamma;
    }
    last_sign = sg;
  }
  o.detail << " (b) " << changes << " sign change(s) near gamma = " << num(crossing) << ";";
  o.require(changes == 1, "exactly one sign change of T_A - T_B");

  // (c) T_C clamped where its raw value is negative.
  int clamped = 0;
  bool clamp_ok = true;
  for (const auto& r : rows) {
    if (r.gamma == 0.0) continue;
    if (*r.report->T_C_raw < 0.0) {
      ++clamped;
      clamp_ok = clamp_ok && r.report->T_C.value == 0.0;
    } else {
      clamp_ok = clamp_ok && r.report->T_C.value == *r.report->T_C_raw;
    }
  }
  o.detail << " (c) " << clamped << " clamped rows;";
  o.require(clamped > 0 && clamp_ok, "T_C clamped region");

  // (d) saturation at gamma = 1e3 omega.
  const auto big = run_protocol({ProtocolKind::composite_unconstrained, 1.0, 1e3, 10.0, 0.0});
  const BoundsReport& b = big.report;
  const double gaps[] = {(b.T - b.T_A.value) / b.T, (b.T - b.T_B.value) / b.T,
                         (b.T - b.T_C.value) / b.T, (b.T - b.T_piecewise.value) / b.T};
  const char* names[] = {"T_A", "T_B", "T_C", "T_piecewise"};
  o.detail << " (d) relative gaps at gamma = 1e3:";
  for (int i = 0; i < 4; ++i) {
    o.detail << ' ' << names[i] << ' ' << num(gaps[i]);
    o.require(gaps[i] <= 1e-3, std::string(names[i]) + " within 1e-3 of T");
  }
}

// 4: constrained curves.
void constrained_curves(Outcome& o) {
  const auto bob = sweep(ProtocolKind::bang_off_bang, 200, 0.0, 10.0);
  const auto bb = sweep(ProtocolKind::bang_bang, 200, 0.0, 10.0);
  for (const auto* rows : {&bob, &bb}) {
    for (const auto& r : *rows) o.require(r.report.has_value(), "row at gamma " + num(r.gamma));
  }
  if (!o.passed) return;

  double min_margin = INFINITY;
  for (std::size_t i = 1; i + 1 < bob.size(); ++i) {
    const auto& r = *bob[i].report;
    min_margin = std::min(min_margin, r.T - std::max(r.T_A.value, r.T_B.value));
  }
  o.detail << " bang_off_bang min(T - max(T_A, T_B)) = " << num(min_margin) << ";";
  o.require(min_margin > 0.0, "bang_off_bang T strictly above T_A and T_B");

  double spread = 0.0;
  for (const auto& row : bb) {
    const auto& r = *row.report;
    spread = std::max({spread, std::abs(r.T_A_traj - r.T_B_traj), std::abs(r.T_C_traj - r.T_B_traj),
                       std::abs(r.T_A_traj - r.T_C_traj)});
  }
  o.detail << " bang_bang max spread of T_A, T_B, T_C = " << num(spread) << ";";
  o.require(spread <= 1e-6, "bang_bang T_A = T_B = T_C within 1e-6");

  double tm_excess = -INFINITY;
  for (const auto* rows : {&bob, &bb}) {
    for (const auto& row : *rows) {
      const auto& r = *row.report;
      const double lowest =
          std::min({r.T_A.value, r.T_B.value, r.T_C.value, r.T_piecewise.value});
      tm_excess = std::max(tm_excess, r.T_m.value - lowest);
    }
  }
  o.detail << " max(T_m - other bounds) = " << num(tm_excess);
  o.require(tm_excess <= 1e-9, "T_m below every other bound");
}

// 5: path length against endpoint distance.
void geometric_inequality(Outcome& o) {
  std::mt19937_64 rng(20130601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 4);
  auto random_state = [&] { return from_bloch(std::acos(1.0 - 2.0 * unit(rng)), 2 * kPi * unit(rng)); };

  double worst_violation = -INFINITY;
  double worst_geodesic_gap = 0.0;
  double smallest_other_gap = INFINITY;
  int geodesics = 0;
  for (int i = 0; i < 200; ++i) {
    const bool geodesic = i % 4 == 0;
    PureState psi0 = random_state();
    std::vector<ControlSegment> segs;
    if (geodesic) {
      // lambda = 0 arc starting on the x = 0 great circle, rotation below pi.
      psi0 = from_bloch(kPi * unit(rng), unit(rng) < 0.5 ? kPi / 2 : 1.5 * kPi);
      segs.push_back({0.0, (0.05 + 0.9 * unit(rng)) * kPi / 2});
      ++geodesics;
    } else {
      for (int k = count(rng); k > 0; --k) segs.push_back({8.0 * unit(rng) - 4.0, 0.2 + 0.8 * unit(rng)});
    }
    const ControlSchedule sched(1.0, segs);
    const Trajectory tr = integrate_rk4(psi0, sched);
    const double d = fubini_study_distance(tr.front().state, tr.back().state);
    const double len = path_length(tr);
    worst_violation = std::max(worst_violation, d - len);
    if (geodesic) worst_geodesic_gap = std::max(worst_geodesic_gap, std::abs(len - d));
    else smallest_other_gap = std::min(smallest_other_gap, len - d);
  }
  o.detail << " max(d - L) = " << num(worst_violation) << ", " << geodesics
           << " geodesics with max|L - d| = " << num(worst_geodesic_gap)
           << ", min(L - d) elsewhere = " << num(smallest_other_gap);
  o.require(worst_violation <= 1e-9, "L >= d - 1e-9");
  o.require(worst_geodesic_gap <= 1e-6, "equality on geodesics");
  o.require(smallest_other_gap > 1e-6, "strict inequality off geodesics");
}

// 6: piecewise Mandelstam-Tamm composition for the composite pulse.
void piecewise_tightness(Outcome& o) {
  double closed_gap = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double g = 0.1 * i;
    const double th = theta_of(1.0, g);
    closed_gap = std::max(closed_gap,
                          std::abs(piecewise_mt_closed(th, 1.0) - optimal_time_unconstrained(1.0, g)));
  }
  const auto run = run_protocol({ProtocolKind::composite_unconstrained, 1.0, 2.0, 1e4, 0.0});
  const BoundsReport& r = run.report;
  const double traj_gap = std::abs(r.T_piecewise_traj - r.duration);
  o.detail << " closed form max|sum - T| = " << num(closed_gap)
           << "; lambda0 = 1e4 trajectory: |sum - duration| = " << num(traj_gap)
           << " (duration - T = " << num(r.duration - r.T)
           << ", |sum - T| = " << num(std::abs(r.T_piecewise_traj - r.T)) << ")";
  o.require(closed_gap <= 1e-9, "closed form within 1e-9");
  o.require(traj_gap <= 1e-4, "trajectory within 1e-4 of its evolution time");
}

// 7: RK4 against the closed-form propagator, Bloch variance against matrix moments.
void oracle_equivalences(Outcome& o) {
  double worst_rk4 = 0.0;
  for (double g : {0.5, 2.0, 7.0}) {
    const std::vector<ProtocolSpec> specs{
        {ProtocolKind::composite_unconstrained, 1.0, g, 10.0, 0.0},
        {ProtocolKind::composite_unconstrained, 1.0, g, 1e4, 0.0},
        {ProtocolKind::bang_off_bang, 1.0, g, 0.0, 1.5 / g},
        {ProtocolKind::bang_bang, 1.0, g, 0.0, 0.5 / g},
    };
    for (const auto& spec : specs) {
      const ControlSchedule s = build_schedule(spec);
      const PureState psi0 = initial_state(spec.omega, spec.gamma);
      const Trajectory tr = integrate_rk4(psi0, s);
      worst_rk4 = std::max(worst_rk4, infidelity(tr.back().state, propagate_schedule(psi0, s)));
    }
  }

  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  double worst_var = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const PureState psi = PureState::normalized({Complex(n(rng), n(rng)), Complex(n(rng), n(rng))});
    const HamiltonianParams h{u(rng), u(rng)};
    worst_var = std::max(worst_var, std::abs(energy_variance(psi, h) - energy_variance_matrix(psi, h)));
  }
  o.detail << " max RK4 infidelity = " << num(worst_rk4) << ", max variance gap = " << num(worst_var);
  o.require(worst_rk4 <= 1e-8, "RK4 vs closed form <= 1e-8");
  o.require(worst_var <= 1e-12, "variance forms within 1e-12");
}

}  // namespace

int main() {
  int failed = 0;
  failed += run(1, "optimal-time formula", 1.0, optimal_time_formula);
  failed += run(2, "protocol correctness", 10.0, protocol_correctness);
  failed += run(3, "unconstrained bound curves", 60.0, unconstrained_curves);
  failed += run(4, "constrained bound curves", 120.0, constrained_curves);
  failed += run(5, "geometric inequality", 30.0, geometric_inequality);
  failed += run(6, "piecewise MT tightness", 0.0, piecewise_tightness);
  failed += run(7, "oracle equivalences", 0.0, oracle_equivalences);
  std::printf("%d of 7 criteria failed\n", failed);
  return failed;
}
