#include "mpass/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace mpass {

const char* to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::SettledAtCritical: return "SettledAtCritical";
    case StopReason::SublevelEntered: return "SublevelEntered";
    case StopReason::PredicateMet: return "PredicateMet";
    case StopReason::BudgetExhausted: return "BudgetExhausted";
    case StopReason::NonFinite: return "NonFinite";
  }
  return "Unknown";
}

double FlowTrajectory::max_step() const {
  double m = 0.0;
  for (std::size_t k = 1; k < samples.size(); ++k) m = std::max(m, samples[k].t - samples[k - 1].t);
  return m;
}

Vector flow_velocity(const Functional& f, const Vector& x) {
  const Vector g = f.gradient(x);
  return -g / (1.0 + g.norm());
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct State {
  Vector x;
  double f = 0.0;
  double gnorm = 0.0;
  Vector v;  // flow velocity at x
};

bool evaluate(const Functional& f, const Vector& x, State& out) {
  if (!x.allFinite()) return false;
  const double fv = f.value(x);
  const Vector g = f.gradient(x);
  if (!std::isfinite(fv) || g.size() != x.size() || !g.allFinite()) return false;
  out.x = x;
  out.f = fv;
  out.gnorm = g.norm();
  out.v = -g / (1.0 + out.gnorm);
  return std::isfinite(out.gnorm);
}

bool velocity(const Functional& f, const Vector& x, Vector& v) {
  if (!x.allFinite()) return false;
  const Vector g = f.gradient(x);
  if (g.size() != x.size() || !g.allFinite()) return false;
  v = -g / (1.0 + g.norm());
  return true;
}

struct StepResult {
  bool finite = false;
  State next;
  double err = 0.0;  // scaled error norm, <= 1 is acceptable
};

StepResult dp_step(const Functional& f, const State& s, double h, const StepControl& ctrl) {
  StepResult r;
  const Vector& k1 = s.v;
  Vector k2, k3, k4, k5, k6;
  if (!velocity(f, s.x + h * (a21 * k1), k2)) return r;
  if (!velocity(f, s.x + h * (a31 * k1 + a32 * k2), k3)) return r;
  if (!velocity(f, s.x + h * (a41 * k1 + a42 * k2 + a43 * k3), k4)) return r;
  if (!velocity(f, s.x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5)) return r;
  if (!velocity(f, s.x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6)) return r;
  const Vector x_new = s.x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  if (!evaluate(f, x_new, r.next)) return r;
  const Vector& k7 = r.next.v;
  const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  const Vector scale = (ctrl.atol + ctrl.rtol * s.x.cwiseAbs().cwiseMax(x_new.cwiseAbs()).array()).matrix();
  r.err = err.cwiseQuotient(scale).lpNorm<Eigen::Infinity>();
  r.finite = std::isfinite(r.err);
  return r;
}

bool rises(const State& from, const State& to, const StepControl& ctrl) {
  return to.f > from.f + 10.0 * (ctrl.atol + ctrl.rtol * std::abs(from.f));
}

// Fixed-length step; a monotonicity violation splits it into halves.
bool fixed_step(const Functional& f, const State& s, double h, const StepControl& ctrl, State& out, int depth = 0) {
  StepResult r = dp_step(f, s, h, ctrl);
  if (r.finite && (!rises(s, r.next, ctrl) || depth >= 20)) {
    out = std::move(r.next);
    return true;
  }
  if (depth >= 20) return false;
  State mid;
  return fixed_step(f, s, 0.5 * h, ctrl, mid, depth + 1) && fixed_step(f, mid, 0.5 * h, ctrl, out, depth + 1);
}

double growth(double err) {
  if (err <= 0.0) return 5.0;
  return std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
}

// Advances `s` by at most `h_try` (adaptive) and reports the step taken. Returns false on blow-up.
bool adaptive_step(const Functional& f, State& s, double& h_try, double h_cap, const StepControl& ctrl,
                   double& taken) {
  const double proposed = h_try;
  double h = std::min(h_try, h_cap);
  for (;;) {
    const bool at_floor = h <= ctrl.h_min;
    StepResult r = dp_step(f, s, h, ctrl);
    if (!r.finite) {
      if (at_floor) return false;
      h = std::max(0.5 * h, ctrl.h_min);
      continue;
    }
    if (!at_floor && r.err > 1.0) {
      h = std::max(h * growth(r.err), ctrl.h_min);
      continue;
    }
    if (!at_floor && rises(s, r.next, ctrl)) {
      h = std::max(0.5 * h, ctrl.h_min);
      continue;
    }
    taken = h;
    s = std::move(r.next);
    // A step clipped by the cap says nothing about the admissible length.
    const bool clipped = h == h_cap && h_cap < proposed;
    h_try = clipped ? proposed : std::clamp(h * growth(r.err), ctrl.h_min, ctrl.h_max);
    return true;
  }
}

FlowSample to_sample(double t, const State& s) { return {t, s.x, s.f, s.gnorm}; }

bool settled(const std::vector<FlowSample>& samples, double settle_tol) {
  const FlowSample& now = samples.back();
  if (!(now.grad_norm < settle_tol)) return false;
  const double t_ref = now.t - 1.0;
  auto it = std::upper_bound(samples.begin(), samples.end(), t_ref,
                             [](double v, const FlowSample& s) { return v < s.t; });
  const FlowSample& ref = it == samples.begin() ? samples.front() : *std::prev(it);
  return ref.f_val - now.f_val < settle_tol * settle_tol;
}

}  // namespace

FlowTrajectory integrate_flow(const Functional& f, const Vector& x0, const Tolerances& tol,
                              const StopCondition& stop) {
  require_finite(x0, "flow start");
  if (x0.size() != f.dim) throw Error(ErrorCode::BadDimension, "flow start dimension differs from functional");
  const StepControl& ctrl = tol.step_ctrl;

  FlowTrajectory traj;
  traj.start = x0;
  State s;
  if (!evaluate(f, x0, s)) throw Error(ErrorCode::NonFinite, "functional is not finite at the flow start");
  traj.samples.push_back(to_sample(0.0, s));

  auto check = [&]() -> bool {
    const FlowSample& last = traj.samples.back();
    if (stop.level && last.f_val <= *stop.level) {
      traj.stop_reason = StopReason::SublevelEntered;
      return true;
    }
    if (stop.predicate && stop.predicate(last)) {
      traj.stop_reason = StopReason::PredicateMet;
      return true;
    }
    if (stop.on_settle && settled(traj.samples, tol.settle_tol)) {
      traj.stop_reason = StopReason::SettledAtCritical;
      return true;
    }
    return false;
  };
  if (check()) return traj;

  double t = 0.0;
  double h = ctrl.fixed_step ? ctrl.h_fixed : std::min(ctrl.h_init, ctrl.h_max);
  std::size_t step = 0;
  while (t < tol.t_budget) {
    const double remaining = tol.t_budget - t;
    double taken = 0.0;
    if (ctrl.fixed_step) {
      taken = std::min(ctrl.h_fixed, remaining);
      State next;
      if (!fixed_step(f, s, taken, ctrl, next)) {
        traj.stop_reason = StopReason::NonFinite;
        return traj;
      }
      s = std::move(next);
      ++step;
      t = remaining <= ctrl.h_fixed ? tol.t_budget : static_cast<double>(step) * ctrl.h_fixed;
    } else {
      if (!adaptive_step(f, s, h, remaining, ctrl, taken)) {
        traj.stop_reason = StopReason::NonFinite;
        return traj;
      }
      t = taken >= remaining ? tol.t_budget : t + taken;
    }
    traj.samples.push_back(to_sample(t, s));
    if (check()) return traj;
  }
  traj.stop_reason = StopReason::BudgetExhausted;
  return traj;
}

Vector advance_flow(const Functional& f, const Vector& x0, double duration, const StepControl& ctrl) {
  require_finite(x0, "flow start");
  if (duration < 0) throw Error(ErrorCode::InvalidArgument, "flow duration must be nonnegative");
  State s;
  if (!evaluate(f, x0, s)) throw Error(ErrorCode::NonFinite, "functional is not finite at the flow start");
  double t = 0.0;
  double h = std::min(ctrl.h_init, ctrl.h_max);
  while (t < duration) {
    const double remaining = duration - t;
    double taken = 0.0;
    if (ctrl.fixed_step) {
      taken = std::min(ctrl.h_fixed, remaining);
      State next;
      if (!fixed_step(f, s, taken, ctrl, next)) throw Error(ErrorCode::NonFinite, "flow blew up");
      s = std::move(next);
    } else if (!adaptive_step(f, s, h, remaining, ctrl, taken)) {
      throw Error(ErrorCode::NonFinite, "flow blew up");
    }
    t = taken >= remaining ? duration : t + taken;
  }
  return s.x;
}

std::optional<double> level_crossing_time(const FlowTrajectory& traj, double level) {
  const auto& smp = traj.samples;
  for (std::size_t k = 0; k < smp.size(); ++k) {
    if (smp[k].f_val > level) continue;
    if (k == 0) return 0.0;
    const double fa = smp[k - 1].f_val;
    const double fb = smp[k].f_val;
    const double w = fa == fb ? 1.0 : (fa - level) / (fa - fb);
    return smp[k - 1].t + w * (smp[k].t - smp[k - 1].t);
  }
  return std::nullopt;
}

std::optional<FlowSample> refine_level_crossing(const Functional& f, const FlowTrajectory& traj, double level,
                                                const StepControl& ctrl) {
  const auto& smp = traj.samples;
  auto hit = std::find_if(smp.begin(), smp.end(), [level](const FlowSample& s) { return s.f_val <= level; });
  if (hit == smp.end()) return std::nullopt;
  if (hit == smp.begin()) return *hit;
  const FlowSample& lo = *std::prev(hit);
  const FlowSample& hi = *hit;

  // Illinois regula falsi on the time offset from `lo`.
  double ta = 0.0, fa = lo.f_val - level;
  double tb = hi.t - lo.t, fb = hi.f_val - level;
  Vector xb = hi.x;
  int side = 0;
  for (int it = 0; it < 60 && fb != 0.0; ++it) {
    if (std::abs(tb - ta) <= 1e-15 * std::max(1.0, hi.t)) break;
    const double tc = (fa * tb - fb * ta) / (fa - fb);
    const Vector xc = advance_flow(f, lo.x, tc, ctrl);
    const double fc = f.value(xc) - level;
    if (std::abs(fc) <= 1e-13 * std::max(1.0, std::abs(level))) {
      tb = tc;
      fb = fc;
      xb = xc;
      break;
    }
    if ((fc > 0) == (fa > 0)) {
      ta = tc;
      fa = fc;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      tb = tc;
      fb = fc;
      xb = xc;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
  }
  return FlowSample{lo.t + tb, xb, f.value(xb), f.gradient(xb).norm()};
}

Lemma1Check lemma1_bound_check(const FlowTrajectory& traj, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorCode::GammaOutOfRange, "gamma must lie in (0, 1]");
  if (traj.samples.size() < 2) throw Error(ErrorCode::InvalidArgument, "trajectory needs at least two samples");
  Lemma1Check out;
  const auto& smp = traj.samples;
  for (std::size_t k = 1; k < smp.size(); ++k)
    if (0.5 * (smp[k - 1].grad_norm + smp[k].grad_norm) >= gamma) out.measured += smp[k].t - smp[k - 1].t;
  out.bound = 2.0 * (smp.front().f_val - smp.back().f_val) / (gamma * gamma);
  return out;
}

const FlowSample& extract_ps_sample(const FlowTrajectory& traj) {
  if (traj.samples.empty()) throw Error(ErrorCode::InvalidArgument, "empty trajectory");
  return *std::min_element(traj.samples.begin(), traj.samples.end(),
                           [](const FlowSample& a, const FlowSample& b) { return a.grad_norm < b.grad_norm; });
}

}  // namespace mpass
