#include "mpass/bisect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpass {

const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::GradTolMet: return "GradTolMet";
    case Termination::BudgetExhausted: return "BudgetExhausted";
    case Termination::BracketDegenerate: return "BracketDegenerate";
  }
  return "Unknown";
}

double distinctness_threshold(const Vector& x1) {
  return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, x1.norm());
}

BisectState BisectState::initial(const PathCurve& path, OmegaVerdict v1, const OmegaVerdict& v2) {
  BisectState st;
  st.x1 = path(0.0);
  st.x2 = path(1.0);
  st.xm = path(0.5);
  st.home = v1.label;
  st.x2_outcome = v2.outcome;
  st.x1_flow = std::move(v1.witness);
  st.flow_lines = v1.flow_lines_used + v2.flow_lines_used;
  return st;
}

BisectState bisect_step(const Functional& f, const PathCurve& path, const BisectState& state,
                        const ComponentAtlas& atlas, const Tolerances& tol) {
  if ((state.x1 - state.x2).norm() <= distinctness_threshold(state.x1))
    throw Error(ErrorCode::BracketDegenerate,
                "bracket ends indistinct at iteration " + std::to_string(state.iter));
  OmegaVerdict v = classify_omega(f, state.xm, atlas, tol);
  BisectState next;
  next.iter = state.iter + 1;
  next.home = state.home;
  next.flow_lines = state.flow_lines + v.flow_lines_used;
  if (v.in_component(state.home)) {
    next.s1 = state.sm;
    next.x1 = state.xm;
    next.x1_flow = std::move(v.witness);
    next.s2 = state.s2;
    next.x2 = state.x2;
    next.x2_outcome = state.x2_outcome;
  } else {
    next.s1 = state.s1;
    next.x1 = state.x1;
    next.x1_flow = state.x1_flow;
    next.s2 = state.sm;
    next.x2 = state.xm;
    next.x2_outcome = v.outcome;
  }
  next.sm = 0.5 * (next.s1 + next.s2);
  next.xm = path(next.sm);
  return next;
}

MpCandidate extract_candidate(const Functional& f, const BisectState& state, double level_c,
                              const StepControl& ctrl, std::size_t keep_trace) {
  const auto& smp = state.x1_flow.samples;
  MpCandidate c;
  c.iter = state.iter;
  c.depth = state.iter;
  c.s1 = state.s1;
  c.s2 = state.s2;
  c.x1 = state.x1;
  c.f_x1 = smp.front().f_val;
  c.bracket_width = state.s2 - state.s1;
  c.flow_lines_used = state.flow_lines;

  const auto crossing = level_crossing_time(state.x1_flow, level_c);
  c.T_i = crossing ? *crossing : smp.back().t;
  c.admissible = c.f_x1 > level_c && c.T_i > 0.0;

  // Samples inside [0, T_i].
  std::size_t end = 0;
  while (end < smp.size() && smp[end].t <= c.T_i) ++end;
  end = std::max<std::size_t>(end, 1);

  std::size_t j = 0;
  for (std::size_t k = 1; k < end; ++k)
    if (smp[k].grad_norm < smp[j].grad_norm) j = k;
  c.y_tilde = smp[j].x;
  c.f_val = smp[j].f_val;
  c.grad_norm = smp[j].grad_norm;
  c.T_tilde_i = smp[j].t;

  // Three-point parabolic refinement of the argmin time.
  if (j > 0 && j + 1 < end) {
    const double t0 = smp[j - 1].t, t1 = smp[j].t, t2 = smp[j + 1].t;
    const double g0 = smp[j - 1].grad_norm, g1 = smp[j].grad_norm, g2 = smp[j + 1].grad_norm;
    const double denom = (t0 - t1) * (t0 - t2) * (t1 - t2);
    const double a = (t2 * (g1 - g0) + t1 * (g0 - g2) + t0 * (g2 - g1)) / denom;
    const double b = (t2 * t2 * (g0 - g1) + t1 * t1 * (g2 - g0) + t0 * t0 * (g1 - g2)) / denom;
    if (a > 0) {
      const double ts = -b / (2 * a);
      if (ts > t0 && ts < t2 && ts != t1) {
        const Vector y = advance_flow(f, smp[j - 1].x, ts - t0, ctrl);
        const double gy = f.gradient(y).norm();
        if (gy < c.grad_norm) {
          c.y_tilde = y;
          c.f_val = f.value(y);
          c.grad_norm = gy;
          c.T_tilde_i = ts;
        }
      }
    }
  }

  if (keep_trace > 0) {
    const std::size_t n = std::min({keep_trace, smp.size(), end + 1});
    c.trace.assign(smp.begin(), smp.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return c;
}

RunReport run_alg1b(const Functional& f, const PathCurve& path, const ComponentAtlas& atlas,
                    const Tolerances& tol, const RunOptions& opts) {
  tol.validate();
  if (path.dim() != f.dim) throw Error(ErrorCode::BadDimension, "path dimension differs from functional");
  OmegaVerdict v1 = classify_omega(f, path(0.0), atlas, tol);
  if (v1.outcome != OmegaVerdict::Outcome::InComponent)
    throw Error(ErrorCode::InvalidEndpoints, "path start does not settle into a tracked component");
  const OmegaVerdict v2 = classify_omega(f, path(1.0), atlas, tol);
  if (v2.in_component(v1.label))
    throw Error(ErrorCode::InvalidEndpoints, "path end settles into the same component as its start");

  RunReport report;
  report.level_c = atlas.level_c;
  BisectState state = BisectState::initial(path, std::move(v1), v2);
  report.termination = Termination::BudgetExhausted;
  bool has_best = false;
  for (int i = 0; i < tol.n_max; ++i) {
    try {
      state = bisect_step(f, path, state, atlas, tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BracketDegenerate) throw;
      report.termination = Termination::BracketDegenerate;
      break;
    }
    MpCandidate cand = extract_candidate(f, state, atlas.level_c, tol.step_ctrl, opts.keep_trace);
    const bool improved = cand.admissible && (!has_best || cand.grad_norm < report.best.grad_norm);
    report.candidates.push_back(std::move(cand));
    if (improved) {
      report.best = report.candidates.back();
      has_best = true;
    }
    if (has_best && report.best.grad_norm < tol.grad_tol) {
      report.termination = Termination::GradTolMet;
      break;
    }
  }
  report.total_flow_lines = state.flow_lines;
  report.final_state = std::move(state);
  return report;
}

namespace {

// First time the flows from a and b are `sep` apart; both ends are advanced to it.
// Returns false when the time budget runs out first.
bool separate(const Functional& f, Vector& a, Vector& b, double sep, const Tolerances& tol) {
  if ((a - b).norm() >= sep) return true;
  const double dt = std::min(0.05, tol.step_ctrl.h_max);
  double t = 0.0;
  while (t < tol.t_budget) {
    Vector na = advance_flow(f, a, dt, tol.step_ctrl);
    Vector nb = advance_flow(f, b, dt, tol.step_ctrl);
    t += dt;
    if ((na - nb).norm() >= sep) {
      double lo = 0.0, hi = dt;
      for (int it = 0; it < 30; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Vector ma = advance_flow(f, a, mid, tol.step_ctrl);
        const Vector mb = advance_flow(f, b, mid, tol.step_ctrl);
        if ((ma - mb).norm() >= sep) {
          hi = mid;
          na = ma;
          nb = mb;
        } else {
          lo = mid;
        }
      }
      a = std::move(na);
      b = std::move(nb);
      return true;
    }
    a = std::move(na);
    b = std::move(nb);
  }
  return false;
}

}  // namespace

RunReport run_alg1c(const Functional& f, const Vector& x1, const Vector& x2, const PathCurve& joining,
                    const ComponentAtlas& atlas, const Tolerances& tol, const RunOptions& opts) {
  tol.validate();
  if ((x1 - x2).norm() == 0.0) throw Error(ErrorCode::InvalidEndpoints, "endpoints coincide");
  const double slack = distinctness_threshold(x1) + tol.settle_tol;
  if ((joining.front() - x1).norm() > slack || (joining.back() - x2).norm() > slack)
    throw Error(ErrorCode::InvalidEndpoints, "joining path does not connect the endpoints");

  RunReport total;
  total.level_c = atlas.level_c;
  PathCurve path = joining;
  int budget = tol.n_max;
  bool has_best = false;
  for (int round = 0;; ++round) {
    Tolerances round_tol = tol;
    round_tol.n_max = budget;
    RunReport r = run_alg1b(f, path, atlas, round_tol, opts);
    const int iter_offset = total.candidates.empty() ? 0 : total.candidates.back().iter;
    for (auto& c : r.candidates) {
      c.iter += iter_offset;
      c.flow_lines_used += total.total_flow_lines;
      const bool improved = c.admissible && (!has_best || c.grad_norm < total.best.grad_norm);
      total.candidates.push_back(std::move(c));
      if (improved) {
        total.best = total.candidates.back();
        has_best = true;
      }
    }
    total.total_flow_lines += r.total_flow_lines;
    total.final_state = std::move(r.final_state);
    if (has_best && total.best.grad_norm < tol.grad_tol) {
      total.termination = Termination::GradTolMet;
      return total;
    }
    if (budget - 1 <= 0) {
      total.termination = Termination::BudgetExhausted;
      return total;
    }

    const double sep = std::ldexp(tol.sep_eps, -round);
    Vector a = total.final_state.x1;
    Vector b = total.final_state.x2;
    if (!separate(f, a, b, sep, tol))
      throw Error(ErrorCode::SeparationFailed, "bracket flows did not separate within the time budget");
    total.total_flow_lines += 2;
    path = PathCurve::segment(a, b);
    --budget;
    ++total.restarts;
  }
}

MpCandidate ps_from_below(const Functional& f, const RunReport& report, const ComponentAtlas& atlas,
                          const Tolerances& tol, int k, std::optional<double> reference) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  const double target = reference.value_or(atlas.level_c) - 1.0 / k;
  const Vector& x1 = report.final_state.x1;
  const FlowTrajectory traj = integrate_flow(f, x1, tol, StopCondition::at_level(target));
  if (traj.stop_reason != StopReason::SublevelEntered)
    throw Error(ErrorCode::LevelNotReached, "flow stopped above level " + std::to_string(target));
  const auto y = refine_level_crossing(f, traj, target, tol.step_ctrl);
  MpCandidate c;
  c.iter = report.final_state.iter;
  c.s1 = report.final_state.s1;
  c.s2 = report.final_state.s2;
  c.x1 = x1;
  c.f_x1 = traj.samples.front().f_val;
  c.y_tilde = y->x;
  c.f_val = y->f_val;
  c.grad_norm = y->grad_norm;
  c.T_i = y->t;
  c.T_tilde_i = y->t;
  c.bracket_width = c.s2 - c.s1;
  c.flow_lines_used = report.total_flow_lines + 1;
  return c;
}

}  // namespace mpass
