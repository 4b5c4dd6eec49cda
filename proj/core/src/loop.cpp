#include "mpass/loop.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

namespace mpass {

StrictMinContext StrictMinContext::make(const Functional& f, const Vector& x_bar, double eps_nbhd, double ball_r,
                                        double level_c, double settle_tol) {
  require_finite(x_bar, "strict minimizer");
  if (!(eps_nbhd > 0) || !(ball_r > 0))
    throw Error(ErrorCode::InvalidArgument, "neighbourhood size and ball radius must be positive");
  if (!(f.gradient(x_bar).norm() < settle_tol))
    throw Error(ErrorCode::InvalidArgument, "x_bar is not a critical point within settle_tol");
  StrictMinContext ctx;
  ctx.x_bar = x_bar;
  ctx.c_bar = f.value(x_bar);
  ctx.eps_nbhd = eps_nbhd;
  ctx.entry_level = ctx.c_bar + eps_nbhd;
  ctx.ball_r = ball_r;
  if (!(ctx.entry_level < level_c))
    throw Error(ErrorCode::InvalidArgument, "entry level must lie below the working sublevel");
  return ctx;
}

namespace {

double angle_between(const Vector& p, const Vector& q, const Vector& o) {
  const double ax = p[0] - o[0], ay = p[1] - o[1];
  const double bx = q[0] - o[0], by = q[1] - o[1];
  if ((ax == 0 && ay == 0) || (bx == 0 && by == 0))
    throw Error(ErrorCode::InvalidArgument, "loop passes through the obstacle");
  const double cross = ax * by - ay * bx, dot = ax * bx + ay * by;
  if (dot < 0 && std::abs(cross) <= 1e-14 * std::hypot(ax, ay) * std::hypot(bx, by))
    throw Error(ErrorCode::InvalidArgument, "loop passes through the obstacle");
  return std::atan2(cross, dot);
}

double sweep(const PathCurve& g, const Vector& o, double s0, const Vector& p0, double s1, const Vector& p1,
             int depth) {
  const double d = angle_between(p0, p1, o);
  if (std::abs(d) <= 0.05 || depth >= 40) return d;
  const double sm = 0.5 * (s0 + s1);
  const Vector pm = g(sm);
  return sweep(g, o, s0, p0, sm, pm, depth + 1) + sweep(g, o, sm, pm, s1, p1, depth + 1);
}

}  // namespace

double winding_number(const PathCurve& loop, const Vector& obstacle) {
  if (loop.dim() < 2 || obstacle.size() < 2)
    throw Error(ErrorCode::BadDimension, "winding number needs planar coordinates");
  double total = 0.0;
  if (loop.kind() == PathCurve::Kind::Polyline) {
    const auto nodes = loop.nodes();
    for (std::size_t k = 1; k < nodes.size(); ++k) total += angle_between(nodes[k - 1].point, nodes[k].point, obstacle);
  } else {
    constexpr int coarse = 256;
    Vector prev = loop(0.0);
    for (int k = 1; k <= coarse; ++k) {
      const double s0 = static_cast<double>(k - 1) / coarse;
      const double s1 = k == coarse ? 1.0 : static_cast<double>(k) / coarse;
      Vector next = loop(s1);
      total += sweep(loop, obstacle, s0, prev, s1, next, 0);
      prev = std::move(next);
    }
  }
  // Closing chord, zero for an exact loop.
  total += angle_between(loop.back(), loop.front(), obstacle);
  return total / (2.0 * std::numbers::pi);
}

HomotopyOracle winding_oracle(const Vector& obstacle) {
  return {[obstacle](const PathCurve& loop) { return static_cast<std::int64_t>(std::llround(winding_number(loop, obstacle))); },
          "winding number about (" + std::to_string(obstacle[0]) + ", " + std::to_string(obstacle[1]) + ")"};
}

namespace {

bool entered(const FlowSample& s, const StrictMinContext& ctx) {
  return s.f_val < ctx.entry_level && (s.x - ctx.x_bar).norm() < ctx.ball_r;
}

// Descending path read off a trajectory that enters the neighbourhood of x_bar.
std::optional<PathCurve> descent_from(const FlowTrajectory& traj, const StrictMinContext& ctx) {
  const auto& smp = traj.samples;
  std::size_t k = 0;
  while (k < smp.size() && !entered(smp[k], ctx)) ++k;
  if (k == smp.size()) return std::nullopt;
  const Vector& entry = smp[k].x;
  PathCurve flow_part = PathCurve::constant(entry);
  if (k > 0) {
    const double T = smp[k].t;
    std::vector<PathNode> nodes{{0.0, smp[0].x}};
    for (std::size_t j = 1; j < k; ++j) {
      const double s = smp[j].t / T;
      if (s > nodes.back().s && s < 1.0) nodes.push_back({s, smp[j].x});
    }
    nodes.push_back({1.0, entry});
    flow_part = PathCurve::polyline(std::move(nodes));
  }
  return path_juxtapose(flow_part, PathCurve::segment(entry, ctx.x_bar), 0.0);
}

PathCurve assemble_loop(const PathCurve& alpha0, const PathCurve& g, const PathCurve& alpha1, double tol) {
  return path_juxtapose(path_juxtapose(path_reverse(alpha0), g, tol), alpha1, tol);
}

}  // namespace

PathCurve descending_path(const Functional& f, const Vector& x1, const StrictMinContext& ctx, const Tolerances& tol) {
  const FlowTrajectory traj =
      integrate_flow(f, x1, tol, StopCondition::when([&ctx](const FlowSample& s) { return entered(s, ctx); }));
  auto path = descent_from(traj, ctx);
  if (!path) throw Error(ErrorCode::NotInBasin, "flow does not reach the neighbourhood of the strict minimizer");
  return *path;
}

PathCurve descending_loop(const Functional& f, const PathCurve& g, const StrictMinContext& ctx,
                          const Tolerances& tol) {
  const PathCurve alpha0 = descending_path(f, g.front(), ctx, tol);
  const PathCurve alpha1 = descending_path(f, g.back(), ctx, tol);
  return assemble_loop(alpha0, g, alpha1, tol.settle_tol);
}

bool is_eta_contractible(const Functional& f, const PathCurve& g, const StrictMinContext& ctx,
                         const HomotopyOracle& oracle, const Tolerances& tol) {
  return oracle.invariant(descending_loop(f, g, ctx, tol)) == 0;
}

double min_curvature_estimate(const Functional& f, const Vector& x, std::uint64_t seed, double h) {
  const int n = static_cast<int>(x.size());
  if (n <= 256) {
    Eigen::MatrixXd H(n, n);
    Vector probe = x;
    for (int k = 0; k < n; ++k) {
      probe[k] = x[k] + h;
      const Vector gp = f.gradient(probe);
      probe[k] = x[k] - h;
      const Vector gm = f.gradient(probe);
      probe[k] = x[k];
      H.col(k) = (gp - gm) / (2 * h);
    }
    const Eigen::MatrixXd S = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double lowest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2 * n; ++k) {
    Vector d(n);
    for (int i = 0; i < n; ++i) d[i] = normal(rng);
    d.normalize();
    lowest = std::min(lowest, d.dot(f.gradient(x + h * d) - f.gradient(x - h * d)) / (2 * h));
  }
  return lowest;
}

Alg2Report run_alg2(const Functional& f, const PathCurve& loop, const StrictMinContext& ctx,
                    const HomotopyOracle& oracle, const ComponentAtlas& atlas, const Tolerances& tol) {
  tol.validate();
  const double close = 1e-8 * std::max(1.0, ctx.x_bar.norm());
  if ((loop.front() - ctx.x_bar).norm() > close || (loop.back() - ctx.x_bar).norm() > close)
    throw Error(ErrorCode::InvalidArgument, "loop is not based at the strict minimizer");
  if (oracle.invariant(loop) == 0) throw Error(ErrorCode::InvalidArgument, "loop is contractible");
  int home = 0;
  bool tracked = false;
  for (const auto& a : atlas.anchors) {
    if ((a.point - ctx.x_bar).norm() <= atlas.proximity_radius) {
      home = a.label;
      tracked = true;
      break;
    }
  }
  if (!tracked) throw Error(ErrorCode::InvalidArgument, "atlas does not track the strict minimizer");

  Alg2Report rep;
  std::map<double, PathCurve> descents;
  descents.emplace(0.0, descending_path(f, loop.front(), ctx, tol));
  descents.emplace(1.0, descending_path(f, loop.back(), ctx, tol));
  rep.flow_lines = 2;

  double a = 0.0, b = 1.0;
  for (int i = 0; i < tol.n_max; ++i) {
    const double m = 0.5 * (a + b);
    const Vector x = loop(m);
    OmegaVerdict v = classify_omega(f, x, atlas, tol);
    rep.flow_lines += v.flow_lines_used;
    Alg2Step step{i, a, b, x, f.value(x), v.outcome, 0, rep.flow_lines};
    if (!v.in_component(home)) {
      rep.outcome = Alg2Report::Outcome::Found;
      rep.found_point = x;
      rep.found_s = m;
      rep.flagged = v.outcome == OmegaVerdict::Outcome::Indeterminate;
      rep.found_verdict = std::move(v);
      rep.steps.push_back(std::move(step));
      rep.a = a;
      rep.b = b;
      rep.bracket_lo = loop(a);
      rep.bracket_hi = loop(b);
      return rep;
    }
    auto alpha_m = descent_from(v.witness, ctx);
    if (!alpha_m) {
      alpha_m = descending_path(f, x, ctx, tol);
      rep.flow_lines += 1;
      step.flow_lines_cum = rep.flow_lines;
    }
    descents.emplace(m, *alpha_m);

    const PathCurve first = assemble_loop(descents.at(a), path_restrict(loop, a, m), *alpha_m, tol.settle_tol);
    const PathCurve second = assemble_loop(*alpha_m, path_restrict(loop, m, b), descents.at(b), tol.settle_tol);
    const std::int64_t inv_first = oracle.invariant(first);
    const std::int64_t inv_second = oracle.invariant(second);
    if (inv_first == 0 && inv_second == 0)
      throw Error(ErrorCode::OracleInconsistent, "both halves contractible at step " + std::to_string(i));
    if (inv_first == 0) {
      a = m;
      step.invariant = inv_second;
    } else {
      b = m;
      step.invariant = inv_first;
    }
    rep.steps.push_back(std::move(step));
  }
  rep.outcome = Alg2Report::Outcome::BudgetExhausted;
  rep.a = a;
  rep.b = b;
  rep.bracket_lo = loop(a);
  rep.bracket_hi = loop(b);
  return rep;
}

const char* to_string(LoopPassReport::Route r) noexcept {
  switch (r) {
    case LoopPassReport::Route::ChainedBisection: return "ChainedBisection";
    case LoopPassReport::Route::DirectCritical: return "DirectCritical";
    case LoopPassReport::Route::BudgetExhausted: return "BudgetExhausted";
  }
  return "Unknown";
}

LoopPassReport run_thm_mp2(const Functional& f, const PathCurve& loop, const StrictMinContext& ctx,
                           const HomotopyOracle& oracle, const ComponentAtlas& atlas, const Tolerances& tol,
                           std::uint64_t seed, const RunOptions& opts) {
  LoopPassReport out;
  out.loop = run_alg2(f, loop, ctx, oracle, atlas, tol);
  out.pass.level_c = atlas.level_c;
  out.pass.total_flow_lines = out.loop.flow_lines;
  if (out.loop.outcome == Alg2Report::Outcome::BudgetExhausted) {
    out.route = LoopPassReport::Route::BudgetExhausted;
    out.pass.termination = Termination::BudgetExhausted;
    return out;
  }

  const OmegaVerdict& v = *out.loop.found_verdict;
  const FlowSample& limit = v.witness.last();
  const bool settled = v.witness.stop_reason == StopReason::SettledAtCritical;
  if (settled) {
    out.found_curvature = min_curvature_estimate(f, limit.x, seed);
    if (out.found_curvature < -1e-6) {
      MpCandidate c;
      c.x1 = out.loop.found_point;
      c.f_x1 = v.witness.samples.front().f_val;
      c.y_tilde = limit.x;
      c.f_val = limit.f_val;
      c.grad_norm = limit.grad_norm;
      c.T_i = limit.t;
      c.T_tilde_i = limit.t;
      c.flow_lines_used = out.loop.flow_lines;
      out.pass.candidates.push_back(c);
      out.pass.best = c;
      out.pass.termination = c.grad_norm < tol.grad_tol ? Termination::GradTolMet : Termination::BudgetExhausted;
      out.route = LoopPassReport::Route::DirectCritical;
      return out;
    }
  }

  // The limit is another minimizer (or undecided): bisect between x_bar and it.
  std::vector<Anchor> anchors{{1, ctx.x_bar}};
  double level = ctx.entry_level;
  if (settled) {
    level = std::max(ctx.c_bar, limit.f_val) + ctx.eps_nbhd;
    anchors.push_back({2, limit.x});
  }
  ComponentAtlas pass_atlas = make_atlas(f, level, std::move(anchors));
  pass_atlas.escape_level = atlas.escape_level;
  const PathCurve arc = path_restrict(loop, 0.0, out.loop.found_s);
  out.pass = run_alg1b(f, arc, pass_atlas, tol, opts);
  out.pass.total_flow_lines += out.loop.flow_lines;
  for (auto& c : out.pass.candidates) c.flow_lines_used += out.loop.flow_lines;
  out.pass.best.flow_lines_used += out.loop.flow_lines;
  out.route = LoopPassReport::Route::ChainedBisection;
  return out;
}

}  // namespace mpass
