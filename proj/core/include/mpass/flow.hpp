#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mpass/core.hpp"

namespace mpass {

/// One stored state of the normalized steepest-descent flow.
struct FlowSample {
  double t = 0.0;
  Vector x;
  double f_val = 0.0;
  double grad_norm = 0.0;
};

enum class StopReason { SettledAtCritical, SublevelEntered, PredicateMet, BudgetExhausted, NonFinite };

[[nodiscard]] const char* to_string(StopReason r) noexcept;

/// Which events end an integration. The time budget always applies.
struct StopCondition {
  /// Stop once |grad f| < settle_tol and f dropped by less than settle_tol^2 over the last unit of time.
  bool on_settle = true;
  /// Stop once f <= level.
  std::optional<double> level;
  /// Stop once the predicate holds on an accepted sample.
  std::function<bool(const FlowSample&)> predicate;

  static StopCondition settle() { return {}; }
  static StopCondition at_level(double c) { return {true, c, {}}; }
  static StopCondition budget_only() { return {false, std::nullopt, {}}; }
  static StopCondition when(std::function<bool(const FlowSample&)> pred) { return {true, std::nullopt, std::move(pred)}; }
};

struct FlowTrajectory {
  Vector start;
  std::vector<FlowSample> samples;
  StopReason stop_reason = StopReason::BudgetExhausted;

  [[nodiscard]] const FlowSample& last() const { return samples.back(); }
  /// Largest time increment between consecutive samples.
  [[nodiscard]] double max_step() const;
};

/// Velocity of the normalized flow, -grad f / (1 + |grad f|).
[[nodiscard]] Vector flow_velocity(const Functional& f, const Vector& x);

/// Integrates x' = -grad f(x) / (1 + |grad f(x)|) from `x0`.
///
/// Adaptive Dormand-Prince 5(4) unless `tol.step_ctrl.fixed_step`. A step that
/// raises f by more than 10 * (atol + rtol |f|) is rejected and halved. A
/// NaN/Inf evaluation ends the trajectory at the last good sample with
/// StopReason::NonFinite; a non-finite start throws.
[[nodiscard]] FlowTrajectory integrate_flow(const Functional& f, const Vector& x0, const Tolerances& tol,
                                            const StopCondition& stop);

/// State reached after flowing exactly `duration` from `x0`. Throws NonFinite on blow-up.
[[nodiscard]] Vector advance_flow(const Functional& f, const Vector& x0, double duration, const StepControl& ctrl);

/// First time f <= level, interpolating linearly between the bracketing samples.
[[nodiscard]] std::optional<double> level_crossing_time(const FlowTrajectory& traj, double level);

/// The state where f first equals `level`, located by re-integrating inside the bracketing step.
[[nodiscard]] std::optional<FlowSample> refine_level_crossing(const Functional& f, const FlowTrajectory& traj,
                                                              double level, const StepControl& ctrl);

struct Lemma1Check {
  double measured = 0.0;
  double bound = 0.0;
};

/// Time spent with |grad f| >= gamma against the bound 2 (f(start) - f(end)) / gamma^2.
///
/// An interval counts when the mean of its endpoint gradient norms is >= gamma.
[[nodiscard]] Lemma1Check lemma1_bound_check(const FlowTrajectory& traj, double gamma);

/// The stored sample with the smallest gradient norm.
[[nodiscard]] const FlowSample& extract_ps_sample(const FlowTrajectory& traj);

}  // namespace mpass
