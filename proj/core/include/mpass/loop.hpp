#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mpass/bisect.hpp"

namespace mpass {

/// A strict local minimizer and the small sublevel neighbourhood around it that
/// descending paths aim for.
struct StrictMinContext {
  Vector x_bar;
  double c_bar = 0.0;
  double eps_nbhd = 0.0;
  double entry_level = 0.0;
  /// Radius of a ball around x_bar contractible in the working sublevel.
  double ball_r = 0.0;

  /// Throws InvalidArgument unless |grad f(x_bar)| < settle_tol and c_bar + eps_nbhd < level_c.
  static StrictMinContext make(const Functional& f, const Vector& x_bar, double eps_nbhd, double ball_r,
                               double level_c, double settle_tol);
};

/// Integer homotopy invariant of loops, zero on contractible ones.
struct HomotopyOracle {
  std::function<std::int64_t(const PathCurve&)> invariant;
  std::string description;
};

/// Signed number of turns of the first two coordinates of `loop` around `obstacle`, unrounded.
///
/// Polylines are summed exactly node to node; closed-form paths are sampled
/// adaptively until every chord turns by less than 0.05 rad.
[[nodiscard]] double winding_number(const PathCurve& loop, const Vector& obstacle);

/// Winding number about a planar obstacle point, rounded to the nearest integer.
[[nodiscard]] HomotopyOracle winding_oracle(const Vector& obstacle);

/// Flow from x1 into {f < entry_level} near x_bar, followed by the segment to x_bar.
///
/// Throws NotInBasin when the flow settles or runs out of time first.
[[nodiscard]] PathCurve descending_path(const Functional& f, const Vector& x1, const StrictMinContext& ctx,
                                        const Tolerances& tol);

/// [(-alpha_{g(0)}) . g] . alpha_{g(1)}, a loop based at x_bar.
[[nodiscard]] PathCurve descending_loop(const Functional& f, const PathCurve& g, const StrictMinContext& ctx,
                                        const Tolerances& tol);

[[nodiscard]] bool is_eta_contractible(const Functional& f, const PathCurve& g, const StrictMinContext& ctx,
                                       const HomotopyOracle& oracle, const Tolerances& tol);

/// Smallest curvature estimate at x: the lowest eigenvalue of a finite-difference
/// Hessian for dim <= 256, otherwise the lowest of 2*dim seeded random directional
/// second derivatives.
[[nodiscard]] double min_curvature_estimate(const Functional& f, const Vector& x, std::uint64_t seed = 0,
                                            double h = 1e-4);

struct Alg2Step {
  int iter = 0;
  /// Current sub-path, as parameters of the input loop.
  double a = 0.0;
  double b = 1.0;
  Vector x_mid;
  double f_mid = 0.0;
  OmegaVerdict::Outcome verdict = OmegaVerdict::Outcome::InComponent;
  /// Invariant of the retained half's descending loop (0 on the stopping step).
  std::int64_t invariant = 0;
  int flow_lines_cum = 0;
};

struct Alg2Report {
  enum class Outcome { Found, BudgetExhausted };
  Outcome outcome = Outcome::BudgetExhausted;
  std::vector<Alg2Step> steps;
  /// On Found: the midpoint whose flow does not settle at x_bar, its loop parameter and verdict.
  Vector found_point;
  double found_s = 0.0;
  std::optional<OmegaVerdict> found_verdict;
  /// Set when the stopping verdict was Indeterminate.
  bool flagged = false;
  /// Final sub-path bounds and their images.
  double a = 0.0;
  double b = 1.0;
  Vector bracket_lo, bracket_hi;
  int flow_lines = 0;
};

/// Halves a non-contractible loop at x_bar, keeping the non-eta-contractible
/// half, until a midpoint flows somewhere other than x_bar.
///
/// `atlas` must track x_bar within its proximity radius; the midpoint flows to
/// x_bar exactly when it settles into x_bar's component. Throws OracleInconsistent
/// when both halves test contractible.
[[nodiscard]] Alg2Report run_alg2(const Functional& f, const PathCurve& loop, const StrictMinContext& ctx,
                                  const HomotopyOracle& oracle, const ComponentAtlas& atlas, const Tolerances& tol);

struct LoopPassReport {
  enum class Route { ChainedBisection, DirectCritical, BudgetExhausted };
  Route route = Route::BudgetExhausted;
  Alg2Report loop;
  /// The bisection run (ChainedBisection), or a one-candidate report for a
  /// non-minimizing critical point found directly.
  RunReport pass;
  /// Curvature estimate at the omega-limit reached by the loop halving.
  double found_curvature = 0.0;
};

[[nodiscard]] const char* to_string(LoopPassReport::Route r) noexcept;

/// Loop halving followed, when it lands on another strict minimizer, by bisection
/// between x_bar and that minimizer along the loop's sub-arc.
[[nodiscard]] LoopPassReport run_thm_mp2(const Functional& f, const PathCurve& loop, const StrictMinContext& ctx,
                                         const HomotopyOracle& oracle, const ComponentAtlas& atlas,
                                         const Tolerances& tol, std::uint64_t seed = 0, const RunOptions& opts = {});

}  // namespace mpass
