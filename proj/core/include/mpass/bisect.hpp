#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mpass/basin.hpp"
#include "mpass/path.hpp"

namespace mpass {

/// Dyadic bracket [s1, s2] on a path with x1 in the basin of component 1 and x2 outside it.
struct BisectState {
  int iter = 0;
  double s1 = 0.0;
  double s2 = 1.0;
  double sm = 0.5;
  Vector x1, x2, xm;
  /// Label of the component whose basin holds x1.
  int home = 1;
  OmegaVerdict::Outcome x2_outcome = OmegaVerdict::Outcome::NotInTrackedComponent;
  /// Flow line from x1, kept so candidate extraction needs no recomputation.
  FlowTrajectory x1_flow;
  /// Flow lines integrated so far, endpoint classifications included.
  int flow_lines = 0;

  /// Bracket [0, 1] from the endpoint verdicts of `path`.
  static BisectState initial(const PathCurve& path, OmegaVerdict v1, const OmegaVerdict& v2);
};

/// One approximate mountain-pass point, extracted from the flow line of x1 at one iteration.
struct MpCandidate {
  /// Iteration count over the whole run, restarts included.
  int iter = 0;
  /// Halvings of the current path's bracket; s2 - s1 = 2^-depth.
  int depth = 0;
  double s1 = 0.0;
  double s2 = 0.0;
  Vector x1;
  double f_x1 = 0.0;
  Vector y_tilde;
  double f_val = 0.0;
  double grad_norm = 0.0;
  /// First time the flow from x1 reaches f <= level_c.
  double T_i = 0.0;
  /// Time in [0, T_i] minimizing the gradient norm.
  double T_tilde_i = 0.0;
  double bracket_width = 0.0;
  int flow_lines_used = 0;
  /// False while x1 still lies in the sublevel (T_i = 0): the candidate is then
  /// x1 itself and says nothing about the pass. Such candidates never become best.
  bool admissible = true;
  /// Leading samples of the flow from x1 on [0, T_i], when traces are kept.
  std::vector<FlowSample> trace;
};

enum class Termination { GradTolMet, BudgetExhausted, BracketDegenerate };

[[nodiscard]] const char* to_string(Termination t) noexcept;

struct RunReport {
  std::vector<MpCandidate> candidates;
  /// Admissible candidate with the smallest gradient norm (default-constructed if none).
  MpCandidate best;
  int total_flow_lines = 0;
  Termination termination = Termination::BudgetExhausted;
  /// Bracket at the end of the last bisection round.
  BisectState final_state;
  /// Deflection restarts performed (run_alg1c only).
  int restarts = 0;
  double level_c = 0.0;
};

struct RunOptions {
  /// Samples of each x1 flow line kept in MpCandidate::trace; 0 keeps none.
  std::size_t keep_trace = 0;
};

/// Classifies xm, moves one bracket end onto it and halves the bracket.
///
/// Indeterminate verdicts take the else-branch. Throws BracketDegenerate when x1
/// and x2 are no longer numerically distinct.
[[nodiscard]] BisectState bisect_step(const Functional& f, const PathCurve& path, const BisectState& state,
                                      const ComponentAtlas& atlas, const Tolerances& tol);

/// Candidate extracted from the stored x1 flow line of `state`.
[[nodiscard]] MpCandidate extract_candidate(const Functional& f, const BisectState& state, double level_c,
                                            const StepControl& ctrl, std::size_t keep_trace = 0);

/// Bisection along `path` with a candidate per iteration; stops early once a
/// candidate's gradient norm is below tol.grad_tol.
///
/// Throws InvalidEndpoints unless path(0) settles into component 1 and path(1) does not.
[[nodiscard]] RunReport run_alg1b(const Functional& f, const PathCurve& path, const ComponentAtlas& atlas,
                                  const Tolerances& tol, const RunOptions& opts = {});

/// run_alg1b with deflection restarts: after each unsuccessful round both bracket
/// ends are advected until their flows separate by sep_eps / 2^(k-1), and the
/// bisection restarts with one iteration less on the segment between them.
[[nodiscard]] RunReport run_alg1c(const Functional& f, const Vector& x1, const Vector& x2, const PathCurve& joining,
                                  const ComponentAtlas& atlas, const Tolerances& tol, const RunOptions& opts = {});

/// The point where the flow from the final x1 first reaches reference - 1/k.
///
/// `reference` defaults to atlas.level_c; passing the mountain-pass level
/// estimate gives the sequence approaching the critical point from below.
/// Throws LevelNotReached when the flow settles above the target.
[[nodiscard]] MpCandidate ps_from_below(const Functional& f, const RunReport& report, const ComponentAtlas& atlas,
                                        const Tolerances& tol, int k,
                                        std::optional<double> reference = std::nullopt);

/// Separation threshold for "numerically indistinct" bracket ends.
[[nodiscard]] double distinctness_threshold(const Vector& x1);

}  // namespace mpass
