#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>

#include "mpass/error.hpp"

namespace mpass {

/// A point of the state space R^n.
using Vector = Eigen::VectorXd;

[[nodiscard]] bool all_finite(const Vector& x) noexcept;

/// Throws NonFinite naming `what` when `x` has a NaN/Inf coordinate or is empty.
void require_finite(const Vector& x, const char* what);

/// A smooth functional f: R^n -> R together with its gradient.
///
/// The callables must be deterministic and reentrant; C^2 smoothness is the
/// caller's obligation and can be spot-checked with audit_gradient().
struct Functional {
  int dim = 0;
  std::function<double(const Vector&)> eval;
  std::function<Vector(const Vector&)> grad;
  std::string label;

  [[nodiscard]] double value(const Vector& x) const { return eval(x); }
  [[nodiscard]] Vector gradient(const Vector& x) const { return grad(x); }
};

/// Integrator accuracy parameters.
struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 1e-2;
  double h_min = 1e-12;
  double h_max = 0.25;
  /// Fixed-step mode: every step has length `h_fixed`, no error control.
  bool fixed_step = false;
  double h_fixed = 1e-2;
};

struct Tolerances {
  /// Critical-point gradient threshold for stopping a bisection run.
  double grad_tol = 1e-3;
  StepControl step_ctrl{};
  /// Maximum flow time per flow line.
  double t_budget = 500.0;
  /// Settling threshold on the gradient norm for omega-limit decisions.
  double settle_tol = 1e-9;
  /// Initial separation distance of the deflection restart.
  double sep_eps = 1e-4;
  /// Bisection budget.
  int n_max = 30;

  /// Throws InvalidArgument unless every field is strictly positive.
  void validate() const;
};

/// Max-norm discrepancy between central differences of `f` at `x` and the declared gradient.
[[nodiscard]] double audit_gradient(const Functional& f, const Vector& x, double h = 1e-5);

}  // namespace mpass
