#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "mpass/core.hpp"

namespace mpass {

struct PathNode {
  double s;
  Vector point;
};

/// A continuous path [0,1] -> R^n, either a polyline or a closed-form evaluator.
///
/// Immutable; copies share the underlying representation.
class PathCurve {
public:
  enum class Kind { ClosedForm, Polyline };

  /// Nodes must have strictly increasing `s`, starting at 0 and ending at 1.
  static PathCurve polyline(std::vector<PathNode> nodes);
  /// Nodes placed at uniformly spaced parameters.
  static PathCurve polyline_uniform(std::span<const Vector> points);
  static PathCurve segment(const Vector& a, const Vector& b);
  static PathCurve constant(const Vector& p);
  static PathCurve closed_form(std::function<Vector(double)> evaluator);

  [[nodiscard]] Vector operator()(double s) const;
  [[nodiscard]] Kind kind() const noexcept;
  [[nodiscard]] int dim() const noexcept;
  [[nodiscard]] const Vector& front() const noexcept;
  [[nodiscard]] const Vector& back() const noexcept;
  /// Polyline nodes; empty for closed-form paths.
  [[nodiscard]] std::span<const PathNode> nodes() const noexcept;

  /// Samples `n + 1` uniformly spaced points (n >= 1) into a polyline.
  [[nodiscard]] PathCurve sampled(int n) const;

private:
  struct Impl;
  explicit PathCurve(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// result(s) = g(1 - s).
[[nodiscard]] PathCurve path_reverse(const PathCurve& g);

/// result(s) = g1(2s) on [0,1/2], g2(2s-1) on [1/2,1].
///
/// Throws EndpointMismatch when |g1(1) - g2(0)| > tol. Two polylines yield a
/// polyline whose node at s = 1/2 is g1(1).
[[nodiscard]] PathCurve path_juxtapose(const PathCurve& g1, const PathCurve& g2, double tol = 1e-9);

/// Restriction of g to [a, b] reparametrized over [0,1]; a > b traverses backwards.
[[nodiscard]] PathCurve path_restrict(const PathCurve& g, double a, double b);

}  // namespace mpass
