#include "mpass/path.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

namespace mpass {

namespace {

struct Polyline {
  std::vector<PathNode> nodes;
};

struct ClosedForm {
  std::function<Vector(double)> eval;
};

Vector lerp(const Vector& a, const Vector& b, double w) { return a + w * (b - a); }

// Appends unless rounding collapsed the parameter onto the previous node.
void push_increasing(std::vector<PathNode>& nodes, double s, const Vector& p) {
  if (nodes.empty() || s > nodes.back().s) nodes.push_back({s, p});
}

Vector eval_polyline(const std::vector<PathNode>& nodes, double s) {
  if (s <= 0.0) return nodes.front().point;
  if (s >= 1.0) return nodes.back().point;
  auto hi = std::upper_bound(nodes.begin(), nodes.end(), s,
                             [](double v, const PathNode& n) { return v < n.s; });
  auto lo = std::prev(hi);
  if (lo->s == s) return lo->point;
  const double w = (s - lo->s) / (hi->s - lo->s);
  return lerp(lo->point, hi->point, w);
}

}  // namespace

struct PathCurve::Impl {
  std::variant<Polyline, ClosedForm> rep;
  Vector first;
  Vector last;
};

PathCurve PathCurve::polyline(std::vector<PathNode> nodes) {
  if (nodes.size() < 2) throw Error(ErrorCode::InvalidArgument, "polyline needs at least two nodes");
  if (nodes.front().s != 0.0 || nodes.back().s != 1.0)
    throw Error(ErrorCode::InvalidArgument, "polyline nodes must start at s=0 and end at s=1");
  const auto dim = nodes.front().point.size();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    require_finite(nodes[i].point, "polyline node");
    if (nodes[i].point.size() != dim) throw Error(ErrorCode::BadDimension, "polyline node dimension mismatch");
    if (i > 0 && !(nodes[i].s > nodes[i - 1].s))
      throw Error(ErrorCode::InvalidArgument, "polyline parameters must be strictly increasing");
  }
  auto impl = std::make_shared<Impl>();
  impl->first = nodes.front().point;
  impl->last = nodes.back().point;
  impl->rep = Polyline{std::move(nodes)};
  return PathCurve(std::move(impl));
}

PathCurve PathCurve::polyline_uniform(std::span<const Vector> points) {
  if (points.size() < 2) throw Error(ErrorCode::InvalidArgument, "polyline needs at least two nodes");
  std::vector<PathNode> nodes;
  nodes.reserve(points.size());
  const auto last = static_cast<double>(points.size() - 1);
  for (std::size_t i = 0; i < points.size(); ++i)
    nodes.push_back({i + 1 == points.size() ? 1.0 : static_cast<double>(i) / last, points[i]});
  return polyline(std::move(nodes));
}

PathCurve PathCurve::segment(const Vector& a, const Vector& b) { return polyline({{0.0, a}, {1.0, b}}); }

PathCurve PathCurve::constant(const Vector& p) { return segment(p, p); }

PathCurve PathCurve::closed_form(std::function<Vector(double)> evaluator) {
  auto impl = std::make_shared<Impl>();
  impl->first = evaluator(0.0);
  impl->last = evaluator(1.0);
  require_finite(impl->first, "path start");
  require_finite(impl->last, "path end");
  if (impl->first.size() != impl->last.size()) throw Error(ErrorCode::BadDimension, "path endpoint dimensions differ");
  impl->rep = ClosedForm{std::move(evaluator)};
  return PathCurve(std::move(impl));
}

Vector PathCurve::operator()(double s) const {
  if (s <= 0.0) return impl_->first;
  if (s >= 1.0) return impl_->last;
  if (const auto* poly = std::get_if<Polyline>(&impl_->rep)) return eval_polyline(poly->nodes, s);
  return std::get<ClosedForm>(impl_->rep).eval(s);
}

PathCurve::Kind PathCurve::kind() const noexcept {
  return std::holds_alternative<Polyline>(impl_->rep) ? Kind::Polyline : Kind::ClosedForm;
}

int PathCurve::dim() const noexcept { return static_cast<int>(impl_->first.size()); }
const Vector& PathCurve::front() const noexcept { return impl_->first; }
const Vector& PathCurve::back() const noexcept { return impl_->last; }

std::span<const PathNode> PathCurve::nodes() const noexcept {
  if (const auto* poly = std::get_if<Polyline>(&impl_->rep)) return poly->nodes;
  return {};
}

PathCurve PathCurve::sampled(int n) const {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
  std::vector<PathNode> nodes;
  nodes.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    const double s = i == n ? 1.0 : static_cast<double>(i) / n;
    nodes.push_back({s, (*this)(s)});
  }
  return polyline(std::move(nodes));
}

PathCurve path_reverse(const PathCurve& g) {
  if (g.kind() == PathCurve::Kind::Polyline) {
    const auto src = g.nodes();
    std::vector<PathNode> nodes;
    nodes.reserve(src.size());
    nodes.push_back({0.0, src.back().point});
    for (auto it = std::next(src.rbegin()); it != std::prev(src.rend()); ++it) push_increasing(nodes, 1.0 - it->s, it->point);
    if (nodes.back().s >= 1.0) nodes.pop_back();
    nodes.push_back({1.0, src.front().point});
    return PathCurve::polyline(std::move(nodes));
  }
  return PathCurve::closed_form([g](double s) { return g(1.0 - s); });
}

PathCurve path_juxtapose(const PathCurve& g1, const PathCurve& g2, double tol) {
  if (g1.dim() != g2.dim()) throw Error(ErrorCode::BadDimension, "juxtaposed paths differ in dimension");
  const double gap = (g1.back() - g2.front()).norm();
  if (gap > tol) throw Error(ErrorCode::EndpointMismatch, "gap of " + std::to_string(gap) + " between paths");

  if (g1.kind() == PathCurve::Kind::Polyline && g2.kind() == PathCurve::Kind::Polyline) {
    std::vector<PathNode> nodes;
    nodes.reserve(g1.nodes().size() + g2.nodes().size() - 1);
    for (const auto& n : g1.nodes()) nodes.push_back({0.5 * n.s, n.point});
    const auto second = g2.nodes();
    for (std::size_t i = 1; i + 1 < second.size(); ++i) push_increasing(nodes, 0.5 + 0.5 * second[i].s, second[i].point);
    if (nodes.back().s >= 1.0) nodes.pop_back();
    nodes.push_back({1.0, second.back().point});
    return PathCurve::polyline(std::move(nodes));
  }
  return PathCurve::closed_form([g1, g2](double s) { return s <= 0.5 ? g1(2.0 * s) : g2(2.0 * s - 1.0); });
}

PathCurve path_restrict(const PathCurve& g, double a, double b) {
  if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0) || a == b)
    throw Error(ErrorCode::InvalidArgument, "restriction bounds must be distinct points of [0,1]");
  if (g.kind() == PathCurve::Kind::Polyline) {
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    std::vector<PathNode> nodes;
    nodes.push_back({0.0, g(lo)});
    for (const auto& n : g.nodes())
      if (n.s > lo && n.s < hi) push_increasing(nodes, (n.s - lo) / (hi - lo), n.point);
    if (nodes.back().s >= 1.0) nodes.pop_back();
    nodes.push_back({1.0, g(hi)});
    auto forward = PathCurve::polyline(std::move(nodes));
    return a < b ? forward : path_reverse(forward);
  }
  return PathCurve::closed_form([g, a, b](double s) { return g(a + (b - a) * s); });
}

}  // namespace mpass
