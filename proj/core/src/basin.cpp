#include "mpass/basin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpass {

const char* to_string(OmegaVerdict::Outcome o) noexcept {
  switch (o) {
    case OmegaVerdict::Outcome::InComponent: return "InComponent";
    case OmegaVerdict::Outcome::NotInTrackedComponent: return "NotInTrackedComponent";
    case OmegaVerdict::Outcome::Indeterminate: return "Indeterminate";
  }
  return "Unknown";
}

const Anchor* ComponentAtlas::find(int label) const noexcept {
  auto it = std::find_if(anchors.begin(), anchors.end(), [label](const Anchor& a) { return a.label == label; });
  return it == anchors.end() ? nullptr : &*it;
}

void ComponentAtlas::validate(const Functional& f) const {
  if (anchors.empty()) throw Error(ErrorCode::InvalidArgument, "atlas has no anchors");
  if (!(proximity_radius > 0)) throw Error(ErrorCode::InvalidArgument, "proximity radius must be positive");
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    require_finite(anchors[i].point, "anchor");
    if (anchors[i].point.size() != f.dim) throw Error(ErrorCode::BadDimension, "anchor dimension mismatch");
    if (!(f.value(anchors[i].point) < level_c))
      throw Error(ErrorCode::InvalidArgument, "anchor " + std::to_string(anchors[i].label) + " is not below level_c");
    for (std::size_t j = 0; j < i; ++j) {
      if (anchors[i].label == anchors[j].label) throw Error(ErrorCode::InvalidArgument, "duplicate anchor label");
      if (!((anchors[i].point - anchors[j].point).norm() > 2 * proximity_radius))
        throw Error(ErrorCode::InvalidArgument, "anchors closer than twice the proximity radius");
    }
  }
}

namespace {

// Distance along `dir` from `p` to the first point where f >= level (infinity if none within reach).
double distance_to_level(const Functional& f, const Vector& p, const Vector& dir, double level) {
  double lo = 0.0;
  double hi = 1e-3;
  while (f.value(p + hi * dir) < level) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return std::numeric_limits<double>::infinity();
  }
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f.value(p + mid * dir) < level ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

ComponentAtlas make_atlas(const Functional& f, double level_c, std::vector<Anchor> anchors,
                          std::optional<double> proximity_radius) {
  ComponentAtlas atlas;
  atlas.level_c = level_c;
  atlas.anchors = std::move(anchors);
  if (proximity_radius) {
    atlas.proximity_radius = *proximity_radius;
  } else {
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < atlas.anchors.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        r = std::min(r, 0.5 * (atlas.anchors[i].point - atlas.anchors[j].point).norm());
    for (const auto& a : atlas.anchors) {
      for (int k = 0; k < f.dim; ++k) {
        Vector dir = Vector::Zero(f.dim);
        dir[k] = 1.0;
        r = std::min({r, distance_to_level(f, a.point, dir, level_c), distance_to_level(f, a.point, -dir, level_c)});
      }
    }
    // Strict separation needs a margin below half the anchor distance.
    atlas.proximity_radius = std::isfinite(r) ? 0.999 * r : 1.0;
  }
  atlas.validate(f);
  return atlas;
}

OmegaVerdict classify_omega(const Functional& f, const Vector& x, const ComponentAtlas& atlas,
                            const Tolerances& tol) {
  StopCondition stop = StopCondition::settle();
  if (atlas.escape_level) {
    const double floor = *atlas.escape_level;
    stop.predicate = [floor](const FlowSample& s) { return s.f_val < floor; };
  }
  OmegaVerdict v;
  v.witness = integrate_flow(f, x, tol, stop);
  const FlowSample& end = v.witness.last();
  switch (v.witness.stop_reason) {
    case StopReason::NonFinite:
      v.non_finite = true;
      v.outcome = OmegaVerdict::Outcome::Indeterminate;
      break;
    case StopReason::PredicateMet:
      v.outcome = OmegaVerdict::Outcome::NotInTrackedComponent;
      break;
    case StopReason::SettledAtCritical: {
      v.outcome = OmegaVerdict::Outcome::NotInTrackedComponent;
      if (end.f_val < atlas.level_c) {
        for (const auto& a : atlas.anchors) {
          if ((end.x - a.point).norm() <= atlas.proximity_radius) {
            v.outcome = OmegaVerdict::Outcome::InComponent;
            v.label = a.label;
            break;
          }
        }
      }
      break;
    }
    default:
      v.outcome = OmegaVerdict::Outcome::Indeterminate;
      break;
  }
  return v;
}

std::vector<double> boundary_value_check(const Functional& f, std::span<const Vector> boundary_pts,
                                         const ComponentAtlas& /*atlas*/, const Tolerances& tol, double early_time) {
  Tolerances early = tol;
  early.t_budget = early_time;
  std::vector<double> out;
  out.reserve(boundary_pts.size());
  for (const auto& p : boundary_pts) {
    const FlowTrajectory traj = integrate_flow(f, p, early, StopCondition::budget_only());
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& s : traj.samples) lowest = std::min(lowest, s.f_val);
    out.push_back(lowest);
  }
  return out;
}

}  // namespace mpass
