#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mpass/flow.hpp"

namespace mpass {

struct Anchor {
  int label = 0;
  Vector point;
};

/// Tracked connected components of the sublevel {f < level_c}, one anchor point each.
struct ComponentAtlas {
  double level_c = 0.0;
  std::vector<Anchor> anchors;
  double proximity_radius = 0.0;
  /// A flow whose value drops below this level is declared outside every tracked
  /// component. Useful when one side of the pass is unbounded below.
  std::optional<double> escape_level;

  [[nodiscard]] const Anchor* find(int label) const noexcept;
  /// Throws InvalidArgument when an anchor is not below level_c or anchors are not separated.
  void validate(const Functional& f) const;
};

/// Builds an atlas; without an explicit radius it uses half the smallest anchor
/// distance, capped by the distance from each anchor to the level set along the
/// coordinate axes.
[[nodiscard]] ComponentAtlas make_atlas(const Functional& f, double level_c, std::vector<Anchor> anchors,
                                        std::optional<double> proximity_radius = std::nullopt);

struct OmegaVerdict {
  enum class Outcome { InComponent, NotInTrackedComponent, Indeterminate };
  Outcome outcome = Outcome::Indeterminate;
  /// Valid for InComponent only.
  int label = 0;
  FlowTrajectory witness;
  int flow_lines_used = 1;
  /// Set when the flow hit a NaN/Inf.
  bool non_finite = false;

  [[nodiscard]] bool in_component(int l) const noexcept { return outcome == Outcome::InComponent && label == l; }
};

[[nodiscard]] const char* to_string(OmegaVerdict::Outcome o) noexcept;

/// Decides which tracked component, if any, the flow from `x` settles into. One flow line.
[[nodiscard]] OmegaVerdict classify_omega(const Functional& f, const Vector& x, const ComponentAtlas& atlas,
                                          const Tolerances& tol);

/// For each point, the smallest f value met along its flow over [0, early_time].
///
/// Points on the boundary of a basin keep f >= level_c along their flow; a
/// value well below level_c marks a point inside some component's basin.
[[nodiscard]] std::vector<double> boundary_value_check(const Functional& f, std::span<const Vector> boundary_pts,
                                                       const ComponentAtlas& atlas, const Tolerances& tol,
                                                       double early_time = 1.0);

}  // namespace mpass
