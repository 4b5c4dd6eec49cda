#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mpass/path.hpp"

namespace mpass {

struct CriticalPoint {
  Vector point;
  double value = 0.0;
};

/// A test functional with known critical structure.
struct BenchmarkSpec {
  std::string name;
  Functional functional;
  std::vector<CriticalPoint> minimizers;
  std::vector<CriticalPoint> saddles;
  /// A level whose sublevel separates the minimizers.
  double recommended_c = 0.0;
  /// A level whose sublevel is connected but not simply connected, when one exists.
  std::optional<double> loop_c;
  /// Point the winding oracle turns around, for planar benchmarks with a hole.
  std::optional<Vector> obstacle;
  /// Flows dropping below this level have left every tracked basin.
  std::optional<double> escape_level;
  /// Path joining two sublevel components (or a non-contractible loop for loop benchmarks).
  std::optional<PathCurve> default_path;
};

/// f(x, y) = (x^2 - 1)^2 + y^2.
[[nodiscard]] BenchmarkSpec double_well();

/// g(x, y) = (x^2 + y^2 - 1)^2 + eps x^2 for 0 < eps < 1. Throws EpsOutOfRange.
[[nodiscard]] BenchmarkSpec tilted_hat(double eps);

/// Discrete action of -u'' = u^3 on (0,1) with zero boundary values, n interior nodes.
///
/// J(u) = sum_{i=0..n} (u_{i+1} - u_i)^2 / (2h) - sum_{i=1..n} h u_i^4 / 4, h = 1/(n+1).
/// The listed saddle is the positive discrete solution, found by Newton's method.
/// Throws BadDimension for n < 3 and InvalidArgument for p != 3.
[[nodiscard]] BenchmarkSpec bvp_action(int n, int p = 3);

/// Resolves `double_well`, `tilted_hat:<eps>` or `bvp:<n>`. Throws ConfigError.
[[nodiscard]] BenchmarkSpec benchmark_by_name(std::string_view name);

/// Names accepted by benchmark_by_name, with their default parameters.
[[nodiscard]] std::vector<std::string> benchmark_names();

/// The closed loop s -> (sin 2 pi s, cos 2 pi s) based at (0, 1).
[[nodiscard]] PathCurve unit_circle_loop();

}  // namespace mpass
