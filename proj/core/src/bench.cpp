#include "mpass/bench.hpp"

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mpass {

namespace {

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

}  // namespace

BenchmarkSpec double_well() {
  BenchmarkSpec b;
  b.name = "double_well";
  b.functional.dim = 2;
  b.functional.label = "double_well";
  b.functional.eval = [](const Vector& z) {
    const double a = z[0] * z[0] - 1.0;
    return a * a + z[1] * z[1];
  };
  b.functional.grad = [](const Vector& z) { return vec2(4.0 * z[0] * (z[0] * z[0] - 1.0), 2.0 * z[1]); };
  b.minimizers = {{vec2(-1.0, 0.0), 0.0}, {vec2(1.0, 0.0), 0.0}};
  b.saddles = {{vec2(0.0, 0.0), 1.0}};
  b.recommended_c = 0.5;
  b.default_path = PathCurve::segment(vec2(-1.0, 0.3), vec2(1.0, 0.3));
  return b;
}

PathCurve unit_circle_loop() {
  return PathCurve::closed_form([](double s) {
    const double th = 2.0 * std::numbers::pi * s;
    return vec2(std::sin(th), std::cos(th));
  });
}

BenchmarkSpec tilted_hat(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::EpsOutOfRange, "tilted_hat needs 0 < eps < 1");
  BenchmarkSpec b;
  std::ostringstream name;
  name << "tilted_hat:" << eps;
  b.name = name.str();
  b.functional.dim = 2;
  b.functional.label = b.name;
  b.functional.eval = [eps](const Vector& z) {
    const double r = z[0] * z[0] + z[1] * z[1] - 1.0;
    return r * r + eps * z[0] * z[0];
  };
  b.functional.grad = [eps](const Vector& z) {
    const double r = z[0] * z[0] + z[1] * z[1] - 1.0;
    return vec2(4.0 * z[0] * r + 2.0 * eps * z[0], 4.0 * z[1] * r);
  };
  const double xs = std::sqrt(1.0 - eps / 2.0);
  const double level = eps - eps * eps / 4.0;
  b.minimizers = {{vec2(0.0, 1.0), 0.0}, {vec2(0.0, -1.0), 0.0}};
  b.saddles = {{vec2(xs, 0.0), level}, {vec2(-xs, 0.0), level}};
  b.recommended_c = 0.5 * level;
  b.loop_c = 0.5 * (eps + 1.0);
  b.obstacle = vec2(0.0, 0.0);
  b.default_path = unit_circle_loop();
  return b;
}

BenchmarkSpec bvp_action(int n, int p) {
  if (n < 3) throw Error(ErrorCode::BadDimension, "bvp_action needs at least 3 interior nodes");
  if (p != 3) throw Error(ErrorCode::InvalidArgument, "bvp_action supports the cubic nonlinearity only");
  const double h = 1.0 / (n + 1);
  BenchmarkSpec b;
  b.name = "bvp:" + std::to_string(n);
  b.functional.dim = n;
  b.functional.label = b.name;
  b.functional.eval = [n, h](const Vector& u) {
    double kinetic = 0.0, potential = 0.0, prev = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = u[i] - prev;
      kinetic += d * d;
      potential += u[i] * u[i] * u[i] * u[i];
      prev = u[i];
    }
    kinetic += prev * prev;
    return kinetic / (2.0 * h) - h * potential / 4.0;
  };
  b.functional.grad = [n, h](const Vector& u) {
    Vector g(n);
    for (int i = 0; i < n; ++i) {
      const double left = i > 0 ? u[i - 1] : 0.0;
      const double right = i + 1 < n ? u[i + 1] : 0.0;
      g[i] = (2.0 * u[i] - left - right) / h - h * u[i] * u[i] * u[i];
    }
    return g;
  };

  // Newton's method from the best multiple of sin(pi x) for the positive solution.
  Vector u(n);
  const double amp = 2.0 * std::numbers::pi / std::sqrt(3.0);
  for (int i = 0; i < n; ++i) u[i] = amp * std::sin(std::numbers::pi * (i + 1) * h);
  for (int it = 0; it < 50; ++it) {
    const Vector g = b.functional.grad(u);
    if (g.norm() < 1e-13) break;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      H(i, i) = 2.0 / h - 3.0 * h * u[i] * u[i];
      if (i > 0) H(i, i - 1) = -1.0 / h;
      if (i + 1 < n) H(i, i + 1) = -1.0 / h;
    }
    u -= H.partialPivLu().solve(g);
  }
  const double mp_level = b.functional.eval(u);
  b.minimizers = {{Vector::Zero(n), 0.0}};
  b.saddles = {{u, mp_level}};
  b.recommended_c = 0.25 * mp_level;
  // The flow into u = 0 keeps J >= 0, so negative action means another basin.
  b.escape_level = -1.0;

  Vector far(n);
  for (int i = 0; i < n; ++i) far[i] = 8.0 * std::sin(std::numbers::pi * (i + 1) * h);
  b.default_path = PathCurve::segment(Vector::Zero(n), far);
  return b;
}

namespace {

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw Error(ErrorCode::ConfigError, "bad " + std::string(what) + " '" + std::string(text) + "'");
  return value;
}

}  // namespace

BenchmarkSpec benchmark_by_name(std::string_view name) {
  const auto colon = name.find(':');
  const std::string_view base = name.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : name.substr(colon + 1);
  try {
    if (base == "double_well" && arg.empty()) return double_well();
    if (base == "tilted_hat") return tilted_hat(arg.empty() ? 0.1 : parse_number<double>(arg, "eps"));
    if (base == "bvp") return bvp_action(arg.empty() ? 63 : parse_number<int>(arg, "grid size"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, e.what());
  }
  throw Error(ErrorCode::ConfigError, "unknown benchmark '" + std::string(name) + "'");
}

std::vector<std::string> benchmark_names() { return {"double_well", "tilted_hat:0.1", "bvp:63"}; }

}  // namespace mpass
