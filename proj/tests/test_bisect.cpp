#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mpass/bench.hpp"
#include "mpass/bisect.hpp"

using namespace mpass;

namespace {

Vector v2(double x, double y) { return (Vector(2) << x, y).finished(); }

struct DoubleWellRun {
  BenchmarkSpec b = double_well();
  ComponentAtlas atlas = make_atlas(b.functional, 0.5, {{1, v2(-1, 0)}, {2, v2(1, 0)}});
  PathCurve path = *b.default_path;
};

void check_report_invariants(const Functional& f, const PathCurve& path, const RunReport& r, double path_max) {
  double s1 = 0.0, s2 = 1.0;
  int prev_lines = 0;
  for (std::size_t k = 0; k < r.candidates.size(); ++k) {
    const auto& c = r.candidates[k];
    CHECK(c.iter == static_cast<int>(k) + 1);
    CHECK(c.s2 - c.s1 == std::ldexp(1.0, -c.depth));
    CHECK(c.s1 >= s1);
    CHECK(c.s2 <= s2);
    s1 = c.s1;
    s2 = c.s2;
    CHECK((c.x1 - path(c.s1)).norm() == 0.0);
    CHECK(c.flow_lines_used > prev_lines);
    prev_lines = c.flow_lines_used;
    CHECK(c.T_tilde_i >= 0.0);
    CHECK(c.T_tilde_i <= c.T_i);
    if (c.admissible) {
      // The superlevel-time bound behind this needs gamma_i < 1.
      if (c.grad_norm < 1.0) CHECK(c.grad_norm <= std::sqrt(2 * (c.f_x1 - r.level_c) / c.T_i) * 1.01);
      CHECK(c.f_val >= r.level_c - 1e-9);
      CHECK(c.f_val <= path_max + 1e-9);
    }
  }
  CHECK(r.total_flow_lines <= 2 * static_cast<int>(r.candidates.size()) + 2);
  (void)f;
}

double path_max(const Functional& f, const PathCurve& g) {
  double m = -INFINITY;
  for (int k = 0; k <= 4000; ++k) m = std::max(m, f.value(g(k / 4000.0)));
  return m;
}

}  // namespace

TEST_CASE("first bisection steps on the double well") {
  DoubleWellRun w;
  const Tolerances tol;
  const auto v1 = classify_omega(w.b.functional, w.path(0), w.atlas, tol);
  const auto v2_ = classify_omega(w.b.functional, w.path(1), w.atlas, tol);
  auto st = BisectState::initial(w.path, v1, v2_);
  CHECK(st.flow_lines == 2);
  CHECK((st.xm - v2(0, 0.3)).norm() < 1e-15);
  st = bisect_step(w.b.functional, w.path, st, w.atlas, tol);
  CHECK(st.s1 == 0.0);
  CHECK(st.s2 == 0.5);
  CHECK(st.x2_outcome == OmegaVerdict::Outcome::NotInTrackedComponent);
  CHECK((st.xm - v2(-0.5, 0.3)).norm() < 1e-15);
  st = bisect_step(w.b.functional, w.path, st, w.atlas, tol);
  CHECK(st.s1 == 0.25);
  CHECK(st.s2 == 0.5);
  CHECK(st.flow_lines == 4);
}

TEST_CASE("run_alg1b on the double well") {
  DoubleWellRun w;
  Tolerances tol;
  tol.n_max = 30;
  const auto r = run_alg1b(w.b.functional, w.path, w.atlas, tol, {50});
  REQUIRE(r.candidates.size() == 30);
  CHECK(r.best.y_tilde.norm() < 1e-3);
  CHECK(std::abs(r.best.f_val - 1.0) < 1e-3);
  CHECK(r.total_flow_lines == 32);
  CHECK(r.best.grad_norm == doctest::Approx(1.91e-3).epsilon(0.02));
  double best = INFINITY;
  for (const auto& c : r.candidates)
    if (c.admissible) best = std::min(best, c.grad_norm);
  CHECK(r.best.grad_norm == best);
  CHECK(r.best.trace.size() <= 50);
  check_report_invariants(w.b.functional, w.path, r, path_max(w.b.functional, w.path));
}

TEST_CASE("run_alg1b on an arc across the tilted hat") {
  const auto b = tilted_hat(0.1);
  const auto arc = PathCurve::closed_form([](double s) {
    const double th = std::numbers::pi * s;
    return v2(1.05 * std::sin(th), std::cos(th));
  });
  const auto atlas = make_atlas(b.functional, 0.05, {{1, v2(0, 1)}, {2, v2(0, -1)}});
  Tolerances tol;
  tol.grad_tol = 1e-6;
  const auto r = run_alg1b(b.functional, arc, atlas, tol);
  CHECK(r.termination == Termination::GradTolMet);
  CHECK((r.best.y_tilde - v2(std::sqrt(0.95), 0)).norm() < 1e-3);
  CHECK(r.best.f_val == doctest::Approx(0.0975).epsilon(1e-4));
  check_report_invariants(b.functional, arc, r, path_max(b.functional, arc));
}

TEST_CASE("invalid endpoints") {
  DoubleWellRun w;
  const auto inside = PathCurve::segment(v2(-1, 0.3), v2(-0.8, 0));
  try {
    (void)run_alg1b(w.b.functional, inside, w.atlas, Tolerances{});
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidEndpoints);
  }
  CHECK_THROWS_AS((void)run_alg1c(w.b.functional, v2(-1, 0.3), v2(-1, 0.3), PathCurve::constant(v2(-1, 0.3)),
                                  w.atlas, Tolerances{}),
                  Error);
}

TEST_CASE("run_alg1c reaches a tight gradient with restarts") {
  DoubleWellRun w;
  Tolerances tol;
  tol.grad_tol = 1e-6;
  tol.n_max = 25;
  tol.sep_eps = 1e-4;
  const auto r = run_alg1c(w.b.functional, w.path.front(), w.path.back(), w.path, w.atlas, tol);
  CHECK(r.termination == Termination::GradTolMet);
  CHECK(r.best.grad_norm < 1e-6);
  CHECK(r.best.y_tilde.norm() < 1e-6);
  CHECK(r.restarts >= 1);
  for (const auto& c : r.candidates) CHECK(c.s2 - c.s1 == std::ldexp(1.0, -c.depth));
}

TEST_CASE("starved run_alg1c") {
  DoubleWellRun w;
  Tolerances tol;
  tol.grad_tol = 1e-6;
  tol.n_max = 3;
  const auto r = run_alg1c(w.b.functional, w.path.front(), w.path.back(), w.path, w.atlas, tol);
  CHECK(r.termination == Termination::BudgetExhausted);
  CHECK(r.best.grad_norm > tol.grad_tol);
}

TEST_CASE("degenerate bracket") {
  DoubleWellRun w;
  Tolerances tol;
  tol.n_max = 60;
  tol.grad_tol = 1e-300;
  const auto r = run_alg1b(w.b.functional, w.path, w.atlas, tol);
  CHECK(r.termination == Termination::BracketDegenerate);
  CHECK(r.candidates.size() < 60);
}

TEST_CASE("ps_from_below") {
  DoubleWellRun w;
  Tolerances tol;
  tol.n_max = 20;
  const auto r = run_alg1b(w.b.functional, w.path, w.atlas, tol);
  SUBCASE("crossing level") {
    const auto y = ps_from_below(w.b.functional, r, w.atlas, tol, 100);
    CHECK(std::abs(y.f_val - 0.49) < 1e-6);
  }
  SUBCASE("rate from the pass level") {
    double prev = INFINITY;
    for (int k : {4, 16, 64}) {
      const auto y = ps_from_below(w.b.functional, r, w.atlas, tol, k, r.best.f_val);
      CHECK(y.grad_norm < prev);
      prev = y.grad_norm;
    }
  }
  SUBCASE("target deep inside the component") {
    const auto y = ps_from_below(w.b.functional, r, w.atlas, tol, 3);
    CHECK(y.f_val == doctest::Approx(0.5 - 1.0 / 3).epsilon(1e-6));
  }
  SUBCASE("unreachable level") {
    try {
      (void)ps_from_below(w.b.functional, r, w.atlas, tol, 1);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::LevelNotReached);
    }
  }
}
