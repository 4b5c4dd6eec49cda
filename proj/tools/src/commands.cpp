#include "mpass_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <regex>
#include <sstream>

#include "mpass/bench.hpp"
#include "mpass/trace_io.hpp"

namespace mpass::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonFinite:
      return kExitNumeric;
    case ErrorCode::BudgetExhausted:
    case ErrorCode::BracketDegenerate:
    case ErrorCode::SeparationFailed:
    case ErrorCode::LevelNotReached:
    case ErrorCode::NotInBasin:
    case ErrorCode::OracleInconsistent:
      return kExitAlgorithm;
    default:
      return kExitConfig;
  }
}

namespace {

PathCurve read_path_file(const fs::path& file, int dim) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open path file " + file.string());
  CsvTable t;
  try {
    t = read_csv(in);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, "path file " + file.string() + ": " + e.what());
  }
  const bool has_s = !t.header.empty() && t.header.front() == "s";
  const std::size_t off = has_s ? 1 : 0;
  if (t.header.size() != off + static_cast<std::size_t>(dim))
    throw Error(ErrorCode::ConfigError, "path file " + file.string() + ": expected " + std::to_string(dim) +
                                            " coordinate columns");
  std::vector<Vector> pts;
  std::vector<PathNode> nodes;
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw Error(ErrorCode::ConfigError, "path file " + file.string() + ": ragged row");
    Vector x(dim);
    for (int i = 0; i < dim; ++i) x[i] = row[off + static_cast<std::size_t>(i)];
    if (has_s) nodes.push_back({row[0], x});
    else pts.push_back(x);
  }
  return has_s ? PathCurve::polyline(std::move(nodes)) : PathCurve::polyline_uniform(pts);
}

std::vector<Vector> parse_points(const std::string& text) {
  std::vector<Vector> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ';')) {
    std::stringstream cs(cell);
    std::string num;
    std::vector<double> v;
    while (std::getline(cs, num, ',')) {
      try {
        v.push_back(std::stod(num));
      } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigError, "path: cannot parse '" + num + "'");
      }
    }
    if (!v.empty()) out.push_back(Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  return out;
}

PathCurve resolve_path(const RunConfig& c, const BenchmarkSpec& b) {
  const int dim = b.functional.dim;
  if (c.path_file) return read_path_file(*c.path_file, dim);
  if (c.path == "default") {
    if (!b.default_path) throw Error(ErrorCode::ConfigError, b.name + " has no default path");
    return *b.default_path;
  }
  auto pts = parse_points(c.path);
  if (pts.size() < 2) throw Error(ErrorCode::ConfigError, "path needs at least two points");
  for (const auto& p : pts)
    if (p.size() != dim) throw Error(ErrorCode::ConfigError, "path point dimension differs from the benchmark's");
  return PathCurve::polyline_uniform(pts);
}

/// Anchors below `level`, the one nearest `home` first so that it gets label 1.
std::vector<Anchor> resolve_anchors(const RunConfig& c, const BenchmarkSpec& b, double level, const Vector& home) {
  std::vector<Vector> pts;
  if (c.anchors) {
    pts = *c.anchors;
  } else {
    for (const auto& m : b.minimizers)
      if (m.value < level) pts.push_back(m.point);
  }
  if (pts.empty()) throw Error(ErrorCode::ConfigError, "no anchor lies below the level");
  for (const auto& p : pts)
    if (p.size() != b.functional.dim) throw Error(ErrorCode::ConfigError, "anchor dimension differs from the benchmark's");
  std::stable_sort(pts.begin(), pts.end(),
                   [&](const Vector& a, const Vector& z) { return (a - home).norm() < (z - home).norm(); });
  std::vector<Anchor> anchors;
  for (std::size_t i = 0; i < pts.size(); ++i) anchors.push_back({static_cast<int>(i) + 1, pts[i]});
  return anchors;
}

void warn_level(const BenchmarkSpec& b, double level, std::ostream& log) {
  double lo = -std::numeric_limits<double>::infinity();
  for (const auto& m : b.minimizers) lo = std::max(lo, m.value);
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& s : b.saddles) hi = std::min(hi, s.value);
  if (!(level > lo && level < hi))
    log << "warning: level_c = " << level << " is outside (" << lo << ", " << hi << ") for " << b.name << '\n';
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + file.string());
  return out;
}

void write_point(std::ostream& out, const Vector& x) {
  out << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) out << (i ? ", " : "") << format_real(x[i]);
  out << ')';
}

void write_traces(const fs::path& dir, const RunReport& r, std::size_t limit) {
  for (const auto& cand : r.candidates) {
    if (cand.trace.empty()) continue;
    auto out = open_out(dir / ("flowtrace_" + std::to_string(cand.iter) + ".csv"));
    write_flowtrace_csv(out, cand.trace, limit);
  }
}

void write_best(std::ostream& out, const RunReport& r) {
  if (r.best.y_tilde.size() == 0) {
    out << "best: none\n";
    return;
  }
  out << "best_iter: " << r.best.iter << "\nbest_point: ";
  write_point(out, r.best.y_tilde);
  out << "\nbest_f: " << format_real(r.best.f_val) << "\nbest_gradnorm: " << format_real(r.best.grad_norm) << '\n';
}

int run_bisection(const RunConfig& c, const BenchmarkSpec& b, std::ostream& log) {
  const Functional& f = b.functional;
  const double level = c.level_c.value_or(b.recommended_c);
  warn_level(b, level, log);
  const PathCurve path = resolve_path(c, b);
  ComponentAtlas atlas = make_atlas(f, level, resolve_anchors(c, b, level, path.front()));
  atlas.escape_level = c.escape_level ? c.escape_level : b.escape_level;
  const RunOptions opts{c.keep_trace};

  RunReport r = c.algorithm == Algorithm::Alg1b
                    ? run_alg1b(f, path, atlas, c.tolerances, opts)
                    : run_alg1c(f, path.front(), path.back(), path, atlas, c.tolerances, opts);

  {
    auto out = open_out(c.output_dir / "summary.csv");
    write_summary_csv(out, r);
  }
  write_traces(c.output_dir, r, c.keep_trace);
  auto rep = open_out(c.output_dir / "report.txt");
  rep << "algorithm: " << to_string(c.algorithm) << "\nbenchmark: " << b.name
      << "\nlevel_c: " << format_real(level) << "\ntermination: " << to_string(r.termination)
      << "\niterations: " << r.candidates.size() << "\ntotal_flow_lines: " << r.total_flow_lines
      << "\nrestarts: " << r.restarts << '\n';
  write_best(rep, r);
  log << "termination: " << to_string(r.termination) << ", best gradnorm " << r.best.grad_norm << '\n';
  return r.termination == Termination::GradTolMet ? kExitOk : kExitAlgorithm;
}

struct LoopSetup {
  StrictMinContext ctx;
  ComponentAtlas atlas;
  HomotopyOracle oracle;
  PathCurve loop;
};

LoopSetup loop_setup(const RunConfig& c, const BenchmarkSpec& b, std::ostream& log) {
  const Functional& f = b.functional;
  if (!b.obstacle) throw Error(ErrorCode::ConfigError, b.name + " has no obstacle for the winding oracle");
  const double level = c.level_c ? *c.level_c : b.loop_c ? *b.loop_c : b.recommended_c;
  const PathCurve loop = resolve_path(c, b);
  const Vector& x_bar = loop.front();
  const double c_bar = f.value(x_bar);
  double eps = 0.0;
  if (c.eps_nbhd) {
    eps = *c.eps_nbhd;
  } else {
    double saddle = level;
    for (const auto& s : b.saddles) saddle = std::min(saddle, s.value);
    eps = 0.5 * (saddle - c_bar);
  }
  const double ball = c.ball_r.value_or(0.5 * (x_bar.head(2) - b.obstacle->head(2)).norm());
  StrictMinContext ctx = StrictMinContext::make(f, x_bar, eps, ball, level, c.tolerances.settle_tol);
  ComponentAtlas atlas = make_atlas(f, ctx.entry_level, resolve_anchors(c, b, ctx.entry_level, x_bar));
  atlas.escape_level = c.escape_level ? c.escape_level : b.escape_level;
  log << "loop base " << x_bar.transpose() << ", entry level " << ctx.entry_level << '\n';
  return {ctx, atlas, winding_oracle(*b.obstacle), loop};
}

void write_alg2_report(std::ostream& rep, const Alg2Report& r) {
  rep << "loop_outcome: " << (r.outcome == Alg2Report::Outcome::Found ? "Found" : "BudgetExhausted")
      << "\nloop_steps: " << r.steps.size() << "\nloop_flow_lines: " << r.flow_lines << "\nloop_bracket: ["
      << format_real(r.a) << ", " << format_real(r.b) << "]\n";
  if (r.found_verdict) {
    rep << "found_s: " << format_real(r.found_s) << "\nfound_point: ";
    write_point(rep, r.found_point);
    rep << "\nfound_verdict: " << to_string(r.found_verdict->outcome) << (r.flagged ? " (flagged)" : "") << '\n';
  }
}

int run_loop(const RunConfig& c, const BenchmarkSpec& b, std::ostream& log) {
  const Functional& f = b.functional;
  const LoopSetup s = loop_setup(c, b, log);
  if (c.algorithm == Algorithm::Alg2) {
    const Alg2Report r = run_alg2(f, s.loop, s.ctx, s.oracle, s.atlas, c.tolerances);
    {
      auto out = open_out(c.output_dir / "summary.csv");
      write_loop_summary_csv(out, r);
    }
    auto rep = open_out(c.output_dir / "report.txt");
    rep << "algorithm: alg2\nbenchmark: " << b.name << '\n';
    write_alg2_report(rep, r);
    return r.outcome == Alg2Report::Outcome::Found ? kExitOk : kExitAlgorithm;
  }

  const LoopPassReport r =
      run_thm_mp2(f, s.loop, s.ctx, s.oracle, s.atlas, c.tolerances, c.seed, RunOptions{c.keep_trace});
  {
    auto out = open_out(c.output_dir / "loop_summary.csv");
    write_loop_summary_csv(out, r.loop);
  }
  {
    auto out = open_out(c.output_dir / "summary.csv");
    write_summary_csv(out, r.pass);
  }
  write_traces(c.output_dir, r.pass, c.keep_trace);
  auto rep = open_out(c.output_dir / "report.txt");
  rep << "algorithm: thm_mp2\nbenchmark: " << b.name << "\nroute: " << to_string(r.route)
      << "\nfound_curvature: " << format_real(r.found_curvature) << '\n';
  write_alg2_report(rep, r.loop);
  rep << "termination: " << to_string(r.pass.termination) << "\ntotal_flow_lines: " << r.pass.total_flow_lines
      << '\n';
  write_best(rep, r.pass);
  log << "route: " << to_string(r.route) << ", best gradnorm " << r.pass.best.grad_norm << '\n';
  if (r.route == LoopPassReport::Route::DirectCritical) return kExitOk;
  if (r.route == LoopPassReport::Route::ChainedBisection && r.pass.termination == Termination::GradTolMet)
    return kExitOk;
  return kExitAlgorithm;
}

int run_flowline(const RunConfig& c, const BenchmarkSpec& b, std::ostream& log) {
  const Functional& f = b.functional;
  Vector x0 = c.start ? *c.start : resolve_path(c, b).front();
  if (x0.size() != f.dim) throw Error(ErrorCode::ConfigError, "start point dimension differs from the benchmark's");
  StopCondition stop = StopCondition::settle();
  if (const auto esc = c.escape_level ? c.escape_level : b.escape_level)
    stop.predicate = [lvl = *esc](const FlowSample& s) { return s.f_val < lvl; };
  const FlowTrajectory traj = integrate_flow(f, x0, c.tolerances, stop);
  {
    auto out = open_out(c.output_dir / "flowtrace_0.csv");
    write_flowtrace_csv(out, traj.samples, c.keep_trace);
  }
  auto rep = open_out(c.output_dir / "report.txt");
  rep << "algorithm: flowline\nbenchmark: " << b.name << "\nstop_reason: " << to_string(traj.stop_reason)
      << "\nsamples: " << traj.samples.size() << "\nfinal_t: " << format_real(traj.last().t) << "\nfinal_f: "
      << format_real(traj.last().f_val) << "\nfinal_gradnorm: " << format_real(traj.last().grad_norm)
      << "\nfinal_point: ";
  write_point(rep, traj.last().x);
  rep << '\n';
  log << "flow stopped: " << to_string(traj.stop_reason) << '\n';
  return traj.stop_reason == StopReason::NonFinite ? kExitNumeric : kExitOk;
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& log) {
  try {
    const BenchmarkSpec b = benchmark_by_name(config.benchmark);
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + config.output_dir.string() + ": " + ec.message());
    switch (config.algorithm) {
      case Algorithm::Alg1b:
      case Algorithm::Alg1c:
        return run_bisection(config, b, log);
      case Algorithm::Alg2:
      case Algorithm::ThmMp2:
        return run_loop(config, b, log);
      case Algorithm::Flowline:
        return run_flowline(config, b, log);
    }
    return kExitConfig;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}

void cmd_figure(const fs::path& run_dir) {
  if (!fs::exists(run_dir / "summary.csv"))
    throw Error(ErrorCode::MissingRun, "no summary.csv in " + run_dir.string());
  std::vector<std::pair<int, fs::path>> traces;
  const std::regex name(R"(flowtrace_(\d+)\.csv)");
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    std::smatch m;
    const std::string fname = entry.path().filename().string();
    if (std::regex_match(fname, m, name)) traces.emplace_back(std::stoi(m[1].str()), entry.path());
  }
  if (traces.empty()) throw Error(ErrorCode::MissingRun, "no flow traces in " + run_dir.string());
  std::sort(traces.begin(), traces.end());
  auto fig_f = open_out(run_dir / "fig_f.csv");
  auto fig_g = open_out(run_dir / "fig_grad.csv");
  fig_f << "iter,t,value\n";
  fig_g << "iter,t,value\n";
  for (const auto& [iter, file] : traces) {
    std::ifstream in(file);
    const CsvTable t = read_csv(in);
    const std::size_t ct = t.column("t"), cf = t.column("f"), cg = t.column("gradnorm");
    for (const auto& row : t.rows) {
      fig_f << iter << ',' << format_real(row[ct]) << ',' << format_real(row[cf]) << '\n';
      fig_g << iter << ',' << format_real(row[ct]) << ',' << format_real(row[cg]) << '\n';
    }
  }
}

void cmd_bench_list(std::ostream& out) {
  for (const auto& name : benchmark_names()) {
    const BenchmarkSpec b = benchmark_by_name(name);
    out << name << "  dim=" << b.functional.dim << "  c=" << format_real(b.recommended_c);
    if (!b.saddles.empty()) out << "  saddle level=" << format_real(b.saddles.front().value);
    out << '\n';
  }
}

double cmd_audit(const std::string& benchmark, int points, double h, std::uint64_t seed) {
  if (points <= 0 || !(h > 0)) throw Error(ErrorCode::ConfigError, "audit needs points > 0 and h > 0");
  const BenchmarkSpec b = benchmark_by_name(benchmark);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int k = 0; k < points; ++k) {
    Vector x(b.functional.dim);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = u(rng);
    worst = std::max(worst, audit_gradient(b.functional, x, h));
  }
  return worst;
}

}  // namespace mpass::cli
