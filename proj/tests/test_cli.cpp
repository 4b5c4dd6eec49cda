#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mpass/trace_io.hpp"
#include "mpass_cli/commands.hpp"

using namespace mpass;
using namespace mpass::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mpass_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable table(const fs::path& p) {
  std::ifstream in(p);
  return read_csv(in);
}

RunConfig config(const std::vector<std::string>& lines) { return load_config(std::nullopt, lines); }

}  // namespace

TEST_CASE("config parsing") {
  const auto kv = parse_key_values("# comment\nbenchmark = bvp:15\n\nn_max=12  # trailing\n");
  CHECK(kv.at("benchmark") == "bvp:15");
  CHECK(kv.at("n_max") == "12");
  const auto c = config_from_map(kv);
  CHECK(c.tolerances.n_max == 12);
  CHECK_THROWS_AS((void)parse_key_values("nonsense=1"), Error);
  CHECK_THROWS_AS((void)parse_key_values("n_max"), Error);
  CHECK_THROWS_AS((void)config({"n_max=abc"}), Error);
  CHECK_THROWS_AS((void)config({"n_max=0"}), Error);
  CHECK_THROWS_AS((void)config({"algorithm=simplex"}), Error);
  const auto c2 = config({"anchors=-1,0;1,0", "start=0.5,0", "fixed_step=true", "algorithm=thm_mp2"});
  REQUIRE(c2.anchors);
  CHECK(c2.anchors->size() == 2);
  CHECK((*c2.start)[0] == 0.5);
  CHECK(c2.tolerances.step_ctrl.fixed_step);
  CHECK(c2.algorithm == Algorithm::ThmMp2);
  for (const auto& [k, d] : config_keys()) CHECK_FALSE(d.empty());
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorCode::ConfigError) == kExitConfig);
  CHECK(exit_code_for(ErrorCode::BracketDegenerate) == kExitAlgorithm);
  CHECK(exit_code_for(ErrorCode::NonFinite) == kExitNumeric);
}

TEST_CASE("alg1b run artifacts") {
  const auto dir = scratch("alg1b");
  std::ostringstream log;
  auto c = config({"n_max=12"});
  c.output_dir = dir;
  const int rc = cmd_run(c, log);
  CHECK(rc == kExitAlgorithm);  // budget spent before grad_tol
  const auto t = table(dir / "summary.csv");
  CHECK(t.header == std::vector<std::string>{"iter", "s1", "s2", "f_x1", "T_i", "T_tilde_i", "f_ytilde",
                                             "gradnorm_ytilde", "flow_lines_cum"});
  REQUIRE(t.rows.size() == 12);
  const auto cl = t.column("flow_lines_cum");
  for (std::size_t k = 1; k < t.rows.size(); ++k) CHECK(t.rows[k][cl] > t.rows[k - 1][cl]);
  CHECK(fs::exists(dir / "flowtrace_12.csv"));
  const auto trace = table(dir / "flowtrace_12.csv");
  CHECK(trace.header.size() == 6);
  CHECK(trace.rows.size() <= kFlowTraceSteps);
  const std::string report = slurp(dir / "report.txt");
  CHECK(report.find("termination: BudgetExhausted") != std::string::npos);
  CHECK(report.find("best_point") != std::string::npos);
}

TEST_CASE("flowline mode descends") {
  const auto dir = scratch("flowline");
  std::ostringstream log;
  auto c = config({"algorithm=flowline", "start=0.5,0"});
  c.output_dir = dir;
  CHECK(cmd_run(c, log) == kExitOk);
  const auto t = table(dir / "flowtrace_0.csv");
  const auto cf = t.column("f");
  REQUIRE(t.rows.size() > 2);
  for (std::size_t k = 1; k < t.rows.size(); ++k) CHECK(t.rows[k][cf] <= t.rows[k - 1][cf]);
}

TEST_CASE("missing path file") {
  const auto dir = scratch("missing");
  std::ostringstream log;
  auto c = config({"path_file=/nonexistent/nodes.csv"});
  c.output_dir = dir;
  CHECK(cmd_run(c, log) == kExitConfig);
  CHECK(log.str().find("/nonexistent/nodes.csv") != std::string::npos);
}

TEST_CASE("path file and inline path") {
  const auto dir = scratch("pathfile");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "nodes.csv");
    out << "s,x_0,x_1\n0,-1,0.3\n0.5,0,0.3\n1,1,0.3\n";
  }
  std::ostringstream log;
  auto c = config({"n_max=8"});
  c.path_file = dir / "nodes.csv";
  c.output_dir = dir / "a";
  cmd_run(c, log);
  auto d = config({"n_max=8", "path=-1,0.3;1,0.3"});
  d.output_dir = dir / "b";
  cmd_run(d, log);
  CHECK(slurp(dir / "a" / "summary.csv") == slurp(dir / "b" / "summary.csv"));
  CHECK(slurp(dir / "a" / "summary.csv") == [&] {
    auto e = config({"n_max=8"});
    e.output_dir = dir / "c";
    cmd_run(e, log);
    return slurp(dir / "c" / "summary.csv");
  }());
}

TEST_CASE("bad inputs map to exit codes") {
  std::ostringstream log;
  auto c = config({"benchmark=nope"});
  c.output_dir = scratch("bad");
  CHECK(cmd_run(c, log) == kExitConfig);
  auto d = config({"path=-1,0;-0.9,0"});
  d.output_dir = scratch("bad2");
  CHECK(cmd_run(d, log) == kExitConfig);  // InvalidEndpoints
}

TEST_CASE("fixed-step reruns are byte-identical") {
  std::ostringstream log;
  auto a = config({"fixed_step=true", "n_max=15"});
  a.output_dir = scratch("det_a");
  auto b = a;
  b.output_dir = scratch("det_b");
  cmd_run(a, log);
  cmd_run(b, log);
  CHECK(slurp(a.output_dir / "summary.csv") == slurp(b.output_dir / "summary.csv"));
  CHECK(slurp(a.output_dir / "flowtrace_15.csv") == slurp(b.output_dir / "flowtrace_15.csv"));
}

TEST_CASE("loop runs") {
  std::ostringstream log;
  auto c = config({"benchmark=tilted_hat:0.1", "algorithm=thm_mp2", "grad_tol=1e-6"});
  c.output_dir = scratch("thm");
  CHECK(cmd_run(c, log) == kExitOk);
  const auto loop = table(c.output_dir / "loop_summary.csv");
  CHECK(loop.header.back() == "invariant");
  CHECK(table(c.output_dir / "summary.csv").rows.size() > 0);
  auto d = config({"benchmark=tilted_hat:0.1", "algorithm=alg2"});
  d.output_dir = scratch("alg2");
  CHECK(cmd_run(d, log) == kExitOk);
  CHECK(table(d.output_dir / "summary.csv").header.back() == "invariant");
}

TEST_CASE("figure from a double-well run") {
  std::ostringstream log;
  auto c = config({"n_max=20"});
  c.output_dir = scratch("figure");
  cmd_run(c, log);
  cmd_figure(c.output_dir);
  const auto f = table(c.output_dir / "fig_f.csv");
  const auto g = table(c.output_dir / "fig_grad.csv");
  CHECK(f.header == std::vector<std::string>{"iter", "t", "value"});
  REQUIRE(f.rows.size() == g.rows.size());
  for (std::size_t k = 0; k < f.rows.size(); ++k) {
    CHECK(f.rows[k][0] == g.rows[k][0]);
    CHECK(f.rows[k][1] == g.rows[k][1]);
  }
  // Time spent within 1% of the saddle level, per iteration.
  std::map<int, double> plateau;
  std::map<int, std::vector<std::pair<double, double>>> grad;
  for (std::size_t k = 0; k + 1 < f.rows.size(); ++k) {
    const auto& a = f.rows[k];
    const auto& b = f.rows[k + 1];
    const int it = static_cast<int>(a[0]);
    plateau[it] += 0.0;
    if (b[0] == a[0] && std::abs(a[2] - 1.0) < 0.01 && std::abs(b[2] - 1.0) < 0.01) plateau[it] += b[1] - a[1];
  }
  for (const auto& row : g.rows) grad[static_cast<int>(row[0])].push_back({row[1], row[2]});
  double prev = -1.0;
  int seen = 0;
  for (const auto& [it, d] : plateau) {
    if (seen++ == 5) break;
    CHECK(d >= prev);
    prev = d;
  }
  CHECK(plateau.rbegin()->second > plateau.begin()->second);
  const auto& last = grad.rbegin()->second;
  const auto argmin = std::min_element(last.begin(), last.end(),
                                       [](const auto& x, const auto& y) { return x.second < y.second; });
  CHECK(argmin + 1 < last.end());
  CHECK(argmin != last.begin());
}

TEST_CASE("figure without a run") {
  const auto dir = scratch("empty");
  fs::create_directories(dir);
  try {
    cmd_figure(dir);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingRun);
  }
}

TEST_CASE("audit and bench list") {
  CHECK(cmd_audit("double_well", 20, 1e-5, 1) < 1e-6);
  CHECK(cmd_audit("bvp:63", 10, 1e-5, 1) < 1e-5);
  std::ostringstream out;
  cmd_bench_list(out);
  CHECK(out.str().find("tilted_hat:0.1") != std::string::npos);
}

TEST_CASE("output dir override from the environment") {
  ::setenv("MPASS_OUTPUT_DIR", "/tmp/mpass_env_dir", 1);
  const auto c = config({"output_dir=elsewhere"});
  ::unsetenv("MPASS_OUTPUT_DIR");
  CHECK(c.output_dir == fs::path("/tmp/mpass_env_dir"));
}
