#include "mpass_cli/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mpass::cli {

const char* to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::Alg1b: return "alg1b";
    case Algorithm::Alg1c: return "alg1c";
    case Algorithm::Alg2: return "alg2";
    case Algorithm::ThmMp2: return "thm_mp2";
    case Algorithm::Flowline: return "flowline";
  }
  return "unknown";
}

const std::map<std::string, std::string>& config_keys() {
  static const std::map<std::string, std::string> keys{
      {"benchmark", "double_well | tilted_hat:<eps> | bvp:<n>"},
      {"algorithm", "alg1b | alg1c | alg2 | thm_mp2 | flowline"},
      {"level_c", "sublevel c (default: the benchmark's recommended level)"},
      {"path", "'default' or inline nodes x,y;x,y;... at uniform parameters"},
      {"path_file", "CSV of path nodes, header s,x_0,..,x_{n-1} (s optional)"},
      {"start", "flowline start point x_0,x_1,..."},
      {"anchors", "component anchors x,y;x,y;... (default: benchmark minimizers below level_c)"},
      {"escape_level", "flows below this value leave every tracked basin"},
      {"eps_nbhd", "loop runs: size of the sublevel neighbourhood of the base minimizer"},
      {"ball_r", "loop runs: radius of the contractible ball around the base minimizer"},
      {"grad_tol", "stop once a candidate's gradient norm is below this"},
      {"t_budget", "maximum flow time per flow line"},
      {"settle_tol", "gradient threshold for settled flows"},
      {"sep_eps", "separation distance of the first deflection restart"},
      {"n_max", "bisection budget"},
      {"rtol", "integrator relative tolerance"},
      {"atol", "integrator absolute tolerance"},
      {"h_init", "initial step"},
      {"h_min", "smallest step"},
      {"h_max", "largest step"},
      {"fixed_step", "true for fixed-step integration (reproducible traces)"},
      {"h_fixed", "step length in fixed-step mode"},
      {"seed", "seed for random directions in saddle diagnostics"},
      {"keep_trace", "flow samples written per flowtrace file (default 1000)"},
      {"output_dir", "artifact directory (overridden by MPASS_OUTPUT_DIR)"},
  };
  return keys;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T number(const std::string& key, const std::string& text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw Error(ErrorCode::ConfigError, "key '" + key + "': cannot parse '" + text + "'");
  return value;
}

Vector point(const std::string& key, const std::string& text) {
  std::vector<double> coords;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) coords.push_back(number<double>(key, trim(cell)));
  if (coords.empty()) throw Error(ErrorCode::ConfigError, "key '" + key + "': empty point");
  return Eigen::Map<Vector>(coords.data(), static_cast<Eigen::Index>(coords.size()));
}

std::vector<Vector> points(const std::string& key, const std::string& text) {
  std::vector<Vector> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ';'))
    if (!trim(cell).empty()) out.push_back(point(key, trim(cell)));
  return out;
}

bool boolean(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw Error(ErrorCode::ConfigError, "key '" + key + "': expected true/false");
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (!config_keys().contains(key)) throw Error(ErrorCode::ConfigError, "unknown key '" + key + "'");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

RunConfig config_from_map(const std::map<std::string, std::string>& kv) {
  RunConfig c;
  StepControl& sc = c.tolerances.step_ctrl;
  for (const auto& [key, value] : kv) {
    if (key == "benchmark") c.benchmark = value;
    else if (key == "algorithm") {
      if (value == "alg1b") c.algorithm = Algorithm::Alg1b;
      else if (value == "alg1c") c.algorithm = Algorithm::Alg1c;
      else if (value == "alg2") c.algorithm = Algorithm::Alg2;
      else if (value == "thm_mp2") c.algorithm = Algorithm::ThmMp2;
      else if (value == "flowline") c.algorithm = Algorithm::Flowline;
      else throw Error(ErrorCode::ConfigError, "unknown algorithm '" + value + "'");
    }
    else if (key == "level_c") c.level_c = number<double>(key, value);
    else if (key == "path") c.path = value;
    else if (key == "path_file") c.path_file = value;
    else if (key == "start") c.start = point(key, value);
    else if (key == "anchors") c.anchors = points(key, value);
    else if (key == "escape_level") c.escape_level = number<double>(key, value);
    else if (key == "eps_nbhd") c.eps_nbhd = number<double>(key, value);
    else if (key == "ball_r") c.ball_r = number<double>(key, value);
    else if (key == "grad_tol") c.tolerances.grad_tol = number<double>(key, value);
    else if (key == "t_budget") c.tolerances.t_budget = number<double>(key, value);
    else if (key == "settle_tol") c.tolerances.settle_tol = number<double>(key, value);
    else if (key == "sep_eps") c.tolerances.sep_eps = number<double>(key, value);
    else if (key == "n_max") c.tolerances.n_max = number<int>(key, value);
    else if (key == "rtol") sc.rtol = number<double>(key, value);
    else if (key == "atol") sc.atol = number<double>(key, value);
    else if (key == "h_init") sc.h_init = number<double>(key, value);
    else if (key == "h_min") sc.h_min = number<double>(key, value);
    else if (key == "h_max") sc.h_max = number<double>(key, value);
    else if (key == "fixed_step") sc.fixed_step = boolean(key, value);
    else if (key == "h_fixed") sc.h_fixed = number<double>(key, value);
    else if (key == "seed") c.seed = number<std::uint64_t>(key, value);
    else if (key == "keep_trace") c.keep_trace = number<std::size_t>(key, value);
    else if (key == "output_dir") c.output_dir = value;
    else throw Error(ErrorCode::ConfigError, "unknown key '" + key + "'");
  }
  try {
    c.tolerances.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return c;
}

RunConfig load_config(const std::optional<std::filesystem::path>& file, std::span<const std::string> overrides) {
  std::map<std::string, std::string> kv;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file " + file->string());
    std::stringstream buf;
    buf << in.rdbuf();
    kv = parse_key_values(buf.str());
  }
  for (const auto& o : overrides)
    for (auto& [k, v] : parse_key_values(o)) kv[k] = v;
  RunConfig c = config_from_map(kv);
  if (const char* env = std::getenv("MPASS_OUTPUT_DIR"); env != nullptr && *env != '\0') c.output_dir = env;
  return c;
}

}  // namespace mpass::cli
