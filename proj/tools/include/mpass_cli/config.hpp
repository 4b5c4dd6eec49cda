#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpass/core.hpp"

namespace mpass::cli {

enum class Algorithm { Alg1b, Alg1c, Alg2, ThmMp2, Flowline };

/// Everything a `run` invocation needs, parsed from key=value text.
struct RunConfig {
  std::string benchmark = "double_well";
  Algorithm algorithm = Algorithm::Alg1b;
  std::optional<double> level_c;
  /// "default", or inline points "x,y;x,y;..." placed at uniform parameters.
  std::string path = "default";
  std::optional<std::filesystem::path> path_file;
  std::optional<Vector> start;
  std::optional<std::vector<Vector>> anchors;
  std::optional<double> escape_level;
  std::optional<double> eps_nbhd;
  std::optional<double> ball_r;
  Tolerances tolerances{};
  std::uint64_t seed = 0;
  std::size_t keep_trace = 1000;
  std::filesystem::path output_dir = "mpass_out";
};

/// Keys accepted in config files and overrides, with one-line descriptions.
[[nodiscard]] const std::map<std::string, std::string>& config_keys();

/// Parses `key=value` lines ('#' starts a comment). Throws ConfigError.
[[nodiscard]] std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Builds a config from an optional file plus overrides; MPASS_OUTPUT_DIR wins over output_dir.
[[nodiscard]] RunConfig load_config(const std::optional<std::filesystem::path>& file,
                                    std::span<const std::string> overrides);

[[nodiscard]] RunConfig config_from_map(const std::map<std::string, std::string>& kv);

[[nodiscard]] const char* to_string(Algorithm a) noexcept;

}  // namespace mpass::cli
