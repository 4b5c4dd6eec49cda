#pragma once

#include <filesystem>
#include <iosfwd>

#include "mpass/error.hpp"
#include "mpass_cli/config.hpp"

namespace mpass::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitAlgorithm = 3;
inline constexpr int kExitNumeric = 4;

[[nodiscard]] int exit_code_for(ErrorCode code) noexcept;

/// Runs the configured algorithm and writes summary.csv, flowtrace_<i>.csv and report.txt.
///
/// Returns the process exit code; algorithm errors still leave whatever was written.
int cmd_run(const RunConfig& config, std::ostream& log);

/// Writes fig_f.csv and fig_grad.csv (iter,t,value) from the flow traces of a finished run.
/// Throws MissingRun when the directory holds no summary.csv.
void cmd_figure(const std::filesystem::path& run_dir);

void cmd_bench_list(std::ostream& out);

/// Largest gradient audit value over `points` seeded random points in [-2, 2]^n.
[[nodiscard]] double cmd_audit(const std::string& benchmark, int points, double h, std::uint64_t seed);

}  // namespace mpass::cli
