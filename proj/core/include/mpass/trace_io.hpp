#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mpass/loop.hpp"

namespace mpass {

/// Shortest decimal text that reads back to exactly `v`.
[[nodiscard]] std::string format_real(double v);

inline constexpr std::size_t kFlowTraceSteps = 1000;

/// iter,s1,s2,f_x1,T_i,T_tilde_i,f_ytilde,gradnorm_ytilde,flow_lines_cum
void write_summary_csv(std::ostream& out, const RunReport& report);

/// step,t,f,gradnorm,x_0..x_{n-1}, truncated to the first `limit` samples.
void write_flowtrace_csv(std::ostream& out, std::span<const FlowSample> samples, std::size_t limit = kFlowTraceSteps);

/// Summary columns plus `invariant`; s1/s2 are the sub-path bounds, f_x1 the midpoint value,
/// and the extraction columns are nan.
void write_loop_summary_csv(std::ostream& out, const Alg2Report& report);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a header column; throws IoError when absent.
  [[nodiscard]] std::size_t column(const std::string& name) const;
};

/// Reads a numeric CSV with one header line. Throws IoError on malformed input.
[[nodiscard]] CsvTable read_csv(std::istream& in);

}  // namespace mpass
