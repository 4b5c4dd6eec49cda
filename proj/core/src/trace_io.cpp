#include "mpass/trace_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace mpass {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_summary_csv(std::ostream& out, const RunReport& report) {
  out << "iter,s1,s2,f_x1,T_i,T_tilde_i,f_ytilde,gradnorm_ytilde,flow_lines_cum\n";
  for (const auto& c : report.candidates) {
    out << c.iter << ',' << format_real(c.s1) << ',' << format_real(c.s2) << ',' << format_real(c.f_x1) << ','
        << format_real(c.T_i) << ',' << format_real(c.T_tilde_i) << ',' << format_real(c.f_val) << ','
        << format_real(c.grad_norm) << ',' << c.flow_lines_used << '\n';
  }
}

void write_flowtrace_csv(std::ostream& out, std::span<const FlowSample> samples, std::size_t limit) {
  const Eigen::Index dim = samples.empty() ? 0 : samples.front().x.size();
  out << "step,t,f,gradnorm";
  for (Eigen::Index i = 0; i < dim; ++i) out << ",x_" << i;
  out << '\n';
  const std::size_t n = std::min(limit, samples.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = samples[k];
    out << k << ',' << format_real(s.t) << ',' << format_real(s.f_val) << ',' << format_real(s.grad_norm);
    for (Eigen::Index i = 0; i < dim; ++i) out << ',' << format_real(s.x[i]);
    out << '\n';
  }
}

void write_loop_summary_csv(std::ostream& out, const Alg2Report& report) {
  out << "iter,s1,s2,f_x1,T_i,T_tilde_i,f_ytilde,gradnorm_ytilde,flow_lines_cum,invariant\n";
  for (const auto& st : report.steps) {
    out << st.iter << ',' << format_real(st.a) << ',' << format_real(st.b) << ',' << format_real(st.f_mid)
        << ",nan,nan,nan,nan," << st.flow_lines_cum << ',' << st.invariant << '\n';
  }
}

std::size_t CsvTable::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorCode::IoError, "missing CSV column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::IoError, "empty CSV");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (cell == "nan") {
        row.push_back(std::nan(""));
        continue;
      }
      double v{};
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc{}) throw Error(ErrorCode::IoError, "non-numeric CSV cell '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != table.header.size()) throw Error(ErrorCode::IoError, "ragged CSV row");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace mpass
