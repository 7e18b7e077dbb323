#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qdist::cli {
namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  return f;
}

void write_header(std::ofstream& f, const RunHeader& h) {
  f << "# qdist " << QDIST_VERSION << '\n';
  f << "# command: " << h.command << '\n';
  for (const auto& [k, v] : h.config) f << "# " << k << ": " << v << '\n';
  f << "# wall_time: " << (h.wall_time ? format_number(*h.wall_time) + " s" : std::string("not-recorded")) << '\n';
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(const std::string& path, const RunHeader& header, const std::vector<std::string>& columns,
               const std::vector<Row>& rows) {
  auto f = open_output(path);
  write_header(f, header);
  for (std::size_t i = 0; i < columns.size(); ++i) f << (i ? "," : "") << columns[i];
  f << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw std::logic_error("write_csv: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << row[i];
    f << '\n';
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

void write_pgm(const std::string& path, const RunHeader& header, const ChaosScanResult& scan, bool log_scale) {
  std::vector<std::optional<double>> v(scan.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& x = scan.values[i];
    if (!x) continue;
    if (log_scale) {
      if (*x > 0.0) v[i] = std::log10(*x);
    } else {
      v[i] = *x;
    }
  }
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& x : v)
    if (x) {
      lo = std::min(lo, *x);
      hi = std::max(hi, *x);
    }
  auto f = open_output(path);
  f << "P2\n";
  f << "# qdist " << QDIST_VERSION << '\n';
  f << "# command: " << header.command << '\n';
  f << "# scale: " << (log_scale ? "log10" : "linear") << '\n';
  if (std::isfinite(lo)) f << "# min: " << format_number(lo) << "\n# max: " << format_number(hi) << '\n';
  f << "# missing: 0\n";
  f << scan.cols() << ' ' << scan.rows() << "\n255\n";
  for (std::size_t r = 0; r < scan.rows(); ++r) {
    for (std::size_t c = 0; c < scan.cols(); ++c) {
      const auto& x = v[r * scan.cols() + c];
      int g = 0;
      if (x) g = hi > lo ? static_cast<int>(std::lround(255.0 * (*x - lo) / (hi - lo))) : 255;
      f << (c ? " " : "") << g;
    }
    f << '\n';
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace qdist::cli
