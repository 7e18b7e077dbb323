#pragma once

// CSV and PGM writers for the command-line tool. CSV: comma separated, '.'
// decimals, LF line ends, '#' header lines. PGM: plain (P2) graymap.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qdist/chaos.hpp"

namespace qdist::cli {

struct RunHeader {
  std::string command;
  std::map<std::string, std::string> config;
  /// Seconds; written as "not-recorded" when empty.
  std::optional<double> wall_time;
};

/// %.12g.
std::string format_number(double v);

using Row = std::vector<std::string>;

void write_csv(const std::string& path, const RunHeader& header, const std::vector<std::string>& columns,
               const std::vector<Row>& rows);

/// Min-max scaled to 0..255 (log10 of the values when `log_scale`). Missing
/// and, with log scaling, non-positive values are written as 0. Row 0 of the
/// image is row 0 of the scan.
void write_pgm(const std::string& path, const RunHeader& header, const ChaosScanResult& scan, bool log_scale);

}  // namespace qdist::cli
