#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinexus/grid.hpp"

namespace kinexus::io {

/// 17 significant digits: enough to round-trip any double, so reruns are
/// byte-identical.
std::string format_double(double v);

/// Evenly strided step indices including the first and the last.
std::vector<std::size_t> snapshot_indices(std::size_t n_steps_plus_one,
                                          std::size_t max_snapshots);

void ensure_directory(const std::string& dir);

/// UTF-8, LF line endings.
void write_text(const std::string& path, const std::string& content);

void write_json(const std::string& path, const nlohmann::ordered_json& doc);

/// One CSV block with a header row; every cell printed with format_double
/// except pre-rendered string cells.
class CsvFile {
 public:
  explicit CsvFile(std::string header);
  void row(std::span<const double> cells);
  const std::string& str() const { return buffer_; }
  void save(const std::string& path) const;

 private:
  std::string buffer_;
};

}  // namespace kinexus::io
