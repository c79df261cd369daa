#include "kinexus/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "kinexus/error.hpp"

namespace kinexus::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::size_t> snapshot_indices(std::size_t n, std::size_t max_snapshots) {
  std::vector<std::size_t> out;
  if (n == 0) return out;
  if (max_snapshots < 2) max_snapshots = 2;
  if (n <= max_snapshots) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i;
    return out;
  }
  out.reserve(max_snapshots);
  for (std::size_t j = 0; j < max_snapshots; ++j) {
    const std::size_t idx = (j * (n - 1)) / (max_snapshots - 1);
    if (out.empty() || out.back() != idx) out.push_back(idx);
  }
  return out;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, Errc::IoError, "cannot create directory '" + dir + "': " + ec.message());
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::IoError, "cannot open '" + path + "' for writing");
  out << content;
  require(out.good(), Errc::IoError, "write failed for '" + path + "'");
}

void write_json(const std::string& path, const nlohmann::ordered_json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

CsvFile::CsvFile(std::string header) : buffer_(std::move(header)) { buffer_ += '\n'; }

void CsvFile::row(std::span<const double> cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) buffer_ += ',';
    buffer_ += format_double(cells[i]);
  }
  buffer_ += '\n';
}

void CsvFile::save(const std::string& path) const { write_text(path, buffer_); }

}  // namespace kinexus::io
