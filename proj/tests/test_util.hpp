#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "mmi/mmi.hpp"
#include "oracles.hpp"

namespace testutil {

inline mmi::Matrix to_matrix(const oracle::Mat& rows) {
  mmi::Matrix m;
  for (const auto& r : rows) m.append_row(r);
  return m;
}

inline mmi::Dataset to_dataset(const oracle::Instance& inst) { return {to_matrix(inst.x), inst.y}; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("mmi-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes a dataset as CSV with the label in the last column.
inline void write_dataset(const std::string& path, const mmi::Dataset& data) {
  std::ofstream out(path);
  for (std::size_t j = 0; j < data.dims(); ++j) out << "x" << j << ',';
  out << "label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.features.row(i)) out << mmi::format_double(v) << ',';
    out << data.labels[i] << '\n';
  }
}

}  // namespace testutil
