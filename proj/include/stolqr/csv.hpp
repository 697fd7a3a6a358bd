#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stolqr/matcore.hpp"

namespace stolqr {

/// Decimal with 17 significant digits and '.' separator, independent of the
/// global locale.
std::string format_double(double v);

/// One row per matrix row, comma separated, LF line endings.
std::string matrix_csv(const Matrix& m);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
/// Throws InvalidConfig on ragged rows or unparsable numbers.
Matrix read_matrix_csv(const std::filesystem::path& path);

/// Minimal CSV table writer used by the experiment outputs.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  const std::string& str() const { return buf_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t cols_;
  std::string buf_;
};

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace stolqr
