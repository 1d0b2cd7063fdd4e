#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace burstmap {

// 17 significant digits, so every double round-trips exactly.
std::string format_double(double x);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
};

// Comma separated, header row first, LF line endings.
std::string to_csv(const Table& table);

// Writes `text` to `path` atomically enough for a single owner: a sibling
// temp file renamed over the target. Creates parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace burstmap
