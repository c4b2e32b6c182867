#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "spinterf/core.hpp"

namespace spinterf {

inline constexpr const char* kToolVersion = "spinterf 0.1.0";

/// 17 significant digits, enough to round-trip any double exactly.
std::string format_double(double v);

/// Comment line recording the tool version and the full parameter set.
std::string provenance_comment(const ParamSet& p);

struct CsvTable {
  std::vector<std::string> comments;  // emitted as "# ..." lines before the header
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values);
  void write(std::ostream& out) const;
  void write(const std::filesystem::path& path) const;
};

/// Reads a table written by CsvTable::write. Comment lines are collected.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable read_csv(std::istream& in);

/// Column index by name; throws ValidationError when absent.
std::size_t column_index(const CsvTable& table, const std::string& name);
std::vector<double> column_values(const CsvTable& table, const std::string& name);

}  // namespace spinterf
