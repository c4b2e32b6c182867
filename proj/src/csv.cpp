#include "spinterf/csv.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "spinterf/errors.hpp"

namespace spinterf {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string provenance_comment(const ParamSet& p) {
  std::ostringstream out;
  out << kToolVersion << " gamma=" << format_double(p.gamma) << " k=" << format_double(p.k)
      << " t_couple=" << format_double(p.t_couple) << " t_free=" << format_double(p.t_free)
      << " B=" << format_double(p.B) << " m_p=" << format_double(p.m_p) << " sigma=" << format_double(p.sigma)
      << " x0=" << format_double(p.x0) << " hbar=" << format_double(p.hbar);
  return out.str();
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> row;
  row.reserve(values.size());
  for (double v : values) row.push_back(format_double(v));
  rows.push_back(std::move(row));
}

void CsvTable::write(std::ostream& out) const {
  for (const auto& c : comments) out << "# " << c << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  write(out);
  if (!out) throw ValidationError("write failed for " + path.string());
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      table.comments.push_back(line.substr(2));
      continue;
    }
    if (!have_header) {
      table.header = split_line(line);
      have_header = true;
    } else {
      table.rows.push_back(split_line(line));
    }
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  return read_csv(in);
}

std::size_t column_index(const CsvTable& table, const std::string& name) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == name) return i;
  }
  throw ValidationError("no column named " + name);
}

std::vector<double> column_values(const CsvTable& table, const std::string& name) {
  const auto idx = column_index(table, name);
  std::vector<double> values;
  values.reserve(table.rows.size());
  for (const auto& row : table.rows) values.push_back(std::stod(row.at(idx)));
  return values;
}

}  // namespace spinterf
