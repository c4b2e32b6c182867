#include "spinterf/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "spinterf/csv.hpp"
#include "spinterf/errors.hpp"

namespace spinterf {

namespace {

const std::set<std::string> kKeys = {"gamma", "gamma_ghz_per_t", "k", "t_couple", "t_free",
                                     "B", "m_p", "sigma", "x0"};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "': not a number: '" + text + "'");
  }
  if (used != text.size()) throw ValidationError("config key '" + key + "': trailing characters in '" + text + "'");
  return value;
}

}  // namespace

ConfigEntries parse_config_text(const std::string& text) {
  ConfigEntries entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!kKeys.contains(key)) {
      throw ValidationError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    entries[key] = value;
  }
  return entries;
}

ConfigEntries read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

ParamSet apply_config(ParamSet p, const ConfigEntries& entries) {
  if (entries.contains("gamma") && entries.contains("gamma_ghz_per_t")) {
    throw ValidationError("config sets both gamma and gamma_ghz_per_t");
  }
  for (const auto& [key, text] : entries) {
    const double v = parse_number(key, text);
    if (key == "gamma") p.gamma = v;
    else if (key == "gamma_ghz_per_t") p.gamma = v * constants::ghz_per_tesla;
    else if (key == "k") p.k = v;
    else if (key == "t_couple") p.t_couple = v;
    else if (key == "t_free") p.t_free = v;
    else if (key == "B") p.B = v;
    else if (key == "m_p") p.m_p = v;
    else if (key == "sigma") p.sigma = v;
    else if (key == "x0") p.x0 = v;
  }
  if (entries.contains("t_couple") && !entries.contains("t_free")) p.t_free = p.t_couple;
  p.validate();
  return p;
}

std::string to_config_text(const ParamSet& p) {
  std::ostringstream out;
  out << "gamma = " << format_double(p.gamma) << "\n"
      << "k = " << format_double(p.k) << "\n"
      << "t_couple = " << format_double(p.t_couple) << "\n"
      << "t_free = " << format_double(p.t_free) << "\n"
      << "B = " << format_double(p.B) << "\n"
      << "m_p = " << format_double(p.m_p) << "\n"
      << "sigma = " << format_double(p.sigma) << "\n"
      << "x0 = " << format_double(p.x0) << "\n";
  return out.str();
}

}  // namespace spinterf
