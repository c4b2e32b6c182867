#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "spinterf/core.hpp"

namespace spinterf {

/// Raw key=value pairs, in file order of last assignment.
using ConfigEntries = std::map<std::string, std::string>;

/// Parses `key = value` lines; `#` starts a comment. Unknown keys and
/// malformed lines raise ValidationError.
ConfigEntries parse_config_text(const std::string& text);
ConfigEntries read_config_file(const std::filesystem::path& path);

/// Applies entries on top of `base`. Recognized keys: gamma (rad/s/T),
/// gamma_ghz_per_t, k, t_couple, t_free, B, m_p, sigma, x0. When t_couple is
/// set and t_free is not, t_free follows t_couple.
ParamSet apply_config(ParamSet base, const ConfigEntries& entries);

/// Serializes every field (SI units) with 17 significant digits.
std::string to_config_text(const ParamSet& p);

}  // namespace spinterf
