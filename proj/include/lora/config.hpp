#pragma once

// Key = value configuration files. '#' starts a comment; lists are
// comma-separated. Densities are given per km^2.

#include <istream>
#include <string>

#include "lora/sweep.hpp"

namespace lora::config {

/// Throws ConfigError with the offending line number.
sweep::SweepSpec parse(std::istream& in);
sweep::SweepSpec load(const std::string& path);

/// Canonical text of a spec; parse(format(spec)) reproduces it exactly.
std::string format(const sweep::SweepSpec& spec);

/// Commented template holding the reference defaults.
std::string default_text();

}  // namespace lora::config
