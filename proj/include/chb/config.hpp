#pragma once

#include "chb/dynamics.hpp"

#include <string>

namespace chb {

/// Parse the flat `section.key = value` format and run the assumption validators for the configured mode.
/// Throws ConfigError (with line:col) on syntax, unknown or duplicate keys and bad values,
/// ValidationError when an assumption fails.
ModelConfig parse_config(const std::string& text);

/// Parse without the assumption validators (syntax and value checks only).
ModelConfig parse_config_unvalidated(const std::string& text);

/// Every key of the configuration, one per line, in a form parse_config reads back to an equal config.
std::string emit_config(const ModelConfig& config);

/// Read and parse a file; a missing file is a ConfigError.
ModelConfig load_config(const std::string& path);

std::string to_string(Integrator integrator);
std::string to_string(ExperimentMode mode);

}  // namespace chb
