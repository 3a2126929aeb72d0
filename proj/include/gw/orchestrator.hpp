#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gw/estimator.hpp"

namespace gw {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { exit_ok = 0, exit_validation_error = 1, exit_acceptance_failure = 2 };

/// 64-bit FNV-1a of the canonical (sorted-key, compact) dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// {schema_version, config_hash, seed, config, result}.
nlohmann::json artifact(const nlohmann::json& config, std::uint64_t seed, nlohmann::json result);

nlohmann::json to_json(const EstimatorResult& r);

/// Shortest round-trip decimal form; '.' separator regardless of locale.
std::string format_number(double v);

/// Runs the command line tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gw
