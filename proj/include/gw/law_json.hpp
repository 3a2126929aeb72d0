#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "gw/offspring_law.hpp"

namespace gw {

/// Malformed or invalid law specification.
class LawSpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Builds a law from {"family": ..., "alpha": ..., "params": {...}}.
///
/// Families: "binary" (alias "BIN"), "geometric" ("GEO"), "stable" with
/// params.c, "zipf" with optional params.weight, "finite" with params.pmf.
OffspringLaw law_from_json(const nlohmann::json& spec);

/// Accepts inline JSON (text starting with '{') or a path to a JSON file.
OffspringLaw parse_law_spec(const std::string& text_or_path);

/// Canonical JSON spec that law_from_json maps back to the same law.
nlohmann::json law_to_json(const OffspringLaw& law);

}  // namespace gw
