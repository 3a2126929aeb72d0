#include "gw/law_json.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace gw {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return s;
}

double number_field(const nlohmann::json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) throw LawSpecError(std::string("missing field '") + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number()) throw LawSpecError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

}  // namespace

OffspringLaw law_from_json(const nlohmann::json& spec) {
    if (!spec.is_object()) throw LawSpecError("law spec must be a JSON object");
    if (!spec.contains("family") || !spec.at("family").is_string())
        throw LawSpecError("law spec needs a string field 'family'");
    const std::string family = lower(spec.at("family").get<std::string>());
    const nlohmann::json params = spec.value("params", nlohmann::json::object());
    if (!params.is_object()) throw LawSpecError("'params' must be an object");
    const bool has_alpha = spec.contains("alpha");
    const double alpha = has_alpha ? number_field(spec, "alpha") : 1.0;

    try {
        if (family == "binary" || family == "bin") {
            if (alpha != 1.0) throw LawSpecError("binary law has alpha = 1");
            return OffspringLaw::binary();
        }
        if (family == "geometric" || family == "geo") {
            if (alpha != 1.0) throw LawSpecError("geometric law has alpha = 1");
            return OffspringLaw::geometric();
        }
        if (family == "stable") {
            if (!has_alpha) throw LawSpecError("stable law needs 'alpha'");
            return OffspringLaw::stable(alpha, number_field(params, "c"));
        }
        if (family == "zipf") {
            if (!has_alpha) throw LawSpecError("zipf law needs 'alpha'");
            std::optional<double> weight;
            if (params.contains("weight")) weight = number_field(params, "weight");
            return OffspringLaw::zipf(alpha, weight);
        }
        if (family == "finite") {
            if (alpha != 1.0) throw LawSpecError("finite law has alpha = 1");
            if (!params.contains("pmf") || !params.at("pmf").is_array())
                throw LawSpecError("finite law needs params.pmf as an array");
            std::vector<double> pmf;
            for (const auto& v : params.at("pmf")) {
                if (!v.is_number()) throw LawSpecError("params.pmf entries must be numbers");
                pmf.push_back(v.get<double>());
            }
            return OffspringLaw::finite(std::move(pmf));
        }
    } catch (const LawSpecError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw LawSpecError(e.what());
    }
    throw LawSpecError("unknown law family '" + family + "'");
}

OffspringLaw parse_law_spec(const std::string& text_or_path) {
    std::string text;
    const auto first = text_or_path.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text_or_path[first] == '{') {
        text = text_or_path;
    } else {
        std::ifstream in(text_or_path);
        if (!in) throw LawSpecError("cannot open law file '" + text_or_path + "'");
        std::ostringstream os;
        os << in.rdbuf();
        text = os.str();
    }
    nlohmann::json spec;
    try {
        spec = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw LawSpecError(std::string("malformed law JSON: ") + e.what());
    }
    return law_from_json(spec);
}

nlohmann::json law_to_json(const OffspringLaw& law) {
    nlohmann::json spec;
    spec["family"] = to_string(law.family());
    spec["alpha"] = law.alpha();
    nlohmann::json params = nlohmann::json::object();
    switch (law.family()) {
        case Family::stable: params["c"] = law.parameter(); break;
        case Family::zipf: params["weight"] = law.parameter(); break;
        case Family::finite: {
            auto head = law.head();
            params["pmf"] = std::vector<double>(head.begin(), head.end());
            break;
        }
        default: break;
    }
    spec["params"] = params;
    return spec;
}

}  // namespace gw
