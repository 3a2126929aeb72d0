#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace gw {

struct CriterionResult {
    int id = 0;
    std::string suite;  // exact, mc-fast or mc-full
    std::string title;
    bool pass = false;
    std::string detail;
    nlohmann::json data;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::string suite = "all";  // exact, mc-fast, mc-full or all
    std::uint64_t seed = 0;     // 0 selects kDefaultSeed
    unsigned workers = 1;
    std::vector<int> only;      // restrict to these criterion ids when non-empty
};

/// Suite of each acceptance criterion, by id 1..16.
std::string criterion_suite(int id);

/// Runs the selected acceptance criteria in id order. `progress`, when set,
/// is called after each criterion.
std::vector<CriterionResult> run_verify(const VerifyOptions& options,
                                        const std::function<void(const CriterionResult&)>& progress = {});

/// One line: "PASS  C01 [exact] title :: detail".
std::string format_criterion_line(const CriterionResult& r);

}  // namespace gw
