// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is 0 when every selected criterion passes and 2 otherwise.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gw/estimator.hpp"
#include "gw/verify.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    gw::VerifyOptions options;
    options.workers = gw::workers_from_env();
    app.add_option("--suite", options.suite, "exact, mc-fast, mc-full or all")
        ->check(CLI::IsMember({"exact", "mc-fast", "mc-full", "all"}));
    app.add_option("--only", options.only, "Criterion ids to run")->check(CLI::Range(1, 16));
    app.add_option("--seed", options.seed, "Random seed (0 selects the default)");
    app.add_option("--workers", options.workers, "Worker threads");
    CLI11_PARSE(app, argc, argv);

    bool all_pass = true;
    gw::run_verify(options, [&](const gw::CriterionResult& r) {
        std::cout << gw::format_criterion_line(r) << std::endl;
        all_pass = all_pass && r.pass;
    });
    return all_pass ? 0 : 2;
}
