#include "gw/orchestrator.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "gw/bounds.hpp"
#include "gw/exact_engine.hpp"
#include "gw/law_json.hpp"
#include "gw/limit_process.hpp"
#include "gw/simulator.hpp"
#include "gw/verify.hpp"

namespace gw {

using nlohmann::json;

std::string config_hash(const json& config) {
    const std::string text = config.dump();  // nlohmann::json keeps object keys sorted
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json artifact(const json& config, std::uint64_t seed, json result) {
    return {{"schema_version", kSchemaVersion},
            {"config_hash", config_hash(config)},
            {"seed", seed},
            {"config", config},
            {"result", std::move(result)}};
}

json to_json(const EstimatorResult& r) {
    return {{"estimate", r.estimate},   {"std_error", r.std_error}, {"n_samples", r.n_samples},
            {"censor_lo", r.censor_lo}, {"censor_hi", r.censor_hi}, {"n_censored", r.n_censored},
            {"seed", r.seed},           {"stream_base", r.stream_base}};
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

// Options shared by several subcommands. Each subcommand registers the ones
// it uses.
struct Options {
    std::string law = "{\"family\":\"binary\"}";
    std::uint64_t seed = kDefaultSeed;
    unsigned workers = 0;
    std::string out_path;

    std::size_t n = 100;
    std::size_t m = 1000;
    std::size_t j = 1;
    std::uint64_t samples = 10000;
    std::size_t gen_cap = 2000;
    std::string dump_paths;

    double alpha = 1.0;
    double y = 1.0;
    std::vector<double> Ts{1.0};
    double eta = 1.0;
    std::vector<double> ys{1.0};
    double T_cutoff = 16.0;
    std::size_t n_scale = 1000;
    std::uint64_t paths = 2000;
    double dt = 0.01;
    std::string method = "gw";

    std::string bound = "grid";
    std::uint64_t k = 4;

    std::string suite = "all";
    std::vector<int> only;
};

class Emitter {
public:
    Emitter(std::ostream& out, const std::string& path) : out_(out), path_(path) {}

    void write(const std::string& text) {
        if (path_.empty()) {
            out_ << text;
            return;
        }
        const auto parent = std::filesystem::path(path_).parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        std::ofstream f(path_, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + path_ + "'");
        f << text;
    }

private:
    std::ostream& out_;
    std::string path_;
};

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

class Csv {
public:
    explicit Csv(std::vector<std::string> header) { row_strings(header); }
    void row(std::initializer_list<double> values) {
        std::vector<std::string> cells;
        for (double v : values) cells.push_back(format_number(v));
        row_strings(cells);
    }
    void row_strings(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
        text_ += "\n";
    }
    const std::string& text() const { return text_; }

private:
    std::string text_;
};

json law_config(const OffspringLaw& law) { return law_to_json(law); }

McConfig mc_config(const Options& o) {
    McConfig c;
    c.seed = o.seed;
    c.workers = o.workers ? o.workers : workers_from_env();
    return c;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Critical Galton-Watson processes: exact recursions, window-maximum Monte Carlo "
                 "and limit functionals"};
    app.require_subcommand(1);
    Options o;
    std::function<int()> action;

    auto add_law = [&](CLI::App* c) {
        c->add_option("--law", o.law, "Law spec: JSON file path or inline JSON object");
    };
    auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out_path, "Output file (default stdout)"); };
    auto add_mc = [&](CLI::App* c) {
        c->add_option("--seed", o.seed, "Random seed");
        c->add_option("--workers", o.workers, "Worker threads (default: GW_WINDOW_WORKERS or 1)");
    };

    // law
    auto* law_cmd = app.add_subcommand("law", "Inspect an offspring law");
    law_cmd->require_subcommand(1);
    auto* law_validate = law_cmd->add_subcommand("validate", "Check the law's invariants");
    auto* law_describe = law_cmd->add_subcommand("describe", "Print analytic quantities");
    for (auto* c : {law_validate, law_describe}) {
        add_law(c);
        add_out(c);
    }
    law_validate->callback([&] {
        action = [&] {
            const auto law = parse_law_spec(o.law);
            const auto report = validate(law);
            json checks = json::array();
            for (const auto& c : report.checks)
                checks.push_back({{"name", c.name}, {"status", to_string(c.status)},
                                  {"residual", c.residual}, {"detail", c.detail}});
            const json config = {{"command", "law validate"}, {"law", law_config(law)}};
            Emitter(out, o.out_path)
                .write(json_text(artifact(config, 0, {{"law", report.law}, {"ok", report.ok()}, {"checks", checks}})));
            return report.ok() ? exit_ok : exit_validation_error;
        };
    });
    law_describe->callback([&] {
        action = [&] {
            const auto law = parse_law_spec(o.law);
            json head = json::array();
            for (std::uint64_t k = 0; k <= 10; ++k) head.push_back(law.pmf(k));
            json result = {{"name", law.name()},           {"family", to_string(law.family())},
                           {"alpha", law.alpha()},         {"parameter", law.parameter()},
                           {"total_mass", law.total_mass()}, {"mean", law.mean()},
                           {"pmf_0_to_10", head},          {"L_at_0.5", law.slowly_varying_L(0.5)}};
            if (auto b = law.factorial_variance()) result["factorial_variance"] = *b;
            else result["factorial_variance"] = nullptr;
            if (auto s = law.support_max()) result["support_max"] = *s;
            else result["support_max"] = nullptr;
            const json config = {{"command", "law describe"}, {"law", law_config(law)}};
            Emitter(out, o.out_path).write(json_text(artifact(config, 0, result)));
            return exit_ok;
        };
    });

    // exact
    auto* exact_cmd = app.add_subcommand("exact", "Deterministic recursions and constants");
    exact_cmd->require_subcommand(1);
    auto* exact_q = exact_cmd->add_subcommand("q", "CSV n,f_n(0),Q(n)");
    auto* exact_d = exact_cmd->add_subcommand("d", "CSV n,d_n");
    auto* exact_a = exact_cmd->add_subcommand("a", "CSV n,a_n");
    auto* exact_table = exact_cmd->add_subcommand("table", "CSV n,f_n(0),Q(n),d_n,a_n");
    auto* exact_pmf = exact_cmd->add_subcommand("total-pmf", "CSV n,pmf of the total progeny");
    auto* exact_const = exact_cmd->add_subcommand("constants", "JSON tail constants and survival asymptote");
    std::string pmf_method = "series";
    for (auto* c : {exact_q, exact_d, exact_a, exact_table, exact_pmf}) {
        add_law(c);
        add_out(c);
        c->add_option("--n", o.n, "Largest index")->check(CLI::PositiveNumber);
    }
    exact_pmf->add_option("--method", pmf_method, "series or dwass")->check(CLI::IsMember({"series", "dwass"}));
    auto exact_csv = [&](int which) {
        return [&, which] {
            action = [&, which] {
                const auto law = parse_law_spec(o.law);
                const auto t = full_iterate_table(law, o.n);
                Csv csv(which == 0   ? std::vector<std::string>{"n", "f_n(0)", "Q(n)"}
                        : which == 1 ? std::vector<std::string>{"n", "d_n"}
                        : which == 2 ? std::vector<std::string>{"n", "a_n"}
                                     : std::vector<std::string>{"n", "f_n(0)", "Q(n)", "d_n", "a_n"});
                for (std::size_t k = 0; k <= o.n; ++k) {
                    const double kd = static_cast<double>(k);
                    if (which == 0) csv.row({kd, t.f0_values[k], t.Q_values[k]});
                    if (which == 1 && k >= 1) csv.row({kd, t.d_values[k]});
                    if (which == 2 && k >= 1) csv.row({kd, t.a_values[k]});
                    if (which == 3) csv.row({kd, t.f0_values[k], t.Q_values[k], t.d_values[k], t.a_values[k]});
                }
                Emitter(out, o.out_path).write(csv.text());
                return exit_ok;
            };
        };
    };
    exact_q->callback(exact_csv(0));
    exact_d->callback(exact_csv(1));
    exact_a->callback(exact_csv(2));
    exact_table->callback(exact_csv(3));
    exact_pmf->callback([&] {
        action = [&] {
            const auto law = parse_law_spec(o.law);
            std::vector<double> pmf;
            if (pmf_method == "series") {
                const auto s = total_progeny_pmf(law, o.n);
                pmf = s.coeffs;
            } else {
                pmf = dwass_oracle_batch(law, o.n);
            }
            Csv csv({"n", "pmf"});
            for (std::size_t k = 1; k <= o.n; ++k) csv.row({static_cast<double>(k), pmf[k]});
            Emitter(out, o.out_path).write(csv.text());
            return exit_ok;
        };
    });
    add_out(exact_const);
    exact_const->add_option("--alpha", o.alpha, "Index alpha in (0, 1]");
    exact_const->add_option("--y", o.y, "Argument y > 0");
    std::string slack_law;
    double slack_n = 0.0;
    exact_const->add_option("--law", slack_law, "Law for the survival asymptote (optional)");
    exact_const->add_option("--n", slack_n, "n for the survival asymptote");
    exact_const->callback([&] {
        action = [&] {
            const auto c = tail_constants(o.alpha, o.y);
            json config = {{"command", "exact constants"}, {"alpha", o.alpha}, {"y", o.y}};
            json result = {{"term2_constant", c.term2_constant}, {"cor22_constant", c.cor22_constant}};
            if (!slack_law.empty()) {
                const auto law = parse_law_spec(slack_law);
                if (slack_n < 1.0) throw std::invalid_argument("--n >= 1 needed with --law");
                config["law"] = law_config(law);
                config["n"] = slack_n;
                result["slack_q"] = slack_Q_asymptote(law, slack_n);
                const auto n = static_cast<std::size_t>(slack_n);
                result["exact_q"] = iterate_extinction(law, n).Q_values[n];
            }
            Emitter(out, o.out_path).write(json_text(artifact(config, 0, result)));
            return exit_ok;
        };
    });

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimators");
    sim_cmd->require_subcommand(1);
    auto* sim_em = sim_cmd->add_subcommand("em", "E M_m(j)");
    auto* sim_tail = sim_cmd->add_subcommand("tail", "P(M(j) >= n) with censoring interval");
    auto* sim_paths = sim_cmd->add_subcommand("paths", "Generation sizes of sample paths");
    for (auto* c : {sim_em, sim_tail, sim_paths}) {
        add_law(c);
        add_out(c);
        add_mc(c);
        c->add_option("--samples", o.samples, "Number of paths")->check(CLI::PositiveNumber);
    }
    sim_em->add_option("--m", o.m, "Horizon m")->check(CLI::PositiveNumber);
    sim_em->add_option("--j", o.j, "Window length j")->check(CLI::PositiveNumber);
    sim_tail->add_option("--j", o.j, "Window length j")->check(CLI::PositiveNumber);
    sim_tail->add_option("--n", o.n, "Threshold n")->check(CLI::PositiveNumber);
    sim_tail->add_option("--gen-cap", o.gen_cap, "Generation cap")->check(CLI::PositiveNumber);
    sim_paths->add_option("--m", o.m, "Horizon m")->check(CLI::PositiveNumber);
    sim_paths->add_option("--j", o.j, "Window length for the summary")->check(CLI::PositiveNumber);
    sim_paths->add_option("--dump-paths", o.dump_paths, "CSV file for per-path generation sizes");
    sim_em->callback([&] {
        action = [&] {
            const auto law = parse_law_spec(o.law);
            const auto r = estimate_EM(law, o.m, o.j, o.samples, mc_config(o));
            const json config = {{"command", "simulate em"}, {"law", law_config(law)}, {"m", o.m},
                                 {"j", o.j}, {"samples", o.samples}, {"seed", o.seed}};
            Emitter(out, o.out_path).write(json_text(artifact(config, o.seed, to_json(r))));
            return exit_ok;
        };
    });
    sim_tail->callback([&] {
        action = [&] {
            const auto law = parse_law_spec(o.law);
            const auto pair = estimate_tail_pair(law, o.j, o.n, o.samples, o.gen_cap, mc_config(o));
            const json config = {{"command", "simulate tail"}, {"law", law_config(law)}, {"j", o.j},
                                 {"n", o.n}, {"samples", o.samples}, {"gen_cap", o.gen_cap},
                                 {"seed", o.seed}};
            json result = to_json(pair.window);
            result["total_progeny_tail"] = to_json(pair.total);
            Emitter(out, o.out_path).write(json_text(artifact(config, o.seed, result)));
            return exit_ok;
        };
    });
    sim_paths->callback([&] {
        action = [&] {
            const auto law = parse_law_spec(o.law);
            if (o.j > o.m + 1) throw std::invalid_argument("--j must not exceed m + 1");
            // Paths are generated sequentially from one stream per path so
            // that the dump is reproducible line by line.
            MomentAccumulator max_acc, extinct_acc;
            std::string dump = "path,generation,size\n";
            for (std::uint64_t s = 0; s < o.samples; ++s) {
                RngStream rng(o.seed, s);
                const auto t = simulate_generations(law, o.m, 1, rng);
                max_acc.add(static_cast<double>(window_max(t, o.j)));
                extinct_acc.add(t.extinct_at ? 1.0 : 0.0);
                if (!o.dump_paths.empty())
                    for (std::size_t g = 0; g < t.sizes.size(); ++g)
                        dump += std::to_string(s) + "," + std::to_string(g) + "," +
                                std::to_string(t.sizes[g]) + "\n";
            }
            if (!o.dump_paths.empty()) Emitter(out, o.dump_paths).write(dump);
            McConfig c = mc_config(o);
            const json config = {{"command", "simulate paths"}, {"law", law_config(law)}, {"m", o.m},
                                 {"j", o.j}, {"samples", o.samples}, {"seed", o.seed}};
            const json result = {{"window_max", to_json(mean_result(max_acc, c))},
                                 {"extinct_fraction", to_json(mean_result(extinct_acc, c))}};
            Emitter(out, o.out_path).write(json_text(artifact(config, o.seed, result)));
            return exit_ok;
        };
    });

    // limit
    auto* lim_cmd = app.add_subcommand("limit", "Limit-process functionals");
    lim_cmd->require_subcommand(1);
    auto* lim_vstar = lim_cmd->add_subcommand("vstar", "E V*(T)");
    auto* lim_phi = lim_cmd->add_subcommand("phi", "phi(eta)");
    auto* lim_psi = lim_cmd->add_subcommand("psi", "psi(y)");
    for (auto* c : {lim_vstar, lim_phi, lim_psi}) {
        add_law(c);
        add_out(c);
        add_mc(c);
        c->add_option("--n-scale", o.n_scale, "GW scale n")->check(CLI::PositiveNumber);
        c->add_option("--paths", o.paths, "Number of conditioned paths")->check(CLI::PositiveNumber);
    }
    lim_vstar->add_option("--T", o.Ts, "Horizon(s) T >= 1")->expected(1, -1);
    lim_vstar->add_option("--method", o.method, "gw or csbp")->check(CLI::IsMember({"gw", "csbp"}));
    lim_vstar->add_option("--dt", o.dt, "Grid step for csbp");
    lim_phi->add_option("--eta", o.eta, "eta in (0, 1]");
    lim_psi->add_option("--y", o.ys, "Argument(s) y > 0")->expected(1, -1);
    lim_psi->add_option("--T-cutoff", o.T_cutoff, "Horizon standing in for infinity");
    lim_vstar->callback([&] {
        action = [&] {
            json config = {{"command", "limit vstar"}, {"T", o.Ts}, {"method", o.method},
                           {"paths", o.paths}, {"seed", o.seed}};
            std::vector<EstimatorResult> rs;
            if (o.method == "csbp") {
                config["dt"] = o.dt;
                rs = csbp_alpha1_vstar(o.Ts, o.dt, o.paths, mc_config(o));
            } else {
                const auto law = parse_law_spec(o.law);
                config["law"] = law_config(law);
                config["n_scale"] = o.n_scale;
                rs = estimate_EVstar(law, o.Ts, o.n_scale, o.paths, mc_config(o));
            }
            json result = json::array();
            for (std::size_t i = 0; i < rs.size(); ++i) {
                json r = to_json(rs[i]);
                r["T"] = o.Ts[i];
                result.push_back(r);
            }
            Emitter(out, o.out_path).write(json_text(artifact(config, o.seed, result)));
            return exit_ok;
        };
    });
    lim_phi->callback([&] {
        action = [&] {
            const auto law = parse_law_spec(o.law);
            const auto r = estimate_phi(law, o.eta, o.n_scale, o.paths, mc_config(o));
            const json config = {{"command", "limit phi"}, {"law", law_config(law)}, {"eta", o.eta},
                                 {"n_scale", o.n_scale}, {"paths", o.paths}, {"seed", o.seed}};
            Emitter(out, o.out_path).write(json_text(artifact(config, o.seed, to_json(r))));
            return exit_ok;
        };
    });
    lim_psi->callback([&] {
        action = [&] {
            const auto law = parse_law_spec(o.law);
            const auto ps = estimate_psi(law, o.ys, o.T_cutoff, o.n_scale, o.paths, mc_config(o));
            const json config = {{"command", "limit psi"}, {"law", law_config(law)}, {"y", o.ys},
                                 {"T_cutoff", o.T_cutoff}, {"n_scale", o.n_scale},
                                 {"paths", o.paths}, {"seed", o.seed}};
            json result = json::array();
            for (const auto& p : ps) {
                json r = to_json(p.result);
                r["y"] = p.y;
                r["term1"] = p.term1;
                r["term2"] = p.term2;
                r["term3"] = p.term3;
                r["cutoff_bias_bound"] = p.cutoff_bias_bound;
                result.push_back(r);
            }
            Emitter(out, o.out_path).write(json_text(artifact(config, o.seed, result)));
            return exit_ok;
        };
    });

    // bounds
    auto* bounds_cmd = app.add_subcommand("bounds", "Probability inequalities against Monte Carlo");
    bounds_cmd->require_subcommand(1);
    auto* bounds_check = bounds_cmd->add_subcommand("check", "CSV of bound reports");
    add_law(bounds_check);
    add_out(bounds_check);
    add_mc(bounds_check);
    bounds_check->add_option("--samples", o.samples, "Paths per grid point")->check(CLI::PositiveNumber);
    bounds_check->add_option("--bound", o.bound, "grid, doob or vah1")
        ->check(CLI::IsMember({"grid", "doob", "vah1"}));
    bounds_check->add_option("--m", o.m, "m for a single bound");
    bounds_check->add_option("--k", o.k, "k for a single bound")->check(CLI::PositiveNumber);
    bounds_check->callback([&] {
        action = [&] {
            const auto law = parse_law_spec(o.law);
            std::vector<BoundReport> reports;
            if (o.bound == "grid")
                reports = check_bound_grid(law, o.samples, mc_config(o));
            else
                reports.push_back(check_bound(o.bound, law, o.m, o.k, o.samples, mc_config(o)));
            Csv csv({"bound", "m", "k", "y0", "R", "rhs", "lhs", "lhs_se", "lhs_hi", "verdict", "reason"});
            bool violated = false;
            for (const auto& r : reports) {
                violated = violated || r.verdict == Verdict::violated_beyond_3se;
                csv.row_strings({r.bound_name, std::to_string(r.m), std::to_string(r.k),
                                 format_number(r.y0), std::to_string(r.R), format_number(r.rhs_value),
                                 format_number(r.mc_lhs.estimate), format_number(r.mc_lhs.std_error),
                                 format_number(r.mc_lhs.censor_hi), to_string(r.verdict),
                                 "\"" + r.reason + "\""});
            }
            Emitter(out, o.out_path).write(csv.text());
            return violated ? exit_acceptance_failure : exit_ok;
        };
    });

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance criteria");
    verify_cmd->add_option("--suite", o.suite, "exact, mc-fast, mc-full or all")
        ->check(CLI::IsMember({"exact", "mc-fast", "mc-full", "all"}));
    verify_cmd->add_option("--only", o.only, "Restrict to criterion ids")->expected(1, -1);
    add_out(verify_cmd);
    add_mc(verify_cmd);
    verify_cmd->callback([&] {
        action = [&] {
            VerifyOptions v;
            v.suite = o.suite;
            v.seed = o.seed;
            v.workers = o.workers ? o.workers : workers_from_env();
            v.only = o.only;
            const auto results = run_verify(v, [&](const CriterionResult& r) {
                err << format_criterion_line(r) << std::endl;
            });
            bool all = true;
            json list = json::array();
            for (const auto& r : results) {
                all = all && r.pass;
                list.push_back({{"id", r.id}, {"suite", r.suite}, {"title", r.title},
                                {"pass", r.pass}, {"detail", r.detail}, {"data", r.data}});
            }
            const json config = {{"command", "verify"}, {"suite", o.suite}, {"only", o.only},
                                 {"seed", o.seed}};
            Emitter(out, o.out_path)
                .write(json_text(artifact(config, o.seed, {{"all_pass", all}, {"criteria", list}})));
            return all ? exit_ok : exit_acceptance_failure;
        };
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_validation_error;
    }
    if (!action) {
        err << "no command given\n";
        return exit_validation_error;
    }
    try {
        return action();
    } catch (const LawSpecError& e) {
        err << "invalid law: " << e.what() << "\n";
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << "\n";
    } catch (const std::domain_error& e) {
        err << "domain error: " << e.what() << "\n";
    } catch (const std::length_error& e) {
        err << "budget exceeded: " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return exit_validation_error;
}

}  // namespace gw
