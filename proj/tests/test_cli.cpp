#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "gw/orchestrator.hpp"

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = gw::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("exact q prints the extinction table") {
        const auto r = run({"exact", "q", "--n", "100"});
        CHECK(r.code == gw::exit_ok);
        CHECK(r.out.find("2,0.625,0.375\n") != std::string::npos);
    }

    TEST_CASE("malformed and invalid laws exit with the validation code") {
        CHECK(run({"law", "describe", "--law", "{not json"}).code == gw::exit_validation_error);
        CHECK(run({"exact", "q", "--n", "5", "--law", R"({"family":"stable","alpha":0.5,"params":{"c":0.9}})"}).code ==
              gw::exit_validation_error);
        const auto bad = run({"law", "validate", "--law", R"({"family":"finite","params":{"pmf":[0.3,0.3,0.4]}})"});
        CHECK(bad.code == gw::exit_validation_error);
        CHECK(run({"law", "validate", "--law", R"({"family":"GEO"})"}).code == gw::exit_ok);
        CHECK(run({"no-such-command"}).code != gw::exit_ok);
    }

    TEST_CASE("simulate em writes a complete artifact") {
        const auto r = run({"simulate", "em", "--m", "5", "--j", "5", "--samples", "2000", "--seed", "99"});
        REQUIRE(r.code == gw::exit_ok);
        const auto doc = nlohmann::json::parse(r.out);
        for (const char* key : {"schema_version", "config_hash", "seed", "config", "result"}) CHECK(doc.contains(key));
        CHECK(doc["schema_version"] == gw::kSchemaVersion);
        CHECK(doc["seed"] == 99);
        CHECK(doc["config_hash"] == gw::config_hash(doc["config"]));
        const auto& res = doc["result"];
        CHECK(std::fabs(res["estimate"].get<double>() - 5.0) <= 4 * res["std_error"].get<double>());
        CHECK(res["n_samples"] == 2000);

        const auto again = run({"simulate", "em", "--m", "5", "--j", "5", "--samples", "2000", "--seed", "99"});
        CHECK(again.out == r.out);
        const auto threaded = run({"simulate", "em", "--m", "5", "--j", "5", "--samples", "2000", "--seed", "99", "--workers", "3"});
        CHECK(nlohmann::json::parse(threaded.out)["result"] == res);
    }

    TEST_CASE("config hash is canonical and stable") {
        const auto a = nlohmann::json::parse(R"({"b":1,"a":[1,2]})");
        const auto b = nlohmann::json::parse(R"({"a":[1,2],"b":1})");
        CHECK(gw::config_hash(a) == gw::config_hash(b));
        CHECK(gw::config_hash(a).size() == 16);
        CHECK(gw::config_hash(a) != gw::config_hash(nlohmann::json::parse(R"({"b":2,"a":[1,2]})")));
    }

    TEST_CASE("numbers round trip") {
        CHECK(gw::format_number(0.375) == "0.375");
        CHECK(std::stod(gw::format_number(0.1)) == 0.1);
        CHECK(std::stod(gw::format_number(1.0 / 3.0)) == 1.0 / 3.0);
    }

    TEST_CASE("exact subcommands") {
        const auto d = run({"exact", "d", "--n", "4", "--law", R"({"family":"GEO"})"});
        CHECK(d.code == gw::exit_ok);
        const auto pmf = run({"exact", "total-pmf", "--n", "5"});
        CHECK(pmf.code == gw::exit_ok);
        CHECK(pmf.out.find("0.125") != std::string::npos);
        const auto dw = run({"exact", "total-pmf", "--n", "5", "--method", "dwass"});
        CHECK(dw.code == gw::exit_ok);
    }

    TEST_CASE("verify runs a single exact criterion") {
        const auto r = run({"verify", "--only", "1"});
        CHECK(r.code == gw::exit_ok);
        CHECK(r.err.find("PASS  C01") != std::string::npos);
    }
}

TEST_SUITE("cli") {
    TEST_CASE("simulate em with j = m = 1000 returns m within 4 SE") {
        const auto r = run({"simulate", "em", "--law", R"({"family":"binary"})", "--m", "1000", "--j", "1000", "--samples", "10000"});
        REQUIRE(r.code == gw::exit_ok);
        const auto res = nlohmann::json::parse(r.out)["result"];
        CHECK(std::fabs(res["estimate"].get<double>() - 1000.0) <= 4 * res["std_error"].get<double>());
    }

    TEST_CASE("exact suite passes and repeated runs give identical reports") {
        const auto a = run({"verify", "--suite", "exact"});
        CHECK(a.code == gw::exit_ok);
        for (const char* id : {"C01", "C02", "C03", "C04", "C05"}) CHECK(a.err.find(std::string("PASS  ") + id) != std::string::npos);
        auto strip_timing = [](std::string text) {
            auto doc = nlohmann::json::parse(text);
            for (auto& c : doc["result"]["criteria"]) c.erase("seconds");
            REQUIRE(doc["result"]["criteria"].size() == 2);
            return doc;
        };
        const auto b = run({"verify", "--only", "6", "10"});
        const auto c = run({"verify", "--only", "6", "10"});
        CHECK(strip_timing(b.out) == strip_timing(c.out));
    }
}
