#include "hkt/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace hkt;
using namespace hkt::cli;
using nlohmann::json;

namespace {

const char* kNs5 = R"({"taus":[{"p1":[1,0,0,0],"p2":[0,0,0,0],"a":[0,0,0,0],"r":1.0}]})";

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

int run_main(std::vector<std::string> args) {
    args.insert(args.begin(), "hktgeom");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return main_entry(static_cast<int>(argv.size()), argv.data());
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto p = std::filesystem::temp_directory_path() / ("hkt_cli_test_" + name);
    std::ofstream(p) << content;
    return p;
}

}  // namespace

TEST_CASE("parses the single-map and flat configs") {
    const auto in = parse_config(kNs5);
    REQUIRE(in.superposition.taus.size() == 1);
    CHECK(in.superposition.taus[0].p1 == quat::Quaternion::one());
    CHECK(in.superposition.taus[0].weight == 1.0);
    CHECK(in.warnings.empty());
    const auto flat = parse_config(R"({"taus":[]})");
    CHECK(flat.superposition.taus.empty());
    CHECK(flat.warnings.size() == 1);
    const auto full = parse_config(R"({"taus":[], "box":[-1,3], "form":"cayley_phi", "mbrane":{"kind":"M5","q":2}})");
    CHECK(full.superposition.box_hi == 3);
    CHECK(full.form == calib::CalibrationKind::CayleyPlusPhi);
    REQUIRE(full.mbrane);
    CHECK(full.mbrane->q == 2);
}

TEST_CASE("config errors name the offending field") {
    CHECK(error_of(R"({})").find("taus") != std::string::npos);
    CHECK(error_of(R"({"taus":[{"p1":[1,0,0],"p2":[0,0,0,0],"a":[0,0,0,0],"r":1}]})").find("taus[0].p1") != std::string::npos);
    CHECK(error_of(R"({"taus":[{"p1":[1,0,0,0],"p2":[0,0,0,0],"a":[0,0,0,0],"r":-1}]})").find("taus[0].r") != std::string::npos);
    CHECK(error_of(R"({"taus":[{"p1":[0,0,0,0],"p2":[0,0,0,0],"a":[0,0,0,0],"r":1}]})").find("degenerate") != std::string::npos);
    CHECK(error_of(R"({"taus":[], "extra":1})").find("extra") != std::string::npos);
    CHECK(error_of(R"({"taus":[], "form":"phi"})").find("form") != std::string::npos);
    CHECK(error_of(R"({"taus":[], "box":[2,1]})").find("box") != std::string::npos);
    CHECK(error_of(R"({"taus":[], "mbrane":{"kind":"M7","q":1}})").find("mbrane.kind") != std::string::npos);
    CHECK(error_of("{\n  \"taus\": [,]\n}").find("line 2") != std::string::npos);
}

TEST_CASE("verify-hkt on the single-map config passes and marks I as HKT") {
    RunOptions o;
    o.samples = 10;
    const auto rep = run("verify-hkt", parse_config(kNs5), o);
    CHECK(rep.passed());
    const auto doc = json::parse(rep.to_json());
    CHECK(doc["details"]["verify-hkt"]["I_triple"] == "also HKT");
    CHECK(doc["details"]["verify-hkt"]["parameter_class"] == "R");
    for (const auto& c : doc["checks"]) {
        CHECK(c.contains("name"));
        CHECK(c.contains("value"));
        CHECK(c.contains("threshold"));
        CHECK(c.contains("pass"));
    }
    CHECK(rep.sidecars.count("verify-hkt") == 1);
}

TEST_CASE("tau-class") {
    const auto rep = run("tau-class", parse_config(R"({"taus":[{"p1":[1,0,0,0],"p2":[0.5,0.8,0,0],"a":[0,0,0,0],"r":1}]})"), {});
    CHECK(rep.passed());
    const auto doc = json::parse(rep.to_json());
    CHECK(doc["details"]["tau-class"]["taus"][0]["class"] == "C");
    CHECK(doc["details"]["tau-class"]["taus"][0]["form"] == "kahler2_phi");
}

TEST_CASE("charges on M-5 data") {
    RunOptions o;
    o.samples = 10;
    const auto rep = run("charges", parse_config(R"({"taus":[],"mbrane":{"kind":"M5","q":1}})"), o);
    CHECK(rep.passed());
    const auto doc = json::parse(rep.to_json());
    CHECK(doc["details"]["charges"]["charge"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("reports are deterministic") {
    RunOptions o;
    o.samples = 6;
    const auto in = parse_config(kNs5);
    CHECK(run("eom", in, o).to_json() == run("eom", in, o).to_json());
    CHECK_THROWS_AS(run("nope", in, o), std::invalid_argument);
}

TEST_CASE("exit codes") {
    const auto good = temp_file("good.json", kNs5);
    const auto bad = temp_file("bad.json", R"({"taus":[{"p1":[1,0]}]})");
    const auto out = std::filesystem::temp_directory_path() / "hkt_cli_test_out.json";
    CHECK(run_main({"tau-class", "--config", good.string(), "--out", out.string()}) == kExitPass);
    CHECK(std::filesystem::exists(out));
    CHECK(run_main({"tau-class", "--config", bad.string()}) == kExitConfigError);
    CHECK(run_main({"tau-class", "--config", "/nonexistent/file.json"}) == kExitConfigError);
    CHECK(run_main({"frobnicate", "--config", good.string()}) == kExitConfigError);
    CHECK(run_main({"verify-hkt", "--config", good.string(), "--step", "-1"}) == kExitConfigError);
    // A step this coarse breaks the thresholds: check failure, report still written.
    std::filesystem::remove(out);
    CHECK(run_main({"eom", "--config", good.string(), "--step", "0.05", "--samples", "3", "--out", out.string()}) ==
          kExitCheckFailure);
    CHECK(std::filesystem::exists(out));
    CHECK(std::filesystem::exists(std::filesystem::temp_directory_path() / "hkt_cli_test_out.eom.csv"));
}
