#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "sturm/cli.hpp"
#include "sturm/error.hpp"

using namespace sturm;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

const std::string sine = std::string(STURM_TEST_DATA) + "/sine.toml";

}  // namespace

TEST_CASE("spectrum table") {
    const Result r = run({"spectrum", "-p", sine, "-n", "3"});
    CHECK(r.code == 0);
    std::istringstream in(r.out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "index rho zeros");
    for (int j = 1; j <= 3; ++j) {
        int index = 0;
        double rho = 0.0;
        int zeros = -1;
        in >> index >> rho >> zeros;
        CHECK(index == j);
        CHECK(std::abs(rho - (j * j + 1.0)) <= 1e-8);
        CHECK(zeros == j - 1);
    }
    // Byte-identical reruns.
    CHECK(run({"spectrum", "-p", sine, "-n", "3"}).out == r.out);
}

TEST_CASE("json output parses back") {
    const Result r = run({"zeros", "-p", sine, "--coeffs", "1@1,1@3", "--format", "json"});
    REQUIRE(r.code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j.at("count").at("N") == 1);
    CHECK(j.at("count").at("N_m") == 2);
    CHECK(j.at("combination").at("family") == "sturm");
    CHECK(j.at("combination").at("coeffs").size() == 2);
    int interior = 0;
    for (const auto& rec : j.at("records")) {
        if (rec.at("is_boundary")) continue;
        ++interior;
        CHECK(std::abs(rec.at("xi").get<double>() - std::numbers::pi / 2) <= 1e-9);
        CHECK(rec.at("p") == 2);
    }
    CHECK(interior == 1);

    const Result s = run({"spectrum", "-p", sine, "-n", "2", "--format", "json"});
    CHECK(nlohmann::json::parse(s.out).at("eigenpairs").size() == 2);
    const Result c = run({"spectrum", "-p", sine, "-n", "2", "--format", "csv"});
    CHECK(c.out.rfind("index,rho,zeros\n1,", 0) == 0);
}

TEST_CASE("verify commands and exit codes") {
    const Result st2 = run({"verify", "st2", "-p", sine, "--coeffs", "1@1,1@3"});
    CHECK(st2.code == 0);
    CHECK(st2.out.find("pass") != std::string::npos);
    CHECK(run({"verify", "mono", "-p", sine, "--coeffs", "1@1,1@3", "--k-min", "-2", "--k-max", "2"}).code == 0);
    CHECK(run({"verify", "hurwitz", "-p", sine, "--coeffs", "1@2,0.5@5"}).code == 0);
    CHECK(run({"verify", "hurwitz", "-p", sine, "--coeffs", "1@1,0.5@5"}).code == 1);
    const Result suite = run({"verify", "suite", "--seed", "1", "--trials", "2", "--format", "json"});
    CHECK(suite.code == 0);
    CHECK(nlohmann::json::parse(suite.out).at("failures") == 0);

    const Result missing = run({"spectrum", "-p", "/nonexistent/problem.toml"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("file not found") != std::string::npos);
    CHECK(run({"zeros", "-p", sine, "--coeffs", "1#1"}).code == 1);
    CHECK(run({"bogus"}).code == 1);
    CHECK(run({}).code == 1);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("combo, evolve and samples") {
    const Result c = run({"combo", "-p", sine, "--coeffs", "1@1,1@3", "--family", "sturm", "-k", "2", "--format", "json"});
    REQUIRE(c.code == 0);
    const nlohmann::json j = nlohmann::json::parse(c.out);
    CHECK(j.at("relation_residual").get<double>() <= 1e-6);
    CHECK(j.at("evaluations").size() == 11);

    const Result cert = run({"combo", "-p", sine, "--coeffs", "1@2,1@3", "--family", "liouville", "--certificate",
                             "--format", "json"});
    REQUIRE(cert.code == 0);
    CHECK(nlohmann::json::parse(cert.out).at("certificate").at("verified") == true);

    const Result e = run({"evolve", "-p", sine, "--coeffs", "1@1,1@3", "--t", "0:1:0.25"});
    CHECK(e.code == 0);
    CHECK(e.out.find("non_increasing 1") != std::string::npos);

    const auto path = std::filesystem::temp_directory_path() / "sturm_osc_samples.csv";
    CHECK(run({"zeros", "-p", sine, "--coeffs", "1@2", "--emit-samples", path.string()}).code == 0);
    std::ifstream in(path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 1026);
    std::filesystem::remove(path);
}

TEST_CASE("argument parsers") {
    const auto c = cli::parse_coeffs("1@1,-0.5@3,2e-1@4");
    REQUIRE(c.size() == 3);
    CHECK(c[1] == std::pair<int, double>{3, -0.5});
    CHECK(c[2].second == 0.2);
    CHECK_THROWS_AS(cli::parse_coeffs("1@"), PreconditionError);
    CHECK_THROWS_AS(cli::parse_coeffs("x@1"), PreconditionError);
    CHECK_THROWS_AS(cli::parse_coeffs(""), PreconditionError);

    const auto t = cli::parse_time_grid("0:5:0.1");
    CHECK(t.size() == 51);
    CHECK(t.back() == doctest::Approx(5.0));
    CHECK(cli::parse_time_grid("0:0:1").size() == 1);
    CHECK_THROWS_AS(cli::parse_time_grid("0:5"), PreconditionError);
    CHECK_THROWS_AS(cli::parse_time_grid("1:0:0.1"), PreconditionError);
}
