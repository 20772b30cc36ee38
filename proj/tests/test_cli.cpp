#include "commands.hpp"
#include "config.hpp"
#include "units.hpp"

#include <doctest.h>
#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <random>
#include <sstream>
#include <unistd.h>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace oamsim;

namespace
{
struct Run
{
    int code;
    std::string out, err;
};

Run cli(std::initializer_list<std::string> args)
{
    std::vector<std::string> store{"oamsim"};
    store.insert(store.end(), args.begin(), args.end());
    std::vector<char *> argv;
    for (auto &s : store) {
        argv.push_back(s.data());
    }
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir
{
    fs::path path;
    TempDir()
    {
        static int counter = 0;
        path = fs::temp_directory_path() / ("oamsim-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string &leaf) const { return (path / leaf).string(); }
};
} // namespace

TEST_CASE("units: rates, times and phases")
{
    const KappaScale none;
    const KappaScale abs = 2e6; // kappa = 2 /us
    CHECK(parse_quantity("1.5 kappa", Kind::Rate, none) == 1.5);
    CHECK(parse_quantity("4 /us", Kind::Rate, abs) == doctest::Approx(2.0));
    CHECK(parse_quantity("1 MHz", Kind::Rate, abs) == doctest::Approx(std::numbers::pi));
    CHECK(parse_quantity("3 /kappa", Kind::Time, none) == 3.0);
    CHECK(parse_quantity("1 us", Kind::Time, abs) == doctest::Approx(2.0));
    CHECK(parse_quantity("0.5 pi", Kind::Phase, none) == doctest::Approx(std::numbers::pi / 2));
    CHECK(parse_quantity("90 deg", Kind::Phase, none) == doctest::Approx(std::numbers::pi / 2));
    CHECK(parse_quantity("2", Kind::Phase, none) == 2.0);
    CHECK(parse_quantity("5 mm", Kind::Length, none) == doctest::Approx(5e-3));

    CHECK_THROWS_AS(parse_quantity("3", Kind::Time, none), std::invalid_argument);
    CHECK_THROWS_AS(parse_quantity("1 MHz", Kind::Rate, none), std::invalid_argument);
    CHECK_THROWS_AS(parse_quantity("1 furlong", Kind::Length, none), std::invalid_argument);
    CHECK_THROWS_AS(parse_quantity("fast", Kind::Rate, none), std::invalid_argument);
}

TEST_CASE("units: absolute round trip through kappa")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mag(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const double kappa = std::pow(10.0, 6.0 + mag(rng));
        const double rate = std::pow(10.0, mag(rng)); // in kappa
        const double per_us = rate * kappa * 1e-6;
        const double back = parse_quantity(fmt::format("{:.17g} /us", per_us), Kind::Rate, kappa);
        CHECK(back == doctest::Approx(rate).epsilon(1e-12));
        const double ns = rate / kappa * 1e9;
        CHECK(parse_quantity(fmt::format("{:.17g} ns", ns), Kind::Time, kappa) == doctest::Approx(rate).epsilon(1e-12));
    }
}

TEST_CASE("config: unknown keys and every bad value are reported together")
{
    try {
        RawConfig::from_yaml("lattice:\n  kapa: 1 kappa\n");
        FAIL("expected rejection");
    } catch (const ValidationError &e) {
        REQUIRE(e.issues().size() >= 1);
        CHECK(e.issues()[0].key == "lattice.kapa");
    }
    CHECK_THROWS_AS(RawConfig::from_yaml("filter:\n  threads: 2\n").set("filter.nope", "1"), ValidationError);

    RawConfig r = RawConfig::from_yaml("memory:\n  t_s: 20\n  ramp: -1 /kappa\n");
    try {
        resolve(r);
        FAIL("expected rejection");
    } catch (const ValidationError &e) {
        int t_s = 0, ramp = 0;
        for (const auto &i : e.issues()) {
            t_s += i.key == "memory.t_s";
            ramp += i.key == "memory.ramp";
        }
        CHECK(t_s == 1);
        CHECK(ramp == 1);
    }
}

TEST_CASE("cli: presets run and write their artifacts")
{
    TempDir dir;
    auto r = cli({"filter", "--preset", "filter-cascade", "--out", dir / "f"});
    REQUIRE(r.code == 0);
    for (const char *leaf : {"manifest.yaml", "report.json", "response.csv", "response.svg"}) {
        CHECK(fs::exists(dir.path / "f" / leaf));
    }
    const auto report = nlohmann::json::parse(slurp(dir.path / "f" / "report.json"));
    CHECK(report["metrics"]["shape_factor"].get<double>() == doctest::Approx(0.85).epsilon(0.03));

    r = cli({"bands", "--phi", "0,0.5 pi", "--num-aux", "2", "--no-svg", "--out", dir / "b"});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir.path / "b" / "bands.csv"));
    CHECK_FALSE(fs::exists(dir.path / "b" / "bands.svg"));
}

TEST_CASE("cli: manifest reproduces the run")
{
    TempDir dir;
    REQUIRE(cli({"params", "--set", "params.reflectivity=0.4", "--out", dir / "a"}).code == 0);
    REQUIRE(cli({"params", "--config", dir / "a/manifest.yaml", "--out", dir / "b"}).code == 0);
    CHECK(slurp(dir.path / "a" / "manifest.yaml") == slurp(dir.path / "b" / "manifest.yaml"));
    CHECK(slurp(dir.path / "a" / "report.json") == slurp(dir.path / "b" / "report.json"));
    CHECK(slurp(dir.path / "a" / "params.csv") == slurp(dir.path / "b" / "params.csv"));
}

TEST_CASE("cli: sweep order does not depend on the thread count")
{
    TempDir dir;
    const std::vector<std::string> common{"sweep", "--set", "run.command=params", "--sweep",
                                          "params.reflectivity=0.1,0.2,0.3", "--sweep", "params.length=10 cm,30 cm"};
    auto run = [&](const std::string &jobs, const std::string &leaf) {
        std::vector<std::string> store{"oamsim"};
        store.insert(store.end(), common.begin(), common.end());
        for (const auto &s : {std::string("--jobs"), jobs, std::string("--out"), dir / leaf}) {
            store.push_back(s);
        }
        std::vector<char *> argv;
        for (auto &s : store) {
            argv.push_back(s.data());
        }
        std::ostringstream out, err;
        return cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    };
    REQUIRE(run("1", "one") == 0);
    REQUIRE(run("4", "four") == 0);
    const std::string a = slurp(dir.path / "one" / "sweep.csv");
    CHECK(a == slurp(dir.path / "four" / "sweep.csv"));
    std::istringstream lines(a);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) {
        rows.push_back(line);
    }
    REQUIRE(rows.size() == 7);
    // last axis varies fastest
    CHECK(rows[1].rfind("0.1,10 cm,", 0) == 0);
    CHECK(rows[2].rfind("0.1,30 cm,", 0) == 0);
    CHECK(rows[3].rfind("0.2,10 cm,", 0) == 0);
}

TEST_CASE("cli: exit codes and error records")
{
    TempDir dir;
    auto r = cli({"memory", "--preset", "echo", "--set", "lattice.kappa=banana", "--out", dir / "e"});
    CHECK(r.code == 2);
    const auto rec = nlohmann::json::parse(r.err);
    CHECK(rec["kind"] == "validation");
    CHECK(rec["issues"][0]["key"] == "lattice.kappa");
    CHECK(fs::exists(dir.path / "e" / "error.json"));

    CHECK(cli({"memory", "--preset", "no-such-preset", "--out", dir / "p"}).code == 2);
    CHECK(cli({"memory", "--preset", "echo", "--config", "x.yaml"}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);

    // lossless lattice with no loss to regularize and too few sites allowed
    r = cli({"filter", "--set", "stage1.port=2 kappa", "--set", "stage1.uniform=1e-9 kappa", "--set",
             "filter.max_sites=64", "--out", dir / "n"});
    CHECK(r.code == 3);

    r = cli({"sweep", "--set", "run.command=params", "--sweep", "params.reflectivity=0.3,1.5", "--out", dir / "s"});
    CHECK(r.code == 4);
    CHECK(slurp(dir.path / "s" / "sweep.csv").find("must lie in") != std::string::npos);
}
