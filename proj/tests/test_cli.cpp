#include "catch_amalgamated.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "vdw/cli/commands.hpp"

using namespace vdw;
using namespace vdw::cli;
namespace fs = std::filesystem;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const fs::path config_dir = VDW_CONFIG_DIR;

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("vdwpot_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json load(const std::string& name)
{
    return read_json_file((config_dir / name).string());
}

fs::path write_config(const fs::path& dir, const json& doc)
{
    const fs::path p = dir / "config.json";
    std::ofstream(p) << doc.dump(2);
    return p;
}

int run_tool(const std::string& args)
{
    const std::string cmd = std::string(VDWPOT_EXE) + " " + args + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

using Row = std::map<std::string, std::string>;

std::vector<Row> read_csv(const fs::path& p)
{
    std::ifstream in(p);
    REQUIRE(in);
    std::string line;
    std::getline(in, line);
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        return out;
    };
    const auto header = split(line);
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        const auto cells = split(line);
        Row r;
        for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) r[header[i]] = cells[i];
        rows.push_back(std::move(r));
    }
    return rows;
}

double num(const Row& r, const std::string& key)
{
    return std::stod(r.at(key));
}

json minimal()
{
    return json::parse(R"({
        "atom": {"transitions": [{"frequency": 1.0, "dipole_sq": 1.0}]},
        "materials": {"m": {"electric": [{"plasma": 0.75, "transverse": 1.03, "damping": 0.001}]}},
        "geometry": {"type": "halfspace", "material": "m"},
        "scan": {"z": [0.5, 1.0]}
    })");
}

} // namespace

TEST_CASE("config parsing: defaults and units")
{
    auto doc = minimal();
    doc["command"] = "scan";
    const auto c = parse_config(doc);
    REQUIRE(c.series.size() == 1);
    CHECK(c.series[0].label == "halfspace");
    CHECK(c.reference_frequency == 1.0);
    CHECK(c.quadrature.rel_tol == QuadratureSpec{}.rel_tol);
    CHECK(c.output.format == "csv");

    // frequencies are measured against the reference frequency
    doc["units"] = {{"reference_frequency", 2.0}};
    const auto c2 = parse_config(doc);
    CHECK(c2.atom.transitions()[0].frequency == 0.5);
    CHECK_THAT(c2.series[0].material.electric_resonances()[0].transverse_frequency, WithinRel(0.515, 1e-15));

    // default grids
    doc.erase("scan");
    const auto c3 = parse_config(doc);
    REQUIRE(c3.scan.z.size() == 200);
    CHECK_THAT(c3.scan.z.front(), WithinRel(1e-3, 1e-12));
    CHECK_THAT(c3.scan.z.back(), WithinRel(1e2, 1e-12));
}

TEST_CASE("config parsing: errors")
{
    auto bad = [](auto mutate) {
        auto doc = minimal();
        mutate(doc);
        return doc;
    };
    CHECK_THROWS_AS(parse_config(bad([](json& d) { d["typo"] = 1; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](json& d) { d["geometry"]["material"] = "missing"; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](json& d) { d["materials"]["m"]["electric"][0]["plasma"] = -1.0; })),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](json& d) { d["materials"]["vacuum"] = json::object(); })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](json& d) { d.erase("atom"); })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](json& d) { d["scan"]["z"] = {-1.0}; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](json& d) {
                        d["geometry"] = {{"type", "two-plates"}, {"material", "m"}, {"separation", 1.0}};
                        d["scan"]["z"] = {0.5, 1.5};
                    })),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](json& d) { d["quadrature"] = {{"mode", "polar"}}; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](json& d) { d["output"] = {{"format", "xml"}}; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](json& d) { d["geometry"]["extra"] = 1; })), ConfigError);
}

TEST_CASE("multilayer geometry in the config")
{
    auto doc = minimal();
    doc["geometry"] = json::parse(R"({"type": "multilayer", "atom_layer": 1,
        "layers": [{"material": "m", "thickness": "inf"}, {"material": "vacuum", "thickness": 2.0},
                   {"material": "m", "thickness": "inf"}]})");
    const auto c = parse_config(doc);
    REQUIRE(c.series[0].stack.has_value());
    CHECK(c.series[0].stack->atom_layer_thickness() == 2.0);
    doc["geometry"]["atom_layer"] = 0;
    CHECK_THROWS_AS(parse_config(doc), ConfigError); // non-vacuum atom layer
}

TEST_CASE("exit codes")
{
    const auto dir = scratch("exit");
    CHECK(run_tool("scan --config /nonexistent.json") == 2);
    auto doc = minimal();
    doc["bogus"] = true;
    CHECK(run_tool("scan --config " + write_config(dir, doc).string()) == 2);
    CHECK(run_tool("scan --config " + (config_dir / "vacuum.json").string() + " --quad-mode polar") == 2);
    CHECK(run_tool("") == 2);
    CHECK(run_tool("scan --config " + (config_dir / "vacuum.json").string() + " --out " + dir.string()) == 0);
}

TEST_CASE("vacuum scan gives zeros")
{
    const auto dir = scratch("vacuum");
    REQUIRE(run_tool("scan --config " + (config_dir / "vacuum.json").string() + " --out " + dir.string()) == 0);
    const auto rows = read_csv(dir / "vacuum.csv");
    REQUIRE(rows.size() == 5);
    for (const auto& r : rows) {
        CHECK(num(r, "U") == 0.0);
        CHECK(r.at("status") == "ok");
    }
    CHECK(fs::exists(dir / "vacuum.run.json"));
}

TEST_CASE("scan output is deterministic and reproducible from its sidecar")
{
    const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
    auto doc = load("fig2_halfspace_mu0.json");
    doc["scan"]["z"] = {{"min", 0.01}, {"max", 10.0}, {"points", 7}, {"spacing", "log"}};
    const auto cfg = write_config(a, doc);
    REQUIRE(run_tool("scan --config " + cfg.string() + " --out " + a.string() + " --threads 1") == 0);
    REQUIRE(run_tool("scan --config " + cfg.string() + " --out " + b.string() + " --threads 3") == 0);
    const std::string name = "fig2_mu0_5.csv";
    CHECK(slurp(a / name) == slurp(b / name));

    // re-run from the sidecar
    REQUIRE(run_tool("scan --config " + (a / "fig2.run.json").string() + " --out " + c.string()) == 0);
    for (const char* f : {"fig2_mu0_1.csv", "fig2_mu0_5.csv", "fig2_mu0_10.csv", "fig2_mu0_20.csv"})
        CHECK(slurp(a / f) == slurp(c / f));
    // the sidecars differ only in the output directory
    const json side = read_json_file((a / "fig2.run.json").string());
    json again = read_json_file((c / "fig2.run.json").string());
    CHECK(again["output"]["directory"] == c.string());
    again["output"]["directory"] = a.string();
    CHECK(again == side);

    CHECK(side["provenance"]["tool"] == "vdwpot");
    CHECK(side["provenance"]["quadrature"]["rel_tol"] == 1e-7);
    CHECK(side["command"] == "scan");
}

TEST_CASE("half-space series: wall forms and grows with the static permeability")
{
    const auto dir = scratch("fig2");
    auto doc = load("fig2_halfspace_mu0.json");
    doc["scan"]["z"] = {{"min", 0.05}, {"max", 20.0}, {"points", 40}, {"spacing", "log"}};
    REQUIRE(run_tool("scan --config " + write_config(dir, doc).string() + " --out " + dir.string()) == 0);
    double prev = 0.0;
    for (const char* mu : {"1", "5", "10", "20"}) {
        const auto rows = read_csv(dir / ("fig2_mu0_" + std::string(mu) + ".csv"));
        double top = -1e300;
        for (const auto& r : rows) top = std::max(top, num(r, "U"));
        if (std::string(mu) == "1") {
            CHECK(top < 0.0);
        } else {
            CHECK(top > 0.0);
            CHECK(top > prev);
        }
        prev = std::max(top, 0.0);
    }
}

TEST_CASE("strongly reflecting plates: full potential below the sum of single plates near the midpoint")
{
    const auto dir = scratch("fig8");
    auto doc = load("fig8_two_plates_strong.json");
    doc["scan"]["z"] = {2.5, 3.0, 3.5};
    REQUIRE(run_tool("scan --config " + write_config(dir, doc).string() + " --out " + dir.string()) == 0);
    for (const auto& r : read_csv(dir / "fig8.csv")) CHECK(num(r, "U") < num(r, "U_single_sum"));
}

TEST_CASE("coeffs command")
{
    const auto dir = scratch("coeffs");
    REQUIRE(run_tool("coeffs --config " + (config_dir / "coeffs.json").string() + " --out " + dir.string()) == 0);
    std::map<std::string, Row> by;
    for (const auto& r : read_csv(dir / "coeffs.csv")) by[r.at("series") + "/" + r.at("coefficient")] = r;
    CHECK(num(by.at("md/C4"), "value") > 0.0);
    CHECK(num(by.at("vacuum/C4"), "value") == 0.0);
    CHECK(num(by.at("vacuum/C3"), "value") == 0.0);
    CHECK(num(by.at("vacuum/C1"), "value") == 0.0);
    const double a0 = 2.0 / 3.0;
    CHECK_THAT(num(by.at("mirror/C4"), "value"), WithinRel(-3.0 * a0 / (32.0 * std::numbers::pi * std::numbers::pi), 1e-12));
    CHECK(by.at("md/C4_weak").at("regime") == "weak-limit");
    CHECK(num(by.at("magnetic/C3"), "value") == 0.0);
    CHECK(num(by.at("md-thin/D5"), "value") > 0.0);
}

TEST_CASE("border command")
{
    const auto dir = scratch("border");
    auto doc = load("fig5_border.json");
    doc["border"]["eps0"] = {1.0, 100.0};
    REQUIRE(run_tool("border --config " + write_config(dir, doc).string() + " --out " + dir.string()) == 0);
    const auto rows = read_csv(dir / "fig5.csv");
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
        if (r.at("plate") == "thin" && num(r, "eps0") == 1.0) CHECK_THAT(num(r, "mu0"), WithinAbs(1.0, 1e-12));
        if (r.at("plate") == "thick" && num(r, "eps0") == 100.0)
            CHECK_THAT(num(r, "mu0_over_eps0"), WithinAbs(5.11, 0.02));
    }
}

TEST_CASE("wall command reports no wall for a purely electric material")
{
    const auto dir = scratch("wall");
    auto doc = load("wall.json");
    doc["geometry"] = {{"type", "halfspace"}, {"label", "dielectric"}, {"material", "dielectric"}};
    doc["wall"]["points"] = 21;
    REQUIRE(run_tool("wall --config " + write_config(dir, doc).string() + " --out " + dir.string()) == 0);
    const auto rows = read_csv(dir / "wall.csv");
    REQUIRE_FALSE(rows.empty());
    for (const auto& r : rows) CHECK(r.at("exists") == "false");
    bool numeric = false;
    for (const auto& r : rows)
        if (r.at("method") == "numeric") {
            numeric = true;
            CHECK(r.at("note").find("no wall") != std::string::npos);
        }
    CHECK(numeric);
}

TEST_CASE("check command writes a JSON report")
{
    const auto dir = scratch("check");
    auto doc = load("check_additivity.json");
    doc["check"]["z"] = {1.0};
    REQUIRE(run_tool("check --config " + write_config(dir, doc).string() + " --out " + dir.string() +
                     " --format json") == 0);
    const json r = read_json_file((dir / "check.result.json").string());
    REQUIRE(r["tables"].size() == 1);
    const auto& rows = r["tables"][0]["rows"];
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["residual"].get<double>() < 0.01);
    CHECK(rows[1]["residual"].get<double>() < 0.02);
    CHECK(rows[0]["status"] == "ok");
}

TEST_CASE("command-line overrides reach the effective settings")
{
    const auto dir = scratch("override");
    REQUIRE(run_tool("scan --config " + (config_dir / "vacuum.json").string() + " --out " + dir.string() +
                     " --rel-tol 1e-5 --quad-mode direct --format json") == 0);
    const json side = read_json_file((dir / "vacuum.run.json").string());
    CHECK(side["provenance"]["quadrature"]["rel_tol"] == 1e-5);
    CHECK(side["provenance"]["quadrature"]["mode"] == "direct");
    CHECK(fs::exists(dir / "vacuum.result.json"));
}
