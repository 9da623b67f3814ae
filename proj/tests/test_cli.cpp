#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "volput/cli.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = volput::cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

// Numeric CSV body (all columns parse as doubles); returns rows, header out-param.
std::vector<std::vector<double>> csv_rows(const std::string& text, std::string& header) {
    auto lines = lines_of(text);
    REQUIRE(!lines.empty());
    header = lines.front();
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::vector<double> row;
        std::istringstream in(lines[i]);
        std::string cell;
        while (std::getline(in, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

struct TempFile {
    std::string path;
    explicit TempFile(std::string p, const std::string& content = "") : path(std::move(p)) {
        if (!content.empty()) {
            std::ofstream f(path);
            f << content;
        }
    }
    ~TempFile() { std::remove(path.c_str()); }
};

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-30, std::abs(want));
}

}  // namespace

TEST_CASE("usage errors exit 2 with help on stderr") {
    CHECK(run({}).code == 2);
    CHECK(run({"nonsense"}).code == 2);

    RunResult bad_flag = run({"price", "--bogus", "1", "--x", "0.3"});
    CHECK(bad_flag.code == 2);
    CHECK(bad_flag.err.find("error:") != std::string::npos);
    CHECK(bad_flag.err.find("Usage") != std::string::npos);

    CHECK(run({"price", "--instrument", "swaption", "--x", "0.3"}).code == 2);
    CHECK(run({"figure"}).code == 2);  // --preset is required
    CHECK(run({"figure", "--preset", "fig9"}).code == 2);

    RunResult no_x = run({"price"});
    CHECK(no_x.code == 2);
    CHECK(no_x.err.find("at least one --x") != std::string::npos);
}

TEST_CASE("parameter and config errors exit 2") {
    RunResult neg = run({"price", "--alpha", "-0.1", "--x", "0.3"});
    CHECK(neg.code == 2);
    CHECK(neg.err.find("parameter error") != std::string::npos);

    CHECK(run({"price", "--k", "0", "--x", "0.3"}).code == 2);
    CHECK(run({"curve", "--grid-n", "1"}).code == 2);

    RunResult missing = run({"price", "--config", "no_such_file.json", "--x", "0.3"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("config file not readable") != std::string::npos);

    TempFile bad("cli_test_bad_cfg.json", "{not json");
    RunResult malformed = run({"price", "--config", bad.path, "--x", "0.3"});
    CHECK(malformed.code == 2);
    CHECK(malformed.err.find("not valid JSON") != std::string::npos);
}

TEST_CASE("solver failures exit 3") {
    // beta = k^2/2 makes the basis degenerate, so the boundary search finds
    // no admissible root and the solve reports failure rather than a value.
    RunResult r = run({"price", "--beta", "0.125", "--k", "0.5", "--x", "0.3"});
    CHECK(r.code == 3);
    CHECK(r.err.find("solver error") != std::string::npos);
    CHECK(run({"boundary", "--beta", "0.125", "--k", "0.5"}).code == 3);
}

TEST_CASE("help requests exit 0") {
    RunResult top = run({"--help"});
    CHECK(top.code == 0);
    CHECK(top.out.find("price") != std::string::npos);
    CHECK(top.out.find("verify") != std::string::npos);
    CHECK(run({"price", "--help"}).code == 0);
}

TEST_CASE("price american emits solution summary and values") {
    RunResult r = run({"price", "--instrument", "american", "--x", "0.3", "--x", "1.0"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["instrument"] == "american");
    CHECK(rel_err(j["boundary_s"].get<double>(), 0.25959980966140991) < 1e-10);
    CHECK(rel_err(j["coefficient"].get<double>(), 0.10931390984529688) < 1e-10);
    CHECK(rel_err(j["delta_star"].get<double>(), 0.15398197704031320) < 1e-10);
    REQUIRE(j["values"].size() == 2);
    CHECK(j["values"][0]["x"].get<double>() == 0.3);
    CHECK(rel_err(j["values"][0]["value"].get<double>(), 0.20912821294353779) < 1e-12);
    CHECK(rel_err(j["values"][1]["value"].get<double>(), 0.12778452905549176) < 1e-12);
    CHECK(j["params"]["alpha"].get<double>() == 0.1);
    CHECK(j["advisories"].empty());
}

TEST_CASE("price knockout reports diagnostics and pays the rebate at the barrier") {
    RunResult r = run({"price", "--instrument", "knockout", "--x", "0.5"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(rel_err(j["boundary_s"].get<double>(), 0.29004711025262648) < 1e-10);
    CHECK(rel_err(j["c1"].get<double>(), 0.059195546800620312) < 1e-10);
    CHECK(rel_err(j["c2"].get<double>(), -0.043237656117565536) < 1e-10);
    CHECK(rel_err(j["a"].get<double>(), -0.31633088671768776) < 1e-10);
    CHECK(rel_err(j["d1"].get<double>(), 0.85207972893961479) < 1e-10);
    CHECK(j["theorem4"] == true);
    CHECK(j["theorem5"] == true);
    // Value matching at the barrier: v(K) equals the rebate.
    CHECK(std::abs(j["values"][0]["value"].get<double>() - 0.1) < 1e-12);
}

TEST_CASE("price callable dispatches by regime") {
    RunResult ko = run({"price", "--x", "0.35"});  // defaults: callable, delta 0.1
    REQUIRE(ko.code == 0);
    json jko = json::parse(ko.out);
    CHECK(jko["regime"] == "KnockoutEquivalent");
    CHECK(rel_err(jko["delta_star"].get<double>(), 0.15398197704031320) < 1e-10);
    CHECK(rel_err(jko["a"].get<double>(), -0.31633088671768776) < 1e-10);
    CHECK(jko["warnings"].empty());
    CHECK(rel_err(jko["values"][0]["value"].get<double>(), 0.16356607480208690) < 1e-12);

    RunResult am = run({"price", "--delta", "0.2", "--x", "0.35"});
    REQUIRE(am.code == 0);
    json jam = json::parse(am.out);
    CHECK(jam["regime"] == "AmericanEquivalent");
    CHECK(rel_err(jam["boundary_s"].get<double>(), 0.25959980966140991) < 1e-10);
}

TEST_CASE("advisories go to stderr and into the report") {
    RunResult r = run({"price", "--alpha", "0.001", "--beta", "0.2", "--delta", "0.01",
                       "--x", "0.3"});
    REQUIRE(r.code == 0);
    CHECK(r.err.find("advisory [alpha_le_r]") != std::string::npos);
    CHECK(r.err.find("advisory [beta_ge_half_k2]") != std::string::npos);
    json j = json::parse(r.out);
    REQUIRE(j["advisories"].size() == 2);
    CHECK(j["advisories"][0]["code"] == "alpha_le_r");
    CHECK(j["advisories"][1]["code"] == "beta_ge_half_k2");
}

TEST_CASE("output is deterministic and JSON is stably formatted") {
    const std::vector<std::string> args{"price", "--instrument", "knockout", "--x", "0.35"};
    RunResult a = run(args);
    RunResult b = run(args);
    CHECK(a.out == b.out);
    // dump(2) with sorted keys round-trips through a parse.
    json j = json::parse(a.out);
    CHECK(j.dump(2) + "\n" == a.out);
}

TEST_CASE("csv output round-trips doubles exactly") {
    RunResult jr = run({"price", "--x", "0.35"});
    RunResult cr = run({"price", "--x", "0.35", "--format", "csv"});
    REQUIRE(jr.code == 0);
    REQUIRE(cr.code == 0);
    std::string header;
    auto rows = csv_rows(cr.out, header);
    CHECK(header == "x,value");
    REQUIRE(rows.size() == 1);
    const double from_json = json::parse(jr.out)["values"][0]["value"].get<double>();
    CHECK(rows[0][1] == from_json);  // 17 significant digits reproduce the bits

    RunResult br = run({"boundary", "--instrument", "american", "--format", "csv"});
    REQUIRE(br.code == 0);
    auto blines = lines_of(br.out);
    REQUIRE(blines.size() == 2);
    CHECK(blines[0] == "instrument,boundary_s");
    CHECK(blines[1].rfind("american,", 0) == 0);
    CHECK(std::stod(blines[1].substr(9)) == doctest::Approx(0.25959980966140991).epsilon(1e-10));
}

TEST_CASE("boundary callable reports regime alongside the level") {
    RunResult r = run({"boundary"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["regime"] == "KnockoutEquivalent");
    CHECK(rel_err(j["boundary_s"].get<double>(), 0.29004711025262648) < 1e-10);
    CHECK(rel_err(j["delta_star"].get<double>(), 0.15398197704031320) < 1e-10);
}

TEST_CASE("curve grid is open on the left and exact on the right") {
    RunResult r = run({"curve", "--instrument", "american", "--grid-n", "10"});
    REQUIRE(r.code == 0);
    std::string header;
    auto rows = csv_rows(r.out, header);
    CHECK(header == "x,value,g1,g2");
    REQUIRE(rows.size() == 10);
    const double s = 0.25959980966140991;
    CHECK(rows.front()[0] > s / 2.0);
    CHECK(rows.back()[0] == 2.0);  // 4K with K = 0.5
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][0] > rows[i - 1][0]);
    for (const auto& row : rows) {
        CHECK(std::isfinite(row[1]));
        CHECK(row[1] >= 0.0);
        CHECK(row[2] == std::max(0.5 - row[0], 0.0));
        CHECK(row[3] == doctest::Approx(row[2] + 0.1).epsilon(1e-15));
    }

    RunResult dflt = run({"curve"});
    REQUIRE(dflt.code == 0);
    CHECK(lines_of(dflt.out).size() == 201);  // header + default 200 points
}

TEST_CASE("figure presets emit the five-column dataset") {
    for (const char* preset : {"fig1", "fig3"}) {
        RunResult r = run({"figure", "--preset", preset});
        REQUIRE(r.code == 0);
        std::string header;
        auto rows = csv_rows(r.out, header);
        CHECK(header == "x,v_callable,v_american,g1,g2");
        CHECK(rows.size() == 200);
        CHECK(rows.back()[0] == 2.0);
        for (const auto& row : rows) {
            for (double cell : row) CHECK(std::isfinite(cell));
            CHECK(row[1] >= 0.0);
            CHECK(row[2] >= 0.0);
        }
        // Both presets sit in the undetermined regime, so the callable column
        // comes from the grid game solver.
        CHECK(r.err.find("note: callable column computed by the grid game solver") !=
              std::string::npos);
    }
}

TEST_CASE("fig3 dataset shows the cancellation payoff pierced by the American value") {
    RunResult r = run({"figure", "--preset", "fig3"});
    REQUIRE(r.code == 0);
    std::string header;
    auto rows = csv_rows(r.out, header);
    double max_pierce = 0.0;
    for (const auto& row : rows) {
        max_pierce = std::max(max_pierce, row[2] - row[4]);
        CHECK(row[1] >= row[3] - 1e-9);  // callable stays above exercise payoff
        // Above the cancellation payoff only within the one interpolation cell
        // that straddles the kink of g2 at K (chord sag of the kink).
        const double slack = std::abs(row[0] - 0.5) <= 0.005 ? 2.5e-3 : 1e-9;
        CHECK(row[1] <= row[4] + slack);
    }
    CHECK(max_pierce > 0.01);
}

TEST_CASE("figure override onto the american regime collapses the two value columns") {
    RunResult r = run({"figure", "--preset", "fig1", "--alpha", "0.1", "--beta", "0.1",
                       "--delta", "0.2"});
    REQUIRE(r.code == 0);
    CHECK(r.err.find("note:") == std::string::npos);
    std::string header;
    auto rows = csv_rows(r.out, header);
    REQUIRE(rows.size() == 200);
    for (const auto& row : rows) CHECK(std::abs(row[1] - row[2]) <= 1e-9);
}

TEST_CASE("config file fills unset flags and explicit flags win") {
    TempFile cfg("cli_test_cfg.json",
                 R"({"alpha": 0.2, "beta": 0.15, "k": 0.4, "delta": 0.2, "x": 0.5})");
    RunResult r = run({"price", "--config", cfg.path, "--alpha", "0.1"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["params"]["alpha"].get<double>() == 0.1);   // flag beats config
    CHECK(j["params"]["beta"].get<double>() == 0.15);   // config beats default
    CHECK(j["params"]["k"].get<double>() == 0.4);
    CHECK(j["params"]["delta"].get<double>() == 0.2);
    REQUIRE(j["values"].size() == 1);  // probe point taken from the config
    CHECK(j["values"][0]["x"].get<double>() == 0.5);
}

TEST_CASE("config overrides a figure preset parameter") {
    TempFile cfg("cli_test_fig_cfg.json", R"({"delta": 0.3})");
    RunResult r = run({"figure", "--preset", "fig1", "--config", cfg.path,
                       "--format", "json"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["preset"] == "fig1");
    CHECK(j["params"]["alpha"].get<double>() == 0.001);  // preset survives
    CHECK(j["params"]["delta"].get<double>() == 0.3);    // config beats preset
}

TEST_CASE("--out redirects the report to a file") {
    TempFile out_file("cli_test_out.json");
    RunResult direct = run({"price", "--x", "0.35"});
    RunResult redirected = run({"price", "--x", "0.35", "--out", out_file.path});
    REQUIRE(redirected.code == 0);
    CHECK(redirected.out.empty());
    std::ifstream f(out_file.path);
    std::stringstream content;
    content << f.rdbuf();
    CHECK(content.str() == direct.out);
}

TEST_CASE("verify passes on the default parameter set") {
    RunResult r = run({"verify"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["pass"] == true);
    CHECK(j["failures"].empty());
    REQUIRE(j["checks"].size() == 7);
    const std::vector<std::string> expected{
        "american_vs_grid", "knockout_vs_grid", "callable_vs_grid", "sandwich_on_grid",
        "knockout_vs_mc",   "theorem_conditions", "dispatch_continuity"};
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(j["checks"][i]["name"] == expected[i]);
        CHECK(j["checks"][i]["pass"] == true);
    }
}

TEST_CASE("verify reports breaches with exit 1 instead of dying") {
    RunResult r = run({"verify", "--grid-n", "50", "--paths", "2000", "--dt", "0.01"});
    CHECK(r.code == 1);
    json j = json::parse(r.out);
    CHECK(j["pass"] == false);
    REQUIRE(!j["failures"].empty());
    bool found = false;
    for (const auto& f : j["failures"]) {
        if (f["name"] == "american_vs_grid") {
            found = true;
            CHECK(f["error"].get<std::string>().find("n must be >= 200") !=
                  std::string::npos);
        }
    }
    CHECK(found);
}
