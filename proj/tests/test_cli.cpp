#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

const std::string cli = SPHQ_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// data rows (skipping '#' comments and the header)
std::vector<std::vector<double>> parse_csv(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

TEST_CASE("cli optimize reproduces the d=3 closed form", "[cli]") {
    const std::string out = "/tmp/sphq_cli_opt.csv";
    REQUIRE(run("optimize --d 3 --n 9 --s 2 --target sphere --family sphere --out " + out) == 0);
    const auto rows = parse_csv(out);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].size() == 5);
    CHECK(rows[0][0] == 3.0);
    CHECK(rows[0][1] == 9.0);
    CHECK(rows[0][2] == 2.0);
    CHECK(rows[0][3] == Catch::Approx(0.8).margin(1e-4));
    CHECK(rows[0][4] == Catch::Approx(0.36).margin(1e-8));
    // sidecar carries the resolved configuration
    const std::string side = slurp(out + ".json");
    CHECK(side.find("\"recipe\": \"optimize\"") != std::string::npos);
    CHECK(side.find("library_version") != std::string::npos);
    CHECK(side.find("wall_time_seconds") != std::string::npos);
}

TEST_CASE("cli evt row contains the corollary values", "[cli]") {
    const std::string out = "/tmp/sphq_cli_evt.csv";
    REQUIRE(run("evt --d 3 --n 100 --s 2 --target sphere --out " + out) == 0);
    const auto rows = parse_csv(out);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0][3] == Catch::Approx(0.01).margin(1e-12));  // kappa
    CHECK(rows[0][6] == Catch::Approx(0.98).margin(1e-10));  // a_hat_star
    CHECK(rows[0][7] == Catch::Approx(0.0396).margin(1e-10)); // e_hat
}

TEST_CASE("cli reruns are byte identical", "[cli]") {
    const std::string a = "/tmp/sphq_cli_rep_a.csv", b = "/tmp/sphq_cli_rep_b.csv";
    const std::string spec =
        "mc --d 4 --n 16,32 --s 2 --target ball --family ball --param 0.9 --N 4000 --seed 99";
    REQUIRE(run(spec + " --out " + a) == 0);
    REQUIRE(run(spec + " --out " + b) == 0);
    CHECK(slurp(a) == slurp(b));
    // every emitted cell is finite (parse_csv would throw otherwise)
    const auto rows = parse_csv(a);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows)
        for (double cell : row) CHECK(std::isfinite(cell));
}

TEST_CASE("cli grid syntax and recipes", "[cli]") {
    const std::string out = "/tmp/sphq_cli_grid.csv";
    REQUIRE(run("bounds --d 5:9:2 --n 100,1000 --out " + out) == 0);
    const auto rows = parse_csv(out);
    REQUIRE(rows.size() == 6); // d in {5,7,9} x n in {100,1000}
    for (const auto& row : rows) {
        CHECK(row[3] <= row[2]); // lo <= kappa
        CHECK(row[2] <= row[4]); // kappa <= hi
    }
    REQUIRE(run("factorial --d 3,4 --out /tmp/sphq_cli_fact.csv") == 0);
    const auto fact = parse_csv("/tmp/sphq_cli_fact.csv");
    REQUIRE(fact.size() == 2);
    CHECK(fact[0][1] == Catch::Approx(0.5).margin(1e-12));
    CHECK(fact[1][5] == Catch::Approx(0.25).margin(1e-12));
    REQUIRE(run("figure --name kappa --d 5,6 --n 100 --out /tmp/sphq_cli_fig.csv") == 0);
}

TEST_CASE("cli error paths", "[cli]") {
    CHECK(run("optimize --d 3 --n 9 --s 2") == 2);                  // missing --out
    CHECK(run("optimize --d 1 --n 9 --s 2 --out /tmp/x.csv") == 2); // bad dimension
    CHECK(run("optimize --d 3 --n 9 --s 2 --target torus --out /tmp/x.csv") == 2);
    CHECK(run("figure --name no-such-figure --out /tmp/x.csv") == 2);
    CHECK(run("nonsense --out /tmp/x.csv") == 2);
}
