#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "mfbs_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    const fs::path out_path = scratch_dir() / ("out" + std::to_string(counter) + ".txt");
    const fs::path err_path = scratch_dir() / ("err" + std::to_string(counter) + ".txt");
    ++counter;

    std::string cmd = env_prefix.empty() ? std::string() : env_prefix + " ";
    cmd += std::string(MFBS_CLI_PATH) + " " + args + " > " + out_path.string() + " 2> " +
           err_path.string();

    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (start <= line.size()) {
        const std::size_t pos = line.find(sep, start);
        cells.push_back(line.substr(start, pos == std::string::npos ? std::string::npos
                                                                    : pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return cells;
}

}  // namespace

TEST_CASE("covariance command emits the matrix with stats") {
    const RunResult r = run_cli("covariance --hurst 0.8 --n 2 --out -");
    REQUIRE(r.exit_code == 0);

    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# command=covariance");
    std::getline(in, line);  // hurst
    std::getline(in, line);  // n
    std::getline(in, line);
    REQUIRE(line.rfind("# stats trace=", 0) == 0);
    const double trace = std::stod(line.substr(std::string("# stats trace=").size()));
    CHECK(trace == doctest::Approx(0.65975395538644713).epsilon(1e-13));

    std::getline(in, line);
    const auto cells = split(line, ',');
    REQUIRE(cells.size() == 2);
    CHECK(std::stod(cells[0]) == doctest::Approx(0.32987697769322356).epsilon(1e-13));
    CHECK(std::stod(cells[1]) == doctest::Approx(0.17012302230677644).epsilon(1e-13));
}

TEST_CASE("covariance at H = 1/2 is the scaled identity") {
    const RunResult r = run_cli("covariance --hurst 0.5 --n 4 --out -");
    REQUIRE(r.exit_code == 0);

    std::istringstream in(r.out);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line, ',');
        REQUIRE(cells.size() == 4);
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(std::stod(cells[j]) == doctest::Approx(row == j ? 0.25 : 0.0).epsilon(1e-14));
        ++row;
    }
    CHECK(row == 4);
}

TEST_CASE("out-of-range hurst exits with the validation code") {
    const RunResult r = run_cli("covariance --hurst 1.2 --n 4 --out -");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("DomainError") != std::string::npos);
    CHECK(r.err.find("hurst") != std::string::npos);
}

TEST_CASE("unknown flags exit with the validation code") {
    const RunResult r = run_cli("covariance --bogus 1");
    CHECK(r.exit_code == 2);
}

TEST_CASE("entropy sweep emits increasing entropies") {
    const RunResult r = run_cli("entropy-sweep --n 8 --alphas 1:32:geometric --out -");
    REQUIRE(r.exit_code == 0);

    std::istringstream in(r.out);
    std::string line;
    std::vector<double> entropies;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            CHECK(line ==
                  "alpha,n,H,mu,sigma,entropy_nats,lower_bound_nats,entropy_wiener_nats,"
                  "theta_n,lambda_max,loglr_variance");
            saw_header = true;
            continue;
        }
        const auto cells = split(line, ',');
        REQUIRE(cells.size() == 11);
        entropies.push_back(std::stod(cells[5]));
        CHECK(std::stod(cells[5]) >= std::stod(cells[6]));  // entropy >= lower bound
    }
    REQUIRE(entropies.size() == 6);
    for (std::size_t i = 1; i < entropies.size(); ++i) CHECK(entropies[i] > entropies[i - 1]);
}

TEST_CASE("single-point grid with drift is rejected") {
    const RunResult r = run_cli("entropy-sweep --n 1 --mu 0.5 --out -");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("DomainError") != std::string::npos);
}

TEST_CASE("separate writes a reproducible json report") {
    const fs::path first = scratch_dir() / "sep_a.json";
    const fs::path second = scratch_dir() / "sep_b.json";

    const std::string base =
        "separate --n 4 --alphas 1,4,32 --samples 500 --seed 11 --out ";
    REQUIRE(run_cli(base + first.string()).exit_code == 0);
    REQUIRE(run_cli(base + second.string()).exit_code == 0);
    CHECK(slurp(first) == slurp(second));

    const auto doc = nlohmann::ordered_json::parse(slurp(first));
    CHECK(doc["config"]["seed"] == 11);
    CHECK(doc["config"]["command"] == "separate");
    REQUIRE(doc["rows"].size() == 3);
    CHECK(doc["rows"][2]["alpha"] == 32.0);
    CHECK(doc["rows"][0]["samples"] == 500);
    CHECK(doc.contains("verdict"));
    CHECK(doc.contains("saa_conclusion"));
    CHECK(doc["evidence"].size() == 3);
}

TEST_CASE("separate respects the seed environment variable") {
    const fs::path by_env = scratch_dir() / "sep_env.json";
    const fs::path by_flag = scratch_dir() / "sep_flag.json";
    const fs::path flag_wins = scratch_dir() / "sep_flagwins.json";

    const std::string args = "separate --n 4 --alphas 1,4,32 --samples 500 --out ";
    REQUIRE(run_cli(args + by_env.string(), "MFBM_SEED=99").exit_code == 0);
    REQUIRE(run_cli(args + by_flag.string() + " --seed 99").exit_code == 0);
    CHECK(slurp(by_env) == slurp(by_flag));

    // An explicit flag beats the environment.
    REQUIRE(run_cli(args + flag_wins.string() + " --seed 99", "MFBM_SEED=1").exit_code == 0);
    CHECK(slurp(flag_wins) == slurp(by_flag));

    // And a different seed changes the report.
    const fs::path other = scratch_dir() / "sep_other.json";
    REQUIRE(run_cli(args + other.string() + " --seed 100").exit_code == 0);
    CHECK(slurp(other) != slurp(by_flag));
}

TEST_CASE("separate csv format") {
    const RunResult r = run_cli(
        "separate --n 4 --alphas 1,4,32 --samples 500 --seed 3 --format csv --out -");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("alpha,threshold,p_mixed,p_mixed_se,p_drift,p_drift_se,samples") !=
          std::string::npos);
    CHECK(r.out.find("# verdict=") != std::string::npos);
}

TEST_CASE("separate validation failures exit with code 2") {
    CHECK(run_cli("separate --n 4 --alphas 1,32 --samples 500 --out -").exit_code == 2);
    CHECK(run_cli("separate --n 4 --alphas 1,4,32 --samples 500 --threshold bogus --out -")
              .exit_code == 2);
    CHECK(run_cli("separate --n 4 --alphas 4,2,1 --samples 500 --out -").exit_code == 2);
}

TEST_CASE("restricted command") {
    const RunResult r = run_cli(
        "restricted --alphas 10,30 --samples 10000 --seed 5 --format csv --out -");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("# tilt_mass=") != std::string::npos);

    std::istringstream in(r.out);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("alpha,", 0) == 0) continue;
        const auto cells = split(line, ',');
        REQUIRE(cells.size() == 7);
        CHECK(std::stod(cells[3]) >= 0.3);  // up_prob
        CHECK(std::stod(cells[5]) >= 0.3);  // down_prob
        ++rows;
    }
    CHECK(rows == 2);

    CHECK(run_cli("restricted --delta 1.5 --out -").exit_code == 2);
    CHECK(run_cli("restricted --alphas 30,10 --samples 10000 --out -").exit_code == 2);
}
