// Command-line front end: covariance export, entropy sweeps, separating-set
// experiments, and the restricted-market counterexample. All randomized
// commands are counter-based and seeded, so reruns are byte-identical.

#include "CLI11.hpp"
#include "json.hpp"

#include "mfbs/errors.hpp"
#include "mfbs/fbm.hpp"
#include "mfbs/format.hpp"
#include "mfbs/market.hpp"
#include "mfbs/restricted.hpp"
#include "mfbs/separation.hpp"

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

namespace {

using nlohmann::ordered_json;

double parse_number(const std::string& token, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw mfbs::InvalidGrid(std::string("cannot parse ") + what + " '" + token + "'");
    }
}

// Either an explicit comma list ("1,2,4") or "lo:hi:geometric", which doubles
// lo until it passes hi.
std::vector<double> parse_alpha_grid(const std::string& text) {
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            const std::size_t pos = text.find(':', start);
            parts.push_back(text.substr(start, pos == std::string::npos ? std::string::npos
                                                                        : pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        if (parts.size() != 3 || parts[2] != "geometric")
            throw mfbs::InvalidGrid("range grids must look like lo:hi:geometric, got '" + text +
                                    "'");
        const double lo = parse_number(parts[0], "alpha");
        const double hi = parse_number(parts[1], "alpha");
        if (!(lo > 0.0 && hi >= lo)) throw mfbs::InvalidGrid("range grid needs 0 < lo <= hi");
        std::vector<double> grid;
        for (double x = lo; x <= hi * (1.0 + 1e-12); x *= 2.0) grid.push_back(x);
        return grid;
    }

    std::vector<double> grid;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t pos = text.find(',', start);
        const std::string token =
            text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
        if (token.empty()) throw mfbs::InvalidGrid("empty alpha entry in '" + text + "'");
        grid.push_back(parse_number(token, "alpha"));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return grid;
}

double parse_threshold(const std::string& text) {
    if (text == "auto") return 0.0;
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw mfbs::DomainError("threshold must be a number or 'auto', got '" + text + "'");
    }
}

void write_output(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    if (path == "-") {
        writer(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mfbs::DomainError("cannot open output file '" + path + "'");
    writer(out);
}

struct CovarianceOpts {
    double hurst = 0.8;
    std::size_t n = 8;
    std::string out = "covariance.csv";
};

int run_covariance(const CovarianceOpts& opt) {
    const mfbs::FbmCovariance cov = mfbs::fbm_increment_covariance(opt.hurst, opt.n);
    const std::vector<double> eigs = mfbs::symmetric_eigenvalues(cov.matrix);
    write_output(opt.out, [&](std::ostream& os) {
        os << "# command=covariance\n";
        os << "# hurst=" << mfbs::csv_double(opt.hurst) << '\n';
        os << "# n=" << opt.n << '\n';
        os << "# stats trace=" << mfbs::csv_double(cov.matrix.trace())
           << " sum=" << mfbs::csv_double(cov.matrix.total_sum())
           << " lambda_min=" << mfbs::csv_double(eigs.front())
           << " lambda_max=" << mfbs::csv_double(eigs.back()) << '\n';
        mfbs::write_matrix_csv(os, cov.matrix);
    });
    return 0;
}

struct SweepOpts {
    double hurst = 0.8;
    double mu = 0.0;
    double sigma = 1.0;
    std::size_t n = 8;
    std::string alphas = "1:32:geometric";
    std::string out = "entropy_sweep.csv";
};

int run_sweep(const SweepOpts& opt) {
    const std::vector<double> grid = parse_alpha_grid(opt.alphas);
    const mfbs::SweepParams family{opt.hurst, opt.mu, opt.sigma};
    const std::vector<mfbs::EntropyRow> rows = mfbs::entropy_sweep(family, opt.n, grid);
    const std::vector<std::pair<std::string, std::string>> config = {
        {"command", "entropy-sweep"},
        {"hurst", mfbs::csv_double(opt.hurst)},
        {"mu", mfbs::csv_double(opt.mu)},
        {"sigma", mfbs::csv_double(opt.sigma)},
        {"n", std::to_string(opt.n)},
        {"alphas", opt.alphas},
    };
    write_output(opt.out, [&](std::ostream& os) { mfbs::write_sweep_csv(os, family, rows, config); });
    return 0;
}

struct SeparateOpts {
    double hurst = 0.8;
    double mu = 0.0;
    double sigma = 1.0;
    std::size_t n = 16;
    std::string alphas = "1:32:geometric";
    std::size_t samples = 10000;
    std::string threshold = "auto";
    std::uint64_t seed = 42;
    std::string format = "json";
    std::string out;
};

int run_separate(const SeparateOpts& opt) {
    const std::vector<double> grid = parse_alpha_grid(opt.alphas);
    const double threshold = parse_threshold(opt.threshold);
    const mfbs::SweepParams family{opt.hurst, opt.mu, opt.sigma};
    const mfbs::SeparationReport report =
        mfbs::saa_experiment(family, opt.n, grid, opt.samples, mfbs::ThresholdPolicy::Fixed,
                             threshold, mfbs::SeededStream{opt.seed, 0});

    const std::string path =
        opt.out.empty() ? (opt.format == "csv" ? "separation.csv" : "separation.json") : opt.out;

    if (opt.format == "csv") {
        const std::vector<std::pair<std::string, std::string>> config = {
            {"command", "separate"},
            {"hurst", mfbs::csv_double(opt.hurst)},
            {"mu", mfbs::csv_double(opt.mu)},
            {"sigma", mfbs::csv_double(opt.sigma)},
            {"n", std::to_string(opt.n)},
            {"alphas", opt.alphas},
            {"samples", std::to_string(opt.samples)},
            {"threshold", mfbs::csv_double(threshold)},
            {"seed", std::to_string(opt.seed)},
        };
        write_output(path, [&](std::ostream& os) { mfbs::write_separation_csv(os, report, config); });
    } else {
        ordered_json config{
            {"command", "separate"}, {"hurst", opt.hurst},   {"mu", opt.mu},
            {"sigma", opt.sigma},    {"n", opt.n},           {"alphas", grid},
            {"samples", opt.samples}, {"threshold", threshold}, {"seed", opt.seed},
        };
        write_output(path, [&](std::ostream& os) { mfbs::write_separation_json(os, report, config); });
    }
    return 0;
}

struct RestrictedOpts {
    double sigma = 1.0;
    double delta = 0.1;
    std::string alphas = "10,30,100";
    std::size_t samples = 1000000;
    std::uint64_t seed = 42;
    std::string format = "json";
    std::string out;
};

int run_restricted(const RestrictedOpts& opt) {
    const std::vector<double> grid = parse_alpha_grid(opt.alphas);
    const mfbs::RestrictedReport report = mfbs::restricted_market_report(
        opt.sigma, grid, opt.delta, opt.samples, mfbs::SeededStream{opt.seed, 0});

    const std::string path =
        opt.out.empty() ? (opt.format == "csv" ? "restricted.csv" : "restricted.json") : opt.out;

    if (opt.format == "csv") {
        const std::vector<std::pair<std::string, std::string>> config = {
            {"command", "restricted"},
            {"sigma", mfbs::csv_double(opt.sigma)},
            {"delta", mfbs::csv_double(opt.delta)},
            {"alphas", opt.alphas},
            {"samples", std::to_string(opt.samples)},
            {"seed", std::to_string(opt.seed)},
        };
        write_output(path, [&](std::ostream& os) { mfbs::write_restricted_csv(os, report, config); });
    } else {
        ordered_json config{
            {"command", "restricted"}, {"sigma", opt.sigma},     {"delta", opt.delta},
            {"alphas", grid},          {"samples", opt.samples}, {"seed", opt.seed},
        };
        write_output(path, [&](std::ostream& os) { mfbs::write_restricted_json(os, report, config); });
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixed fractional Black-Scholes market diagnostics"};
    app.require_subcommand(1);

    CovarianceOpts cov_opts;
    auto* cov_cmd = app.add_subcommand("covariance", "fBm increment covariance matrix as CSV");
    cov_cmd->add_option("--hurst", cov_opts.hurst, "Hurst index in (0,1)")->capture_default_str();
    cov_cmd->add_option("--n", cov_opts.n, "grid size")->capture_default_str();
    cov_cmd->add_option("--out", cov_opts.out, "output path, - for stdout")->capture_default_str();

    SweepOpts sweep_opts;
    auto* sweep_cmd = app.add_subcommand("entropy-sweep", "relative entropy along an alpha grid");
    sweep_cmd->add_option("--hurst", sweep_opts.hurst, "Hurst index in (0.75,1)")->capture_default_str();
    sweep_cmd->add_option("--mu", sweep_opts.mu, "trend")->capture_default_str();
    sweep_cmd->add_option("--sigma", sweep_opts.sigma, "volatility")->capture_default_str();
    sweep_cmd->add_option("--n", sweep_opts.n, "grid size")->capture_default_str();
    sweep_cmd->add_option("--alphas", sweep_opts.alphas, "comma list or lo:hi:geometric")
        ->capture_default_str();
    sweep_cmd->add_option("--out", sweep_opts.out, "output path, - for stdout")->capture_default_str();

    SeparateOpts sep_opts;
    auto* sep_cmd = app.add_subcommand("separate", "separating-set experiment with trend read-out");
    sep_cmd->add_option("--hurst", sep_opts.hurst, "Hurst index in (0.75,1)")->capture_default_str();
    sep_cmd->add_option("--mu", sep_opts.mu, "trend")->capture_default_str();
    sep_cmd->add_option("--sigma", sep_opts.sigma, "volatility")->capture_default_str();
    sep_cmd->add_option("--n", sep_opts.n, "grid size")->capture_default_str();
    sep_cmd->add_option("--alphas", sep_opts.alphas, "comma list or lo:hi:geometric")
        ->capture_default_str();
    sep_cmd->add_option("--samples", sep_opts.samples, "Monte Carlo samples per measure")
        ->capture_default_str();
    sep_cmd->add_option("--threshold", sep_opts.threshold, "log LR cutoff, or 'auto' for 0")
        ->capture_default_str();
    sep_cmd->add_option("--seed", sep_opts.seed, "RNG seed")
        ->envname("MFBM_SEED")
        ->capture_default_str();
    sep_cmd->add_option("--format", sep_opts.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sep_cmd->add_option("--out", sep_opts.out, "output path, - for stdout");

    RestrictedOpts res_opts;
    auto* res_cmd = app.add_subcommand("restricted", "restricted-market counterexample checks");
    res_cmd->add_option("--sigma", res_opts.sigma, "volatility")->capture_default_str();
    res_cmd->add_option("--delta", res_opts.delta, "tail width in (0,1)")->capture_default_str();
    res_cmd->add_option("--alphas", res_opts.alphas, "comma list or lo:hi:geometric")
        ->capture_default_str();
    res_cmd->add_option("--samples", res_opts.samples, "Monte Carlo samples per level")
        ->capture_default_str();
    res_cmd->add_option("--seed", res_opts.seed, "RNG seed")
        ->envname("MFBM_SEED")
        ->capture_default_str();
    res_cmd->add_option("--format", res_opts.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    res_cmd->add_option("--out", res_opts.out, "output path, - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cov_cmd->parsed()) return run_covariance(cov_opts);
        if (sweep_cmd->parsed()) return run_sweep(sweep_opts);
        if (sep_cmd->parsed()) return run_separate(sep_opts);
        if (res_cmd->parsed()) return run_restricted(res_opts);
    } catch (const mfbs::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const mfbs::NumericError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
    return 0;
}
