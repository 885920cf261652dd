#include "mfbs/separation.hpp"

#include "mfbs/fbm.hpp"
#include "mfbs/format.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace mfbs {

namespace {

constexpr std::uint64_t kMixedDraws = 1;
constexpr std::uint64_t kDriftDraws = 2;
// Per-alpha substreams start here so they never collide with the above.
constexpr std::uint64_t kAlphaBase = 100;

double binomial_se(double p, std::size_t count) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(count));
}

}  // namespace

double separation_threshold(const ModelParams& params, std::size_t n, ThresholdPolicy policy,
                            double fixed_value) {
    if (policy == ThresholdPolicy::Fixed) return fixed_value;
    const GaussianMeasure p1 = mixed_measure(params, n);
    const GaussianMeasure p2 = drift_measure(params, n);
    // Mean log LR is +KL(p1|p2) under p1 and -KL(p2|p1) under p2.
    return 0.5 * (gaussian_kl(p1, p2) - gaussian_kl(p2, p1));
}

SeparationRow count_exceedances(const GaussianMeasure& p1, const GaussianMeasure& p2,
                                std::span<const double> draws_p1,
                                std::span<const double> draws_p2, std::size_t count,
                                double alpha, double threshold) {
    const std::size_t n = p1.dim();
    if (draws_p1.size() != count * n || draws_p2.size() != count * n)
        throw DimensionMismatch("sample blocks must be count x dim");

    std::size_t hits1 = 0, hits2 = 0;
    for (std::size_t r = 0; r < count; ++r) {
        if (log_likelihood_ratio(p1, p2, draws_p1.subspan(r * n, n)) > threshold) ++hits1;
        if (log_likelihood_ratio(p1, p2, draws_p2.subspan(r * n, n)) > threshold) ++hits2;
    }

    SeparationRow row;
    row.alpha = alpha;
    row.threshold = threshold;
    row.samples = count;
    row.p_mixed = static_cast<double>(hits1) / static_cast<double>(count);
    row.p_mixed_se = binomial_se(row.p_mixed, count);
    row.p_drift = static_cast<double>(hits2) / static_cast<double>(count);
    row.p_drift_se = binomial_se(row.p_drift, count);
    return row;
}

SeparationRow separating_set_probabilities(const ModelParams& params, std::size_t n,
                                           double threshold, std::size_t count,
                                           const SeededStream& stream) {
    params.validate();
    if (n == 0) throw DomainError("grid size must be at least 1");
    if (n == 1 && params.mu != 0.0)
        throw DomainError("the single-point grid is covered only for mu = 0");
    if (count < 100)
        throw DomainError("separating-set frequencies need at least 100 samples per side");

    const GaussianMeasure p1 = mixed_measure(params, n);
    const GaussianMeasure p2 = drift_measure(params, n);
    const IncrementSample mixed =
        sample_mixed_increments(params, n, count, stream.derive(kMixedDraws));
    const IncrementSample drift =
        sample_drifted_bm_increments(params, n, count, stream.derive(kDriftDraws));
    return count_exceedances(p1, p2, mixed.data, drift.data, count, params.alpha, threshold);
}

const char* to_string(SaaConclusion c) {
    switch (c) {
        case SaaConclusion::Evidence: return "saa-evidence";
        case SaaConclusion::NoEvidence: return "no-saa-evidence";
        case SaaConclusion::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

SaaConclusion saa_conclude(const std::vector<SeparationRow>& rows, Dichotomy verdict,
                           double p_high, double p_low) {
    if (rows.empty()) throw InsufficientData("no separation rows to conclude from");
    if (verdict == Dichotomy::EntirelySeparableTrend) {
        const SeparationRow& last = rows.back();
        if (last.p_mixed >= p_high && last.p_drift <= p_low) return SaaConclusion::Evidence;
        return SaaConclusion::Inconclusive;
    }
    if (verdict == Dichotomy::ContiguityCompatible) return SaaConclusion::NoEvidence;
    return SaaConclusion::Inconclusive;
}

SeparationReport saa_experiment(const SweepParams& family, std::size_t n,
                                const std::vector<double>& alphas, std::size_t count,
                                ThresholdPolicy policy, double fixed_threshold,
                                const SeededStream& stream) {
    SeparationReport report;
    report.n = n;

    // Grid and parameter validation happen here, before any sampling.
    const std::vector<EntropyRow> sweep = entropy_sweep(family, n, alphas);
    report.verdict = dichotomy_classify(sweep_points(sweep));

    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const ModelParams params{family.hurst, alphas[i], family.mu, family.sigma};
        const double threshold = separation_threshold(params, n, policy, fixed_threshold);
        report.rows.push_back(separating_set_probabilities(params, n, threshold, count,
                                                           stream.derive(kAlphaBase + i)));
    }

    report.conclusion = saa_conclude(report.rows, report.verdict.verdict);
    return report;
}

namespace {

nlohmann::ordered_json row_to_json(const SeparationRow& row) {
    return nlohmann::ordered_json{
        {"alpha", row.alpha},         {"threshold", row.threshold},
        {"p_mixed", row.p_mixed},     {"p_mixed_se", row.p_mixed_se},
        {"p_drift", row.p_drift},     {"p_drift_se", row.p_drift_se},
        {"samples", row.samples},
    };
}

}  // namespace

void write_separation_json(std::ostream& out, const SeparationReport& report,
                           const nlohmann::ordered_json& config) {
    nlohmann::ordered_json doc;
    doc["config"] = config;
    doc["n"] = report.n;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) doc["rows"].push_back(row_to_json(row));
    doc["verdict"] = to_string(report.verdict.verdict);
    doc["evidence"] = nlohmann::ordered_json::array();
    for (const auto& pt : report.verdict.evidence)
        doc["evidence"].push_back(nlohmann::ordered_json{{"alpha", pt.alpha},
                                                         {"entropy", pt.entropy},
                                                         {"loglr_variance", pt.loglr_variance}});
    doc["saa_conclusion"] = to_string(report.conclusion);
    out << doc.dump(2) << '\n';
}

void write_separation_csv(std::ostream& out, const SeparationReport& report,
                          const std::vector<std::pair<std::string, std::string>>& config) {
    for (const auto& [key, value] : config) out << "# " << key << '=' << value << '\n';
    out << "# verdict=" << to_string(report.verdict.verdict) << '\n';
    out << "# saa_conclusion=" << to_string(report.conclusion) << '\n';
    out << "alpha,threshold,p_mixed,p_mixed_se,p_drift,p_drift_se,samples\n";
    for (const auto& row : report.rows) {
        out << csv_double(row.alpha) << ',' << csv_double(row.threshold) << ','
            << csv_double(row.p_mixed) << ',' << csv_double(row.p_mixed_se) << ','
            << csv_double(row.p_drift) << ',' << csv_double(row.p_drift_se) << ','
            << row.samples << '\n';
    }
}

}  // namespace mfbs
