#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mfbs/market.hpp"
#include "mfbs/measures.hpp"
#include "mfbs/model_params.hpp"
#include "mfbs/numerics.hpp"

namespace mfbs {

// Empirical mass that each measure puts on the candidate separating set
// A = { y : log LR(y) > threshold }. Standard errors are binomial.
struct SeparationRow {
    double alpha = 0.0;
    double threshold = 0.0;
    double p_mixed = 0.0;
    double p_mixed_se = 0.0;
    double p_drift = 0.0;
    double p_drift_se = 0.0;
    std::size_t samples = 0;
};

enum class ThresholdPolicy {
    Fixed,     // caller-supplied constant, 0 by default
    Midpoint,  // halfway between the log LR means under the two measures
};

double separation_threshold(const ModelParams& params, std::size_t n, ThresholdPolicy policy,
                            double fixed_value = 0.0);

// Evaluates the log LR on two externally supplied row-major sample blocks,
// one drawn from each measure. Exposed so degenerate pairings (identical
// measures, shared draws) can be exercised directly.
SeparationRow count_exceedances(const GaussianMeasure& p1, const GaussianMeasure& p2,
                                std::span<const double> draws_p1,
                                std::span<const double> draws_p2, std::size_t count,
                                double alpha, double threshold);

// Samples `count` paths from each side of the grid-n market at the given
// parameters and counts threshold exceedances.
SeparationRow separating_set_probabilities(const ModelParams& params, std::size_t n,
                                           double threshold, std::size_t count,
                                           const SeededStream& stream);

enum class SaaConclusion {
    Evidence,      // diverging entropies and a nearly clean separating set
    NoEvidence,    // bounded entropies: consistent with contiguity
    Inconclusive,
};

const char* to_string(SaaConclusion c);

// Evidence gate: the trend verdict must read entirely-separable and the
// largest-alpha row must have p_mixed >= p_high and p_drift <= p_low.
SaaConclusion saa_conclude(const std::vector<SeparationRow>& rows, Dichotomy verdict,
                           double p_high = 0.99, double p_low = 0.01);

struct SeparationReport {
    std::size_t n = 0;
    std::vector<SeparationRow> rows;
    DichotomyVerdict verdict;
    SaaConclusion conclusion = SaaConclusion::Inconclusive;
};

// Full experiment over an increasing alpha grid (at least 3 points): entropy
// sweep, trend read-out, and per-alpha separating-set frequencies.
SeparationReport saa_experiment(const SweepParams& family, std::size_t n,
                                const std::vector<double>& alphas, std::size_t count,
                                ThresholdPolicy policy, double fixed_threshold,
                                const SeededStream& stream);

void write_separation_json(std::ostream& out, const SeparationReport& report,
                           const nlohmann::ordered_json& config);
void write_separation_csv(std::ostream& out, const SeparationReport& report,
                          const std::vector<std::pair<std::string, std::string>>& config);

}  // namespace mfbs
