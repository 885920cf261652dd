#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mfbs/numerics.hpp"

namespace mfbs {

// Nondegenerate Gaussian on R^dim. The covariance is factorized once at
// construction; a covariance that fails the positive-definiteness pivot test
// is rejected here rather than at first use.
class GaussianMeasure {
public:
    GaussianMeasure(std::vector<double> mean, SymmetricMatrix covariance);

    std::size_t dim() const noexcept { return mean_.size(); }
    const std::vector<double>& mean() const noexcept { return mean_; }
    const SymmetricMatrix& covariance() const noexcept { return covariance_; }
    const CholeskyFactor& factor() const noexcept { return factor_; }

private:
    std::vector<double> mean_;
    SymmetricMatrix covariance_;
    CholeskyFactor factor_;
};

// Relative entropy H(p1 | p2) in nats:
//   0.5 * (tr(S2^{-1} S1) - dim + (m2-m1)' S2^{-1} (m2-m1) + logdet S2 - logdet S1).
// Identical inputs short-circuit to exactly 0.
double gaussian_kl(const GaussianMeasure& p1, const GaussianMeasure& p2);

// log(dp1/dp2)(y), evaluated through triangular solves; no densities are
// formed, so it stays finite wherever the quadratic forms do.
double log_likelihood_ratio(const GaussianMeasure& p1, const GaussianMeasure& p2,
                            std::span<const double> y);

// Moments of log(dp1/dp2) under p1. The mean equals gaussian_kl(p1, p2) but
// is assembled through an explicit inverse as an independent route; the
// variance is 0.5 * tr((I - S2^{-1} S1)^2) + d' S2^{-1} S1 S2^{-1} d with
// d = m1 - m2.
struct LogLrMoments {
    double mean = 0.0;
    double variance = 0.0;
};

LogLrMoments loglr_moments(const GaussianMeasure& p1, const GaussianMeasure& p2);

// Row-major count x dim draws; row r is a pure function of (stream, r), with
// the same chunking guarantee as the increment samplers.
std::vector<double> sample_gaussian(const GaussianMeasure& measure, std::size_t count,
                                    const SeededStream& stream, std::size_t first_row = 0);

struct McEstimate {
    double value = 0.0;
    double se = 0.0;
};

// Two Monte Carlo estimators of H(p1 | p2):
//   forward: mean of log LR under p1 draws,
//   tilted:  mean of LR * log LR under p2 draws.
// Both should bracket the closed form within a few standard errors. The
// tilted integrand exponentiates the log LR; arguments above 700 are clamped
// and flagged instead of overflowing.
struct McKlCheck {
    McEstimate forward;
    McEstimate tilted;
    bool overflow_flagged = false;
};

McKlCheck mc_kl_check(const GaussianMeasure& p1, const GaussianMeasure& p2, std::size_t count,
                      const SeededStream& stream);

// Axis-aligned grid partition of R^dim: cuts[d] lists the strictly
// increasing cut points along axis d, so axis d contributes cuts[d].size()+1
// half-open cells (..., a] (a, b] (b, ...).
struct GridPartition {
    std::vector<std::vector<double>> cuts;

    std::size_t dim() const noexcept { return cuts.size(); }
    std::size_t cell_count() const;
    std::size_t cell_index(std::span<const double> point) const;
};

struct PartitionKl {
    double value = 0.0;
    double se = 0.0;
};

// Partition relative entropy sum_F Q1(F) log(Q1(F)/Q2(F)) with the 0*log 0 = 0
// convention. Exact via normal CDF differences; 1-D measures only.
PartitionKl partition_kl(const GaussianMeasure& p1, const GaussianMeasure& p2,
                         const GridPartition& partition);

// Monte Carlo estimate of the same quantity for any dimension, with a
// delta-method standard error.
PartitionKl partition_kl(const GaussianMeasure& p1, const GaussianMeasure& p2,
                         const GridPartition& partition, std::size_t count,
                         const SeededStream& stream);

enum class Dichotomy {
    EntirelySeparableTrend,
    ContiguityCompatible,
    Inconclusive,
};

const char* to_string(Dichotomy d);

struct SweepPoint {
    double alpha = 0.0;
    double entropy = 0.0;         // mean of log LR under p1, i.e. H(p1 | p2)
    double loglr_variance = 0.0;  // variance of log LR under p1
};

struct DichotomyVerdict {
    Dichotomy verdict = Dichotomy::Inconclusive;
    std::vector<SweepPoint> evidence;
};

// Entropy trend read-out over an increasing alpha grid. Divergence evidence
// requires a strictly increasing tail (the trailing half of the grid,
// rounded up) and growth by at least growth_factor from first to last point;
// a bounded profile (max <= bounded_factor * min) reads as compatible with
// contiguity; anything else is inconclusive.
DichotomyVerdict dichotomy_classify(const std::vector<SweepPoint>& sweep,
                                    double growth_factor = 10.0, double bounded_factor = 2.0);

}  // namespace mfbs
