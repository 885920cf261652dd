#include "mfbs/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mfbs {

namespace {

constexpr std::uint64_t kFirstSampler = 1;
constexpr std::uint64_t kSecondSampler = 2;

// Beyond this the tilted integrand exp(logLR) overflows a double.
constexpr double kExpClamp = 700.0;

void require_same_dim(const GaussianMeasure& p1, const GaussianMeasure& p2) {
    if (p1.dim() != p2.dim())
        throw DimensionMismatch("measures have dimensions " + std::to_string(p1.dim()) + " and " +
                                std::to_string(p2.dim()));
}

bool identical(const GaussianMeasure& p1, const GaussianMeasure& p2) {
    return p1.mean() == p2.mean() && p1.covariance().entries() == p2.covariance().entries();
}

McEstimate summarize(const std::vector<double>& values) {
    const double count = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double var = ss / (count - 1.0);
    return {mean, std::sqrt(var / count)};
}

}  // namespace

GaussianMeasure::GaussianMeasure(std::vector<double> mean, SymmetricMatrix covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)), factor_() {
    if (mean_.size() != covariance_.size())
        throw DimensionMismatch("mean length " + std::to_string(mean_.size()) +
                                " does not match covariance dimension " +
                                std::to_string(covariance_.size()));
    factor_ = cholesky_factor(covariance_);
}

double gaussian_kl(const GaussianMeasure& p1, const GaussianMeasure& p2) {
    require_same_dim(p1, p2);
    if (identical(p1, p2)) return 0.0;

    const std::size_t n = p1.dim();
    const auto& factor2 = p2.factor();

    double trace_term = 0.0;
    std::vector<double> column(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) column[i] = p1.covariance()(i, j);
        trace_term += factor2.solve(column)[j];
    }

    std::vector<double> shift(n);
    for (std::size_t i = 0; i < n; ++i) shift[i] = p2.mean()[i] - p1.mean()[i];
    const std::vector<double> solved = factor2.solve(shift);
    const double quad = std::inner_product(shift.begin(), shift.end(), solved.begin(), 0.0);

    return 0.5 * (trace_term - static_cast<double>(n) + quad + factor2.logdet -
                  p1.factor().logdet);
}

double log_likelihood_ratio(const GaussianMeasure& p1, const GaussianMeasure& p2,
                            std::span<const double> y) {
    require_same_dim(p1, p2);
    if (y.size() != p1.dim())
        throw DimensionMismatch("point has length " + std::to_string(y.size()) +
                                ", measures have dimension " + std::to_string(p1.dim()));

    const std::size_t n = p1.dim();
    std::vector<double> centered(n);

    const auto quad_form = [&](const GaussianMeasure& p) {
        for (std::size_t i = 0; i < n; ++i) centered[i] = y[i] - p.mean()[i];
        const std::vector<double> u = p.factor().forward_solve(centered);
        return std::inner_product(u.begin(), u.end(), u.begin(), 0.0);
    };

    const double q1 = quad_form(p1);
    const double q2 = quad_form(p2);
    return 0.5 * (q2 - q1 + p2.factor().logdet - p1.factor().logdet);
}

LogLrMoments loglr_moments(const GaussianMeasure& p1, const GaussianMeasure& p2) {
    require_same_dim(p1, p2);
    if (identical(p1, p2)) return {0.0, 0.0};

    const std::size_t n = p1.dim();
    const auto& factor2 = p2.factor();

    // Explicit inverse of S2, one unit vector at a time.
    std::vector<double> inv(n * n);
    std::vector<double> unit(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        unit[j] = 1.0;
        const std::vector<double> col = factor2.solve(unit);
        for (std::size_t i = 0; i < n; ++i) inv[i * n + j] = col[i];
        unit[j] = 0.0;
    }

    // M = S2^{-1} S1.
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double a = inv[i * n + k];
            for (std::size_t j = 0; j < n; ++j) m[i * n + j] += a * p1.covariance()(k, j);
        }

    double trace_m = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace_m += m[i * n + i];

    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = p1.mean()[i] - p2.mean()[i];

    std::vector<double> u(n, 0.0);  // S2^{-1} delta
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) u[i] += inv[i * n + j] * delta[j];
    const double quad = std::inner_product(delta.begin(), delta.end(), u.begin(), 0.0);

    LogLrMoments out;
    out.mean = 0.5 * (trace_m - static_cast<double>(n) + quad + factor2.logdet -
                      p1.factor().logdet);

    // tr((I - M)^2) = sum_ij (I-M)_ij (I-M)_ji.
    double trace_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double gij = (i == j ? 1.0 : 0.0) - m[i * n + j];
            const double gji = (i == j ? 1.0 : 0.0) - m[j * n + i];
            trace_sq += gij * gji;
        }

    // u' S1 u.
    double mean_part = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += p1.covariance()(i, j) * u[j];
        mean_part += u[i] * s;
    }

    out.variance = 0.5 * trace_sq + mean_part;
    return out;
}

std::vector<double> sample_gaussian(const GaussianMeasure& measure, std::size_t count,
                                    const SeededStream& stream, std::size_t first_row) {
    const std::size_t n = measure.dim();
    std::vector<double> out(count * n);
    std::vector<double> z(n), colored(n);
    for (std::size_t r = 0; r < count; ++r) {
        const std::uint64_t base = static_cast<std::uint64_t>(first_row + r) * n;
        for (std::size_t j = 0; j < n; ++j) z[j] = normal_draw(stream, base + j);
        measure.factor().multiply_lower(z, colored);
        for (std::size_t j = 0; j < n; ++j) out[r * n + j] = measure.mean()[j] + colored[j];
    }
    return out;
}

McKlCheck mc_kl_check(const GaussianMeasure& p1, const GaussianMeasure& p2, std::size_t count,
                      const SeededStream& stream) {
    require_same_dim(p1, p2);
    if (count < 2) throw DomainError("mc_kl_check needs at least 2 samples");

    const std::size_t n = p1.dim();
    McKlCheck out;

    std::vector<double> values(count);

    const std::vector<double> forward_draws = sample_gaussian(p1, count, stream.derive(kFirstSampler));
    for (std::size_t r = 0; r < count; ++r)
        values[r] = log_likelihood_ratio(p1, p2, {forward_draws.data() + r * n, n});
    out.forward = summarize(values);

    const std::vector<double> tilted_draws = sample_gaussian(p2, count, stream.derive(kSecondSampler));
    for (std::size_t r = 0; r < count; ++r) {
        const double l = log_likelihood_ratio(p1, p2, {tilted_draws.data() + r * n, n});
        if (l > kExpClamp) out.overflow_flagged = true;
        values[r] = std::exp(std::min(l, kExpClamp)) * l;
    }
    out.tilted = summarize(values);

    return out;
}

std::size_t GridPartition::cell_count() const {
    std::size_t cells = 1;
    for (const auto& axis : cuts) cells *= axis.size() + 1;
    return cells;
}

std::size_t GridPartition::cell_index(std::span<const double> point) const {
    std::size_t index = 0;
    for (std::size_t d = 0; d < cuts.size(); ++d) {
        const auto& axis = cuts[d];
        const std::size_t along =
            std::lower_bound(axis.begin(), axis.end(), point[d]) - axis.begin();
        index = index * (axis.size() + 1) + along;
    }
    return index;
}

namespace {

void validate_partition(const GridPartition& partition, std::size_t dim) {
    if (partition.dim() != dim)
        throw InvalidPartition("partition has " + std::to_string(partition.dim()) +
                               " axes, measures have dimension " + std::to_string(dim));
    for (const auto& axis : partition.cuts) {
        for (std::size_t i = 0; i < axis.size(); ++i) {
            if (!std::isfinite(axis[i]))
                throw InvalidPartition("cut points must be finite");
            if (i > 0 && !(axis[i] > axis[i - 1]))
                throw InvalidPartition("cut points must be strictly increasing");
        }
    }
    if (partition.cell_count() > 10'000'000)
        throw InvalidPartition("partition has too many cells to tabulate");
}

// sum q1 log(q1/q2) with 0 log 0 = 0; +inf when some cell has q1 > 0 = q2.
double partition_sum(const std::vector<double>& q1, const std::vector<double>& q2) {
    double total = 0.0;
    for (std::size_t j = 0; j < q1.size(); ++j) {
        if (q1[j] <= 0.0) continue;
        if (q2[j] <= 0.0) return std::numeric_limits<double>::infinity();
        total += q1[j] * (std::log(q1[j]) - std::log(q2[j]));
    }
    return total;
}

std::vector<double> cell_probabilities_1d(const GaussianMeasure& p,
                                          const std::vector<double>& cuts) {
    const double m = p.mean()[0];
    const double sd = std::sqrt(p.covariance()(0, 0));
    std::vector<double> probs(cuts.size() + 1);
    double prev = 0.0;
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        const double cdf = normal_cdf((cuts[i] - m) / sd);
        probs[i] = std::max(cdf - prev, 0.0);
        prev = cdf;
    }
    probs[cuts.size()] = std::max(1.0 - prev, 0.0);
    return probs;
}

}  // namespace

PartitionKl partition_kl(const GaussianMeasure& p1, const GaussianMeasure& p2,
                         const GridPartition& partition) {
    require_same_dim(p1, p2);
    validate_partition(partition, p1.dim());
    if (p1.dim() != 1)
        throw DomainError("exact partition entropy is available in dimension 1 only; "
                          "use the Monte Carlo overload");

    const std::vector<double> q1 = cell_probabilities_1d(p1, partition.cuts[0]);
    const std::vector<double> q2 = cell_probabilities_1d(p2, partition.cuts[0]);
    return {partition_sum(q1, q2), 0.0};
}

PartitionKl partition_kl(const GaussianMeasure& p1, const GaussianMeasure& p2,
                         const GridPartition& partition, std::size_t count,
                         const SeededStream& stream) {
    require_same_dim(p1, p2);
    validate_partition(partition, p1.dim());
    if (count < 2) throw DomainError("partition entropy estimate needs at least 2 samples");

    const std::size_t n = p1.dim();
    const std::size_t cells = partition.cell_count();
    std::vector<double> q1(cells, 0.0), q2(cells, 0.0);

    const auto tabulate = [&](const GaussianMeasure& p, std::uint64_t subtag,
                              std::vector<double>& freq) {
        const std::vector<double> draws = sample_gaussian(p, count, stream.derive(subtag));
        for (std::size_t r = 0; r < count; ++r)
            freq[partition.cell_index({draws.data() + r * n, n})] += 1.0;
        for (double& f : freq) f /= static_cast<double>(count);
    };
    tabulate(p1, kFirstSampler, q1);
    tabulate(p2, kSecondSampler, q2);

    PartitionKl out;
    out.value = partition_sum(q1, q2);
    if (!std::isfinite(out.value)) {
        out.se = std::numeric_limits<double>::infinity();
        return out;
    }

    // Delta method over the two independent multinomials.
    double a_sq = 0.0, a_mean = 0.0, b_sq = 0.0, b_mean = 0.0;
    for (std::size_t j = 0; j < cells; ++j) {
        if (q1[j] > 0.0) {
            const double a = std::log(q1[j] / q2[j]) + 1.0;
            a_sq += a * a * q1[j];
            a_mean += a * q1[j];
        }
        if (q2[j] > 0.0) {
            const double b = -q1[j] / q2[j];
            b_sq += b * b * q2[j];
            b_mean += b * q2[j];
        }
    }
    const double var = (a_sq - a_mean * a_mean + b_sq - b_mean * b_mean) /
                       static_cast<double>(count);
    out.se = std::sqrt(std::max(var, 0.0));
    return out;
}

const char* to_string(Dichotomy d) {
    switch (d) {
        case Dichotomy::EntirelySeparableTrend: return "entirely-separable-trend";
        case Dichotomy::ContiguityCompatible: return "contiguity-compatible";
        case Dichotomy::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

DichotomyVerdict dichotomy_classify(const std::vector<SweepPoint>& sweep, double growth_factor,
                                    double bounded_factor) {
    if (sweep.size() < 3)
        throw InsufficientData("dichotomy read-out needs at least 3 sweep points, got " +
                               std::to_string(sweep.size()));
    for (std::size_t i = 1; i < sweep.size(); ++i)
        if (!(sweep[i].alpha > sweep[i - 1].alpha))
            throw InvalidGrid("alpha grid must be strictly increasing");

    DichotomyVerdict out;
    out.evidence = sweep;

    const std::size_t len = sweep.size();
    const std::size_t tail = (len + 1) / 2;
    bool tail_increasing = true;
    for (std::size_t i = len - tail + 1; i < len; ++i)
        if (!(sweep[i].entropy > sweep[i - 1].entropy)) tail_increasing = false;
    const bool grew = sweep.back().entropy >= growth_factor * sweep.front().entropy;

    if (tail_increasing && grew) {
        out.verdict = Dichotomy::EntirelySeparableTrend;
        return out;
    }

    double lo = sweep[0].entropy, hi = sweep[0].entropy;
    for (const auto& pt : sweep) {
        lo = std::min(lo, pt.entropy);
        hi = std::max(hi, pt.entropy);
    }
    out.verdict = (hi <= bounded_factor * lo) ? Dichotomy::ContiguityCompatible
                                              : Dichotomy::Inconclusive;
    return out;
}

}  // namespace mfbs
