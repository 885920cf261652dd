#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mfbs/measures.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace mfbs;

namespace {

GaussianMeasure normal_1d(double mean, double variance) {
    return GaussianMeasure({mean}, SymmetricMatrix(1, {variance}));
}

// Simpson quadrature of p1 log(p1/p2) for 1-D Gaussians: an oracle route
// that never touches the library's linear algebra.
double kl_by_quadrature(double m1, double v1, double m2, double v2) {
    const auto log_density = [](double x, double m, double v) {
        return -0.5 * std::log(2.0 * M_PI * v) - 0.5 * (x - m) * (x - m) / v;
    };
    const double lo = m1 - 20.0 * std::sqrt(v1);
    const double hi = m1 + 20.0 * std::sqrt(v1);
    const std::size_t cells = 20000;
    const double h = (hi - lo) / cells;
    double total = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        const auto f = [&](double x) {
            const double l1 = log_density(x, m1, v1);
            return std::exp(l1) * (l1 - log_density(x, m2, v2));
        };
        const double a = lo + i * h;
        total += h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
    }
    return total;
}

}  // namespace

TEST_CASE("gaussian measure construction guards") {
    CHECK_THROWS_AS(GaussianMeasure({0.0, 0.0}, SymmetricMatrix(1, {1.0})), DimensionMismatch);
    CHECK_THROWS_AS(GaussianMeasure({0.0, 0.0}, SymmetricMatrix{{1.0, 2.0}, {2.0, 1.0}}),
                    NotPositiveDefinite);
}

TEST_CASE("gaussian_kl known values") {
    const GaussianMeasure p = normal_1d(0.0, 2.0);
    const GaussianMeasure q = normal_1d(0.0, 1.0);

    CHECK(gaussian_kl(p, p) == 0.0);
    // 0.5 (2 - 1 - log 2)
    CHECK(gaussian_kl(p, q) == doctest::Approx(0.15342640972002735).epsilon(1e-14));
    // 0.5 (1/2 - 1 + log 2): asymmetry is expected.
    CHECK(gaussian_kl(q, p) == doctest::Approx(0.096573590279972655).epsilon(1e-14));

    CHECK(gaussian_kl(p, q) == doctest::Approx(kl_by_quadrature(0, 2, 0, 1)).epsilon(1e-9));

    const GaussianMeasure shifted = normal_1d(1.0, 1.0);
    CHECK(gaussian_kl(p, shifted) ==
          doctest::Approx(kl_by_quadrature(0, 2, 1, 1)).epsilon(1e-9));
    CHECK(gaussian_kl(p, shifted) == doctest::Approx(0.5 * (2.0 - 1.0 + 1.0 - std::log(2.0)))
                                         .epsilon(1e-14));

    CHECK_THROWS_AS(gaussian_kl(p, GaussianMeasure({0.0, 0.0}, SymmetricMatrix::identity(2))),
                    DimensionMismatch);
}

TEST_CASE("gaussian_kl is nonnegative on generic pairs") {
    const SeededStream stream{5, 0};
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        const SeededStream t = stream.derive(trial);
        const std::size_t n = 1 + static_cast<std::size_t>(uniform_draw(t, 0) * 6.0);

        const auto make = [&](std::uint64_t tag) {
            const SeededStream s = t.derive(tag);
            std::vector<double> a(n * n);
            for (std::size_t i = 0; i < n * n; ++i) a[i] = normal_draw(s, i);
            SymmetricMatrix cov(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i; j < n; ++j) {
                    double dot = 0.0;
                    for (std::size_t k = 0; k < n; ++k) dot += a[i * n + k] * a[j * n + k];
                    cov.set(i, j, dot / n + (i == j ? 0.2 : 0.0));
                }
            std::vector<double> mean(n);
            for (std::size_t i = 0; i < n; ++i) mean[i] = normal_draw(s, n * n + i);
            return GaussianMeasure(std::move(mean), std::move(cov));
        };

        const GaussianMeasure p1 = make(1), p2 = make(2);
        CHECK(gaussian_kl(p1, p2) >= -1e-12);
        CHECK(gaussian_kl(p2, p1) >= -1e-12);
    }
}

TEST_CASE("log_likelihood_ratio spot values and consistency") {
    const GaussianMeasure p = normal_1d(0.0, 2.0);
    const GaussianMeasure q = normal_1d(0.0, 1.0);

    const std::vector<double> origin{0.0};
    // log(N(0,2)/N(0,1)) at 0 = -0.5 log 2.
    CHECK(log_likelihood_ratio(p, q, origin) ==
          doctest::Approx(-0.34657359027997265).epsilon(1e-14));
    CHECK(log_likelihood_ratio(p, p, origin) == 0.0);

    // Against direct density evaluation at a few points.
    for (double y : {-2.0, -0.3, 0.7, 3.1}) {
        const auto log_density = [](double x, double m, double v) {
            return -0.5 * std::log(2.0 * M_PI * v) - 0.5 * (x - m) * (x - m) / v;
        };
        const std::vector<double> point{y};
        CHECK(log_likelihood_ratio(p, q, point) ==
              doctest::Approx(log_density(y, 0, 2) - log_density(y, 0, 1)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(log_likelihood_ratio(p, q, std::vector<double>{0.0, 1.0}),
                    DimensionMismatch);
}

TEST_CASE("mean log LR under p1 recovers the entropy by sampling") {
    const GaussianMeasure p1({0.3, -0.1}, SymmetricMatrix{{0.8, 0.2}, {0.2, 0.6}});
    const GaussianMeasure p2({0.0, 0.0}, SymmetricMatrix{{1.0, 0.0}, {0.0, 1.0}});

    const std::size_t count = 100000;
    const std::vector<double> draws = sample_gaussian(p1, count, SeededStream{42, 3});
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t r = 0; r < count; ++r) {
        const double l = log_likelihood_ratio(p1, p2, {draws.data() + 2 * r, 2});
        sum += l;
        sum_sq += l * l;
    }
    const double mean = sum / count;
    const double se = std::sqrt((sum_sq / count - mean * mean) / count);
    CHECK(std::abs(mean - gaussian_kl(p1, p2)) <= 4.0 * se);
}

TEST_CASE("loglr_moments closed forms") {
    const GaussianMeasure p = normal_1d(0.0, 2.0);
    const GaussianMeasure q = normal_1d(0.0, 1.0);

    const LogLrMoments trivial = loglr_moments(p, p);
    CHECK(trivial.mean == 0.0);
    CHECK(trivial.variance == 0.0);

    // For N(0,2) vs N(0,1): mean = KL, variance = 0.5 tr((I - 2)^2) = 0.5.
    const LogLrMoments m = loglr_moments(p, q);
    CHECK(m.mean == doctest::Approx(0.15342640972002735).epsilon(1e-12));
    CHECK(m.variance == doctest::Approx(0.5).epsilon(1e-12));

    // Mean shift contributes delta' S2^{-1} S1 S2^{-1} delta = 2.
    const LogLrMoments shifted = loglr_moments(p, normal_1d(1.0, 1.0));
    CHECK(shifted.variance == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("loglr_moments mean agrees with gaussian_kl on generic pairs") {
    const GaussianMeasure p1({0.5, 0.0, -0.2},
                             SymmetricMatrix{{1.0, 0.3, 0.1}, {0.3, 0.8, 0.2}, {0.1, 0.2, 0.9}});
    const GaussianMeasure p2({0.0, 0.1, 0.0},
                             SymmetricMatrix{{1.2, 0.1, 0.0}, {0.1, 1.0, 0.3}, {0.0, 0.3, 1.1}});
    const LogLrMoments m = loglr_moments(p1, p2);
    CHECK(m.mean == doctest::Approx(gaussian_kl(p1, p2)).epsilon(1e-10));
    CHECK(m.variance >= 0.0);
}

TEST_CASE("loglr variance matches sampled variance") {
    const GaussianMeasure p1({0.3, -0.1}, SymmetricMatrix{{0.8, 0.2}, {0.2, 0.6}});
    const GaussianMeasure p2({0.0, 0.0}, SymmetricMatrix{{1.0, 0.0}, {0.0, 1.0}});

    const std::size_t count = 100000;
    const std::vector<double> draws = sample_gaussian(p1, count, SeededStream{7, 0});
    std::vector<double> values(count);
    double mean = 0.0;
    for (std::size_t r = 0; r < count; ++r) {
        values[r] = log_likelihood_ratio(p1, p2, {draws.data() + 2 * r, 2});
        mean += values[r];
    }
    mean /= count;
    double m2 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= count;
    m4 /= count;
    const double se_var = std::sqrt(std::max(m4 - m2 * m2, 0.0) / count);
    CHECK(std::abs(m2 - loglr_moments(p1, p2).variance) <= 5.0 * se_var);
}

TEST_CASE("sample_gaussian determinism and chunking") {
    const GaussianMeasure p({1.0, -1.0}, SymmetricMatrix{{0.5, 0.1}, {0.1, 0.4}});
    const SeededStream stream{13, 2};

    const std::vector<double> whole = sample_gaussian(p, 30, stream);
    std::vector<double> stitched = sample_gaussian(p, 12, stream);
    const std::vector<double> tail = sample_gaussian(p, 18, stream, 12);
    stitched.insert(stitched.end(), tail.begin(), tail.end());
    CHECK(stitched == whole);
}

TEST_CASE("mc_kl_check brackets the closed form") {
    const GaussianMeasure p = normal_1d(0.0, 2.0);
    const GaussianMeasure q = normal_1d(0.0, 1.0);

    const McKlCheck same = mc_kl_check(p, p, 1000, SeededStream{42, 0});
    CHECK(same.forward.value == 0.0);
    CHECK(same.tilted.value == 0.0);
    CHECK_FALSE(same.overflow_flagged);

    const McKlCheck check = mc_kl_check(p, q, 100000, SeededStream{42, 1});
    const double kl = gaussian_kl(p, q);
    CHECK(std::abs(check.forward.value - kl) <= 4.0 * check.forward.se);
    CHECK(std::abs(check.tilted.value - kl) <= 4.0 * check.tilted.se);
    CHECK(check.forward.se > 0.0);
    CHECK(check.tilted.se > 0.0);

    CHECK_THROWS_AS(mc_kl_check(p, q, 1, SeededStream{1, 0}), DomainError);
}

TEST_CASE("grid partition cell indexing") {
    const GridPartition part{{{-1.0, 0.0, 1.0}}};
    CHECK(part.cell_count() == 4);
    CHECK(part.cell_index(std::vector<double>{-2.0}) == 0);
    CHECK(part.cell_index(std::vector<double>{-1.0}) == 0);  // boundary joins the lower cell
    CHECK(part.cell_index(std::vector<double>{-0.5}) == 1);
    CHECK(part.cell_index(std::vector<double>{0.0}) == 1);
    CHECK(part.cell_index(std::vector<double>{2.0}) == 3);

    const GridPartition grid2{{{0.0}, {-1.0, 1.0}}};
    CHECK(grid2.cell_count() == 6);
    CHECK(grid2.cell_index(std::vector<double>{-1.0, 0.0}) == 1);
    CHECK(grid2.cell_index(std::vector<double>{1.0, 2.0}) == 5);
}

TEST_CASE("exact 1-D partition entropy") {
    const GaussianMeasure p = normal_1d(0.0, 1.0);
    const GaussianMeasure q = normal_1d(1.0, 1.0);

    // Trivial partition carries no information.
    const PartitionKl trivial = partition_kl(p, q, GridPartition{{{}}});
    CHECK(trivial.value == 0.0);
    CHECK(trivial.se == 0.0);

    // N(0,1) vs N(1,1) split at 0.5: (2q-1) log(q/(1-q)) with q = Phi(0.5).
    const PartitionKl two = partition_kl(p, q, GridPartition{{{0.5}}});
    CHECK(two.value == doctest::Approx(0.3090071427327688).epsilon(1e-12));
    CHECK(two.value <= gaussian_kl(p, q));
    CHECK(gaussian_kl(p, q) == doctest::Approx(0.5).epsilon(1e-14));

    // Refinement can only add information.
    double previous = 0.0;
    for (std::size_t halves : {1u, 2u, 4u, 8u}) {
        std::vector<double> cuts;
        for (std::size_t i = 0; i <= 2 * halves; ++i)
            cuts.push_back(-1.5 + 2.0 * static_cast<double>(i) / halves);
        const PartitionKl fine = partition_kl(p, q, GridPartition{{cuts}});
        CHECK(fine.value >= previous - 1e-13);
        CHECK(fine.value <= gaussian_kl(p, q) + 1e-13);
        previous = fine.value;
    }

    CHECK_THROWS_AS(partition_kl(p, q, GridPartition{{{1.0, 1.0}}}), InvalidPartition);
    CHECK_THROWS_AS(partition_kl(p, q, GridPartition{{{1.0}, {2.0}}}), InvalidPartition);

    const GaussianMeasure p2({0.0, 0.0}, SymmetricMatrix::identity(2));
    CHECK_THROWS_AS(partition_kl(p2, p2, GridPartition{{{0.0}, {0.0}}}), DomainError);
}

TEST_CASE("monte carlo partition entropy stays below the full entropy") {
    const GaussianMeasure p1({0.3, 0.0}, SymmetricMatrix{{1.5, 0.4}, {0.4, 0.9}});
    const GaussianMeasure p2({0.0, 0.0}, SymmetricMatrix::identity(2));
    const GridPartition part{{{-1.0, 0.0, 1.0}, {-1.0, 1.0}}};

    const PartitionKl est = partition_kl(p1, p2, part, 200000, SeededStream{42, 0});
    CHECK(std::isfinite(est.value));
    CHECK(est.se > 0.0);
    // Data processing: partition entropy <= full entropy, within noise.
    CHECK(est.value <= gaussian_kl(p1, p2) + 4.0 * est.se);
    CHECK(est.value >= 0.0);

    // Same inputs, same estimate.
    const PartitionKl again = partition_kl(p1, p2, part, 200000, SeededStream{42, 0});
    CHECK(again.value == est.value);

    // 1-D MC agrees with the exact route.
    const GaussianMeasure q1 = normal_1d(0.0, 2.0);
    const GaussianMeasure q2 = normal_1d(0.0, 1.0);
    const GridPartition cuts{{{-1.0, 1.0}}};
    const PartitionKl exact = partition_kl(q1, q2, cuts);
    const PartitionKl mc = partition_kl(q1, q2, cuts, 200000, SeededStream{8, 0});
    CHECK(std::abs(mc.value - exact.value) <= 4.0 * mc.se);
}

TEST_CASE("dichotomy classification") {
    const auto sweep = [](std::initializer_list<double> entropies) {
        std::vector<SweepPoint> points;
        double alpha = 1.0;
        for (double h : entropies) {
            points.push_back({alpha, h, 0.0});
            alpha *= 2.0;
        }
        return points;
    };

    CHECK(dichotomy_classify(sweep({1.0, 1.0, 1.0, 1.0})).verdict ==
          Dichotomy::ContiguityCompatible);
    CHECK(dichotomy_classify(sweep({1.0, 1.2, 0.9, 1.1})).verdict ==
          Dichotomy::ContiguityCompatible);
    CHECK(dichotomy_classify(sweep({1.0, 5.0, 3.0, 8.0})).verdict == Dichotomy::Inconclusive);
    CHECK(dichotomy_classify(sweep({1.0, 2.0, 4.0, 8.0, 16.0})).verdict ==
          Dichotomy::EntirelySeparableTrend);
    CHECK(dichotomy_classify(sweep({0.0, 0.0, 0.0})).verdict == Dichotomy::ContiguityCompatible);
    // Growing but not enough to clear the divergence factor.
    CHECK(dichotomy_classify(sweep({1.0, 2.0, 4.0})).verdict == Dichotomy::Inconclusive);

    CHECK_THROWS_AS(dichotomy_classify(sweep({1.0, 2.0})), InsufficientData);

    std::vector<SweepPoint> unsorted{{2.0, 1.0, 0.0}, {1.0, 2.0, 0.0}, {4.0, 3.0, 0.0}};
    CHECK_THROWS_AS(dichotomy_classify(unsorted), InvalidGrid);

    const DichotomyVerdict v = dichotomy_classify(sweep({1.0, 4.0, 16.0, 64.0}));
    CHECK(v.verdict == Dichotomy::EntirelySeparableTrend);
    CHECK(v.evidence.size() == 4);
    CHECK(v.evidence[2].entropy == 16.0);
}
