#include "mfbs/fbm.hpp"

#include "mfbs/format.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace mfbs {

namespace {

// Substream tags: the fractional and Brownian noise sources must never share
// draw indices.
constexpr std::uint64_t kFractionalNoise = 1;
constexpr std::uint64_t kBrownianNoise = 2;

}  // namespace

FbmCovariance fbm_increment_covariance(double hurst, std::size_t n) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw DomainError("hurst must lie in (0, 1), got " + std::to_string(hurst));
    if (n == 0) throw DomainError("grid size must be at least 1");

    const double two_h = 2.0 * hurst;
    const double scale = std::pow(static_cast<double>(n), -two_h);

    // One value per lag; the matrix is Toeplitz.
    std::vector<double> by_lag(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double kd = static_cast<double>(k);
        const double up = std::pow(kd + 1.0, two_h);
        const double down = std::pow(std::abs(kd - 1.0), two_h);
        by_lag[k] = 0.5 * (up + down - 2.0 * std::pow(kd, two_h)) * scale;
    }

    FbmCovariance cov{hurst, n, SymmetricMatrix(n)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) cov.matrix.set(i, j, by_lag[j - i]);
    return cov;
}

IncrementSample sample_mixed_increments(const ModelParams& params, std::size_t n,
                                        std::size_t count, const SeededStream& stream,
                                        std::size_t first_row) {
    params.validate();
    const FbmCovariance cov = fbm_increment_covariance(params.hurst, n);

    IncrementSample out;
    out.n = n;
    out.count = count;
    out.data.resize(count * n);

    CholeskyFactor fractional_root;
    try {
        fractional_root = cholesky_factor(cov.matrix);
    } catch (const NotPositiveDefinite&) {
        // The exact covariance is PD; rounding can push the smallest pivot
        // under the tolerance for large n. Retry once with a recorded ridge.
        out.ridge = 1e-12 * cov.matrix.trace() / static_cast<double>(n);
        SymmetricMatrix jittered = cov.matrix;
        for (std::size_t i = 0; i < n; ++i) jittered.set(i, i, jittered(i, i) + out.ridge);
        fractional_root = cholesky_factor(jittered);
    }

    const SeededStream fractional = stream.derive(kFractionalNoise);
    const SeededStream brownian = stream.derive(kBrownianNoise);
    const double root_dt = 1.0 / std::sqrt(static_cast<double>(n));

    std::vector<double> z(n), colored(n);
    for (std::size_t r = 0; r < count; ++r) {
        const std::uint64_t base = static_cast<std::uint64_t>(first_row + r) * n;
        for (std::size_t j = 0; j < n; ++j) z[j] = normal_draw(fractional, base + j);
        fractional_root.multiply_lower(z, colored);
        for (std::size_t j = 0; j < n; ++j)
            out.data[r * n + j] =
                params.alpha * colored[j] + root_dt * normal_draw(brownian, base + j);
    }
    return out;
}

IncrementSample sample_drifted_bm_increments(const ModelParams& params, std::size_t n,
                                             std::size_t count, const SeededStream& stream,
                                             std::size_t first_row) {
    params.validate();
    if (n == 0) throw DomainError("grid size must be at least 1");

    IncrementSample out;
    out.n = n;
    out.count = count;
    out.data.resize(count * n);

    const SeededStream noise = stream.derive(kBrownianNoise);
    const double mean = -params.drift_ratio() / static_cast<double>(n);
    const double root_dt = 1.0 / std::sqrt(static_cast<double>(n));

    for (std::size_t r = 0; r < count; ++r) {
        const std::uint64_t base = static_cast<std::uint64_t>(first_row + r) * n;
        for (std::size_t j = 0; j < n; ++j)
            out.data[r * n + j] = mean + root_dt * normal_draw(noise, base + j);
    }
    return out;
}

void write_matrix_csv(std::ostream& out, const SymmetricMatrix& matrix) {
    const std::size_t n = matrix.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j) out << ',';
            out << csv_double(matrix(i, j));
        }
        out << '\n';
    }
}

}  // namespace mfbs
