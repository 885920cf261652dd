#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "mfbs/model_params.hpp"
#include "mfbs/numerics.hpp"

namespace mfbs {

// Covariance of the n increments of fractional Brownian motion on the
// uniform grid of [0,1]. Entries depend only on the lag:
//   C[i][j] = 0.5 * (|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H}) / n^{2H},  k = |i-j|.
struct FbmCovariance {
    double hurst = 0.0;
    std::size_t n = 0;
    SymmetricMatrix matrix;
};

// Valid for any hurst in (0,1), n >= 1.
FbmCovariance fbm_increment_covariance(double hurst, std::size_t n);

// Row-major block of sampled increment vectors. `ridge` records the diagonal
// jitter that had to be added before factorizing the fBm covariance (0 when
// the plain factorization succeeded).
struct IncrementSample {
    std::size_t n = 0;
    std::size_t count = 0;
    double ridge = 0.0;
    std::vector<double> data;

    double at(std::size_t row, std::size_t col) const { return data[row * n + col]; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * n, n}; }
};

// Increments of sigma-normalized mixed log-returns under the mixed measure:
// each row has law N(0, I/n + alpha^2 C_n). Row r of a call with
// first_row = s reproduces bit-for-bit row r+s of a call with first_row = 0,
// so large samples can be produced in chunks.
IncrementSample sample_mixed_increments(const ModelParams& params, std::size_t n,
                                        std::size_t count, const SeededStream& stream,
                                        std::size_t first_row = 0);

// Increments under the drifted Brownian benchmark: coordinates are iid
// N(-mu*alpha/(sigma*n), 1/n).
IncrementSample sample_drifted_bm_increments(const ModelParams& params, std::size_t n,
                                             std::size_t count, const SeededStream& stream,
                                             std::size_t first_row = 0);

// Plain numeric CSV, one matrix row per line, 17 significant digits.
void write_matrix_csv(std::ostream& out, const SymmetricMatrix& matrix);

}  // namespace mfbs
