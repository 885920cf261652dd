#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "mfbs/errors.hpp"

namespace mfbs {

// Dense symmetric matrix, row-major storage. Symmetry is enforced at
// construction (inputs are averaged with their transpose) and preserved by
// set(), which writes both mirror entries.
class SymmetricMatrix {
public:
    explicit SymmetricMatrix(std::size_t n);
    SymmetricMatrix(std::size_t n, std::vector<double> entries);
    SymmetricMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static SymmetricMatrix identity(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double value);
    const std::vector<double>& entries() const noexcept { return entries_; }

    double trace() const;
    double total_sum() const;
    double max_diagonal() const;

private:
    std::size_t n_;
    std::vector<double> entries_;
};

// Lower-triangular Cholesky factor L with S = L L^T. The log-determinant is
// accumulated pivot by pivot in the log domain, so it stays finite for
// matrices whose determinant under- or overflows.
struct CholeskyFactor {
    std::size_t n = 0;
    std::vector<double> lower;  // row-major n x n, strictly upper part zero
    double logdet = 0.0;

    double at(std::size_t i, std::size_t j) const { return lower[i * n + j]; }

    // Solves L u = b.
    std::vector<double> forward_solve(std::span<const double> b) const;
    // Solves L L^T x = b.
    std::vector<double> solve(std::span<const double> b) const;
    // out = L z, for colored-noise sampling.
    void multiply_lower(std::span<const double> z, std::span<double> out) const;
};

// Throws NotPositiveDefinite when a pivot falls at or below
// n * machine_epsilon * max_diagonal.
CholeskyFactor cholesky_factor(const SymmetricMatrix& matrix);

// All eigenvalues in ascending order. Throws ConvergenceFailure if the
// underlying iteration fails (it does not for well-scaled symmetric input).
std::vector<double> symmetric_eigenvalues(const SymmetricMatrix& matrix);

// Solves matrix * x = rhs for symmetric positive definite input.
std::vector<double> spd_solve(const SymmetricMatrix& matrix, std::span<const double> rhs);

// Counter-based random stream. The i-th draw is a pure function of
// (seed, tag, i): no hidden state, so disjoint index ranges can be generated
// in any order, in chunks, or on different workers with bit-identical
// results. Independent substreams come from derive(), which maps distinct
// subtags to distinct tags.
struct SeededStream {
    std::uint64_t seed = 0;
    std::uint64_t tag = 0;

    SeededStream derive(std::uint64_t subtag) const;
};

// Uniform on the open interval (0,1); never returns 0 or 1.
double uniform_draw(const SeededStream& stream, std::uint64_t index);
// Standard normal via the inverse-CDF map of uniform_draw.
double normal_draw(const SeededStream& stream, std::uint64_t index);

double normal_cdf(double x);
// Wichura's PPND16 rational approximation, |error| < 1e-15 over (0,1).
double inverse_normal_cdf(double p);

}  // namespace mfbs
