#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "mfbs/measures.hpp"
#include "mfbs/model_params.hpp"
#include "mfbs/numerics.hpp"

namespace mfbs {

// Covariances of the normalized log-return increments on the n-point grid:
//   sigma0 = I/n + alpha^2 C_n   (mixed model),
//   sigma1 = I/n + (a_n/n) J     (drifted Brownian benchmark), J all-ones,
// with a_n = mu^2 alpha^2 / (sigma^2 n).
struct ModelMatrices {
    std::size_t n = 0;
    double a_n = 0.0;
    SymmetricMatrix sigma0;
    SymmetricMatrix sigma1;
};

ModelMatrices build_model_matrices(const ModelParams& params, std::size_t n);

// Rank-one structure of sigma1 = I/n + (a_n/n) J, worked out explicitly:
// eigenvalues 1/n (n-1 times) and 1/n + a_n, log-determinant
// log(n a_n + 1) - n log n, inverse n (I - a_n/(n a_n + 1) J).
struct Sigma1ClosedForm {
    std::vector<double> eigenvalues;  // ascending
    double logdet = 0.0;
    SymmetricMatrix inverse;
};

Sigma1ClosedForm sigma1_closed_form(double a_n, std::size_t n);

// The mixed measure N(0, sigma0) on the n-point grid.
GaussianMeasure mixed_measure(const ModelParams& params, std::size_t n);
// The drifted Brownian benchmark N(-(mu alpha / (sigma n)) 1, sigma1).
GaussianMeasure drift_measure(const ModelParams& params, std::size_t n);

// Relative entropy of the mixed measure w.r.t. the drifted benchmark, in
// nats, via the eigenvalues lambda_i of C_n:
//   0.5 * [ sum_i (n a^2 l_i - log(1 + n a^2 l_i))
//           - mu^2 a^4 / (mu^2 a^2 + sigma^2) + log((mu^2 a^2 + sigma^2)/sigma^2) ].
// Defined for n >= 2, and for n = 1 when mu = 0.
double relative_entropy_grid(const ModelParams& params, std::size_t n);

// 0.5 * (theta_n alpha^2 - n log(1 + n alpha^2 lambda_max)) with
// theta_n = n^{2-2H} - 1; a lower bound on relative_entropy_grid that
// diverges with alpha. Requires n >= 2.
double entropy_lower_bound(const ModelParams& params, std::size_t n);

// Difference between H(mixed | drifted benchmark) and
// H(mixed | Wiener) - 0.5 mu^2 a^4/(mu^2 a^2 + sigma^2)
//                   + 0.5 log((mu^2 a^2 + sigma^2)/sigma^2),
// both sides evaluated through the generic Gaussian entropy. Zero up to
// rounding for all valid parameters.
double wiener_relation_residual(const ModelParams& params, std::size_t n);

struct EntropyRow {
    double alpha = 0.0;
    std::size_t n = 0;
    double entropy = 0.0;
    double lower_bound = 0.0;
    double entropy_wrt_wiener = 0.0;
    double theta_n = 0.0;
    double lambda_max = 0.0;
    double loglr_variance = 0.0;
};

struct SweepParams {
    double hurst = 0.8;
    double mu = 0.0;
    double sigma = 1.0;
};

// One row per alpha, alphas strictly increasing and positive. n >= 2.
std::vector<EntropyRow> entropy_sweep(const SweepParams& family, std::size_t n,
                                      const std::vector<double>& alphas);

std::vector<SweepPoint> sweep_points(const std::vector<EntropyRow>& rows);

// CSV with one leading `# key=value` comment per config entry.
void write_sweep_csv(std::ostream& out, const SweepParams& family,
                     const std::vector<EntropyRow>& rows,
                     const std::vector<std::pair<std::string, std::string>>& config);

}  // namespace mfbs
