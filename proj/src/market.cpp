#include "mfbs/market.hpp"

#include "mfbs/fbm.hpp"
#include "mfbs/format.hpp"

#include <cmath>
#include <ostream>
#include <string>
#include <utility>

namespace mfbs {

namespace {

double a_n_value(const ModelParams& params, std::size_t n) {
    const double r = params.drift_ratio();
    return r * r / static_cast<double>(n);
}

// Drift block of the entropy: -mu^2 a^4/(mu^2 a^2 + sigma^2)
// + log((mu^2 a^2 + sigma^2)/sigma^2), written through r = (mu a / sigma)^2.
double drift_block(const ModelParams& params) {
    const double r = params.drift_ratio() * params.drift_ratio();
    return -r * params.alpha * params.alpha / (r + 1.0) + std::log1p(r);
}

double entropy_from_eigenvalues(const std::vector<double>& lambdas, std::size_t n,
                                const ModelParams& params) {
    const double na2 = static_cast<double>(n) * params.alpha * params.alpha;
    double spectral = 0.0;
    for (double l : lambdas) {
        const double x = na2 * l;
        spectral += x - std::log1p(x);
    }
    return 0.5 * (spectral + drift_block(params));
}

}  // namespace

ModelMatrices build_model_matrices(const ModelParams& params, std::size_t n) {
    params.validate();
    if (n == 0) throw DomainError("grid size must be at least 1");

    const FbmCovariance cov = fbm_increment_covariance(params.hurst, n);
    const double inv_n = 1.0 / static_cast<double>(n);
    const double alpha_sq = params.alpha * params.alpha;

    ModelMatrices out{n, a_n_value(params, n), SymmetricMatrix(n), SymmetricMatrix(n)};
    const double off = out.a_n * inv_n;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double base = (i == j) ? inv_n : 0.0;
            out.sigma0.set(i, j, base + alpha_sq * cov.matrix(i, j));
            out.sigma1.set(i, j, base + off);
        }
    }
    return out;
}

Sigma1ClosedForm sigma1_closed_form(double a_n, std::size_t n) {
    if (n == 0) throw DomainError("grid size must be at least 1");
    if (!(a_n >= 0.0)) throw DomainError("a_n must be nonnegative, got " + std::to_string(a_n));

    const double nd = static_cast<double>(n);
    const double inv_n = 1.0 / nd;

    Sigma1ClosedForm out{std::vector<double>(n, inv_n), 0.0, SymmetricMatrix(n)};
    out.eigenvalues[n - 1] = inv_n + a_n;
    out.logdet = std::log1p(nd * a_n) - nd * std::log(nd);

    const double off = -nd * a_n / (nd * a_n + 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            out.inverse.set(i, j, (i == j) ? nd + off : off);
    return out;
}

GaussianMeasure mixed_measure(const ModelParams& params, std::size_t n) {
    ModelMatrices mats = build_model_matrices(params, n);
    return GaussianMeasure(std::vector<double>(n, 0.0), std::move(mats.sigma0));
}

GaussianMeasure drift_measure(const ModelParams& params, std::size_t n) {
    ModelMatrices mats = build_model_matrices(params, n);
    const double mean = -params.drift_ratio() / static_cast<double>(n);
    return GaussianMeasure(std::vector<double>(n, mean), std::move(mats.sigma1));
}

double relative_entropy_grid(const ModelParams& params, std::size_t n) {
    params.validate();
    if (n == 0) throw DomainError("grid size must be at least 1");
    if (n == 1 && params.mu != 0.0)
        throw DomainError("the single-point grid is covered only for mu = 0");

    const FbmCovariance cov = fbm_increment_covariance(params.hurst, n);
    return entropy_from_eigenvalues(symmetric_eigenvalues(cov.matrix), n, params);
}

double entropy_lower_bound(const ModelParams& params, std::size_t n) {
    params.validate();
    if (n < 2) throw DomainError("the entropy lower bound needs n >= 2");

    const double nd = static_cast<double>(n);
    const double theta = std::pow(nd, 2.0 - 2.0 * params.hurst) - 1.0;
    const FbmCovariance cov = fbm_increment_covariance(params.hurst, n);
    const double lambda_max = symmetric_eigenvalues(cov.matrix).back();
    const double alpha_sq = params.alpha * params.alpha;
    return 0.5 * (theta * alpha_sq - nd * std::log1p(nd * alpha_sq * lambda_max));
}

double wiener_relation_residual(const ModelParams& params, std::size_t n) {
    params.validate();
    if (n < 2) throw DomainError("the drift-removal identity is checked for n >= 2");

    const GaussianMeasure mixed = mixed_measure(params, n);
    const GaussianMeasure drifted = drift_measure(params, n);

    SymmetricMatrix wiener_cov(n);
    for (std::size_t i = 0; i < n; ++i) wiener_cov.set(i, i, 1.0 / static_cast<double>(n));
    const GaussianMeasure wiener(std::vector<double>(n, 0.0), std::move(wiener_cov));

    const double lhs = gaussian_kl(mixed, drifted);
    const double rhs = gaussian_kl(mixed, wiener) + 0.5 * drift_block(params);
    return lhs - rhs;
}

std::vector<EntropyRow> entropy_sweep(const SweepParams& family, std::size_t n,
                                      const std::vector<double>& alphas) {
    if (n < 2) throw DomainError("entropy sweep needs n >= 2");
    if (alphas.empty()) throw InvalidGrid("alpha grid is empty");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] > 0.0)) throw InvalidGrid("alpha grid entries must be positive");
        if (i > 0 && !(alphas[i] > alphas[i - 1]))
            throw InvalidGrid("alpha grid must be strictly increasing");
    }

    const FbmCovariance cov = fbm_increment_covariance(family.hurst, n);
    const std::vector<double> lambdas = symmetric_eigenvalues(cov.matrix);
    const double nd = static_cast<double>(n);
    const double theta = std::pow(nd, 2.0 - 2.0 * family.hurst) - 1.0;
    const double lambda_max = lambdas.back();

    std::vector<EntropyRow> rows;
    rows.reserve(alphas.size());
    for (double alpha : alphas) {
        const ModelParams params{family.hurst, alpha, family.mu, family.sigma};
        params.validate();

        EntropyRow row;
        row.alpha = alpha;
        row.n = n;
        row.entropy = entropy_from_eigenvalues(lambdas, n, params);
        row.lower_bound =
            0.5 * (theta * alpha * alpha - nd * std::log1p(nd * alpha * alpha * lambda_max));

        const ModelParams driftless{family.hurst, alpha, 0.0, family.sigma};
        row.entropy_wrt_wiener = entropy_from_eigenvalues(lambdas, n, driftless);

        row.theta_n = theta;
        row.lambda_max = lambda_max;
        row.loglr_variance = loglr_moments(mixed_measure(params, n), drift_measure(params, n)).variance;
        rows.push_back(row);
    }
    return rows;
}

std::vector<SweepPoint> sweep_points(const std::vector<EntropyRow>& rows) {
    std::vector<SweepPoint> points;
    points.reserve(rows.size());
    for (const auto& row : rows)
        points.push_back({row.alpha, row.entropy, row.loglr_variance});
    return points;
}

void write_sweep_csv(std::ostream& out, const SweepParams& family,
                     const std::vector<EntropyRow>& rows,
                     const std::vector<std::pair<std::string, std::string>>& config) {
    for (const auto& [key, value] : config) out << "# " << key << '=' << value << '\n';
    out << "alpha,n,H,mu,sigma,entropy_nats,lower_bound_nats,entropy_wiener_nats,"
           "theta_n,lambda_max,loglr_variance\n";
    for (const auto& row : rows) {
        out << csv_double(row.alpha) << ',' << row.n << ',' << csv_double(family.hurst) << ','
            << csv_double(family.mu) << ',' << csv_double(family.sigma) << ','
            << csv_double(row.entropy) << ',' << csv_double(row.lower_bound) << ','
            << csv_double(row.entropy_wrt_wiener) << ',' << csv_double(row.theta_n) << ','
            << csv_double(row.lambda_max) << ',' << csv_double(row.loglr_variance) << '\n';
    }
}

}  // namespace mfbs
