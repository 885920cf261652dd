#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mfbs/numerics.hpp"

namespace mfbs {

// Density h of exp(sigma * N(0,1)) at x > 0.
double lognormal_density(double x, double sigma);
double log_lognormal_density(double x, double sigma);

// Tilt g(x) = exp(-x) / h(x), assembled in the log domain. g * h = exp(-x),
// so g turns the lognormal marginal into a unit-mean exponential one. Note
// g itself underflows double range for x beyond roughly 750; the log form
// stays finite on all of (0, inf).
double tilt_weight(double x, double sigma);
double log_tilt_weight(double x, double sigma);

// Trapezoid quadrature of g * h over a geometric grid. The omitted tails
// carry less mass than the discretization error, so the result is 1 up to
// about 1e-12 at the default resolution.
double tilt_mass(double sigma, std::size_t nodes = 10000, double x_lo = 1e-12,
                 double x_hi = 1e3);

// One alpha level of the restricted-market experiment: sampled mean of the
// terminal price under the tilted measure (martingale check, target 1), and
// the chance under the original measure of finishing above 1+delta or below
// 1-delta (both stay bounded away from 0 as alpha grows).
struct RestrictedRow {
    double alpha = 0.0;
    double e_s1 = 0.0;
    double e_s1_se = 0.0;
    double up_prob = 0.0;
    double up_prob_se = 0.0;
    double down_prob = 0.0;
    double down_prob_se = 0.0;
};

struct RestrictedReport {
    double sigma = 1.0;
    double delta = 0.1;
    double tilt_mass = 0.0;
    std::size_t samples = 0;
    std::vector<RestrictedRow> rows;
};

// delta in (0,1), alphas strictly increasing and positive, count >= 10000.
RestrictedReport restricted_market_report(double sigma, const std::vector<double>& alphas,
                                          double delta, std::size_t count,
                                          const SeededStream& stream);

void write_restricted_json(std::ostream& out, const RestrictedReport& report,
                           const nlohmann::ordered_json& config);
void write_restricted_csv(std::ostream& out, const RestrictedReport& report,
                          const std::vector<std::pair<std::string, std::string>>& config);

}  // namespace mfbs
