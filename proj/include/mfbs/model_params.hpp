#pragma once

#include "mfbs/errors.hpp"

#include <string>

namespace mfbs {

// Parameters of the mixed fractional model on [0,1]: the driver is
// sigma * (B + alpha * B^H) and the trend is mu * t. The Hurst index is kept
// above 3/4 so that the mixed log-price stays equivalent to a Brownian one
// at each fixed scale.
struct ModelParams {
    double hurst = 0.8;
    double alpha = 1.0;
    double mu = 0.0;
    double sigma = 1.0;

    void validate() const {
        if (!(hurst > 0.75 && hurst < 1.0))
            throw DomainError("hurst must lie in (0.75, 1), got " + std::to_string(hurst));
        if (!(alpha > 0.0))
            throw DomainError("alpha must be positive, got " + std::to_string(alpha));
        if (!(sigma > 0.0))
            throw DomainError("sigma must be positive, got " + std::to_string(sigma));
    }

    // mu * alpha / sigma, the drift scale that the equivalent-change-of-drift
    // argument attaches to the Brownian side.
    double drift_ratio() const { return mu * alpha / sigma; }
};

}  // namespace mfbs
