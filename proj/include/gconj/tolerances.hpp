#pragma once

#include <stdexcept>

namespace gconj {

/// Shared numeric tolerances. zero_tol gates "is this zero" decisions
/// (duality gaps, coupling positivity); feasibility_tol gates constraint
/// satisfaction; convexity_tol gates discrete midpoint-convexity checks.
struct ToleranceConfig {
    double zero_tol = 1e-9;
    double feasibility_tol = 1e-9;
    double convexity_tol = 1e-9;

    /// zero_tol must be strictly positive; the others may be zero.
    void validate() const {
        if (!(zero_tol > 0.0)) {
            throw std::invalid_argument("zero_tol must be > 0");
        }
        if (!(feasibility_tol >= 0.0)) {
            throw std::invalid_argument("feasibility_tol must be >= 0");
        }
        if (!(convexity_tol >= 0.0)) {
            throw std::invalid_argument("convexity_tol must be >= 0");
        }
    }
};

}  // namespace gconj
