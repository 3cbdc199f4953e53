#pragma once

#include "moskit/config.hpp"
#include "moskit/errors.hpp"
#include "moskit/types.hpp"

#include <utility>
#include <vector>

namespace moskit {

// Constrained fit failed to converge; carries the best feasible iterate.
class SolverError : public Error {
public:
    SolverError(const std::string& msg, MappingCoefficients best)
        : Error(msg), best_feasible(std::move(best)) {}

    MappingCoefficients best_feasible;
};

// Fit y'' = a + b*y + c*y^2 + d*y^3 minimizing sum (x_i - y''_i)^2 subject to
// the derivative being >= 0 at grid_points equally spaced points over
// [min(y), max(y)]. Fewer than 4 distinct predictions fall back to the
// largest determined order (quadratic, linear, or constant mean) under the
// same constraint scheme. The result never scores worse than the identity
// coefficients, nor than the unconstrained least-squares cubic when that
// cubic already satisfies the grid constraint.
MappingCoefficients fit_monotone_cubic(const std::vector<double>& subjective,
                                       const std::vector<double>& predicted,
                                       int grid_points = 1001);

// Element-wise a + b*y + c*y^2 + d*y^3. No clamping.
std::vector<double> apply_mapping(const MappingCoefficients& coeffs,
                                  const std::vector<double>& predicted);

// Fit on this dataset alone, apply, and return the RMSE of the mapped
// predictions together with the coefficients used.
std::pair<double, MappingCoefficients> rmse_map(
    const std::vector<double>& subjective, const std::vector<double>& predicted,
    int grid_points = 1001, RmseDenominator denom = RmseDenominator::n_minus_one);

} // namespace moskit
