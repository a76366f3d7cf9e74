#pragma once

#include <optional>
#include <vector>

#include "spmid/impedance.hpp"

namespace spmid {

struct R0Options {
    double r2_threshold = 0.98;
    std::size_t min_points = 4;
    /// Points above this frequency are discarded before the regression. When
    /// unset, everything above the first local minimum of -Im Z (scanning down
    /// from the highest frequency) is discarded instead.
    std::optional<double> hf_cutoff_hz;
};

struct R0Iteration {
    std::size_t points = 0;
    double r_squared = 0.0;
    double r0 = 0.0;
    double dropped_omega = 0.0;  // lowest-frequency point removed after this fit, 0 if none
};

struct R0Estimate {
    double r0 = 0.0;             // Ohm
    double r_squared = 0.0;
    std::size_t points_used = 0;
    double omega_min_used = 0.0; // rad/s
    std::size_t hf_discarded = 0;
    std::vector<R0Iteration> trace;
};

/// Fits -Im Z = Re Z - R0 (slope fixed at one) by least squares, dropping the
/// lowest-frequency point until the coefficient of determination reaches the
/// threshold. Throws RegressionFailure when fewer than min_points remain.
R0Estimate estimate_r0(const EisSpectrum& spectrum, const R0Options& opts = {});

}  // namespace spmid
