#pragma once

#include <functional>
#include <vector>

namespace spmid {

struct NelderMeadOptions {
    double initial_step = 0.5;
    double xtol = 1e-9;        // max vertex distance from the best vertex (infinity norm)
    double ftol_rel = 1e-10;   // loss spread relative to the best value ...
    double ftol_abs = 0.0;     // ... plus this absolute floor
    std::size_t max_iterations = 4000;
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double diameter = 0.0;
    double spread = 0.0;
};

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2) with an axis-aligned initial simplex. Deterministic.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts = {});

}  // namespace spmid
