#include "spmid/r0.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spmid/constants.hpp"
#include "spmid/errors.hpp"

namespace spmid {

namespace {

struct LineFit {
    double intercept;  // beta0 = -R0
    double r_squared;
};

LineFit fit_unit_slope(const std::vector<EisPoint>& pts, std::size_t n) {
    double sum_ybar = 0.0;
    double sum_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = pts[i].z.real();
        const double y = -pts[i].z.imag();
        sum_ybar += y - x;
        sum_y += y;
    }
    const double beta0 = sum_ybar / static_cast<double>(n);
    const double y_mean = sum_y / static_cast<double>(n);
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = pts[i].z.real();
        const double y = -pts[i].z.imag();
        const double e = y - (x + beta0);
        ss_res += e * e;
        ss_tot += (y - y_mean) * (y - y_mean);
    }
    double r2;
    if (ss_tot > 0.0) {
        r2 = 1.0 - ss_res / ss_tot;
    } else {
        r2 = ss_res == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
    }
    return {beta0, r2};
}

// Index (in descending-frequency order) of the first interior local minimum of
// -Im Z, or 0 when -Im Z has none.
std::size_t semicircle_junction(const std::vector<EisPoint>& pts) {
    for (std::size_t k = 1; k + 1 < pts.size(); ++k) {
        const double prev = -pts[k - 1].z.imag();
        const double here = -pts[k].z.imag();
        const double next = -pts[k + 1].z.imag();
        if (here < prev && here <= next) return k;
    }
    return 0;
}

}  // namespace

R0Estimate estimate_r0(const EisSpectrum& spectrum, const R0Options& opts) {
    validate(spectrum);
    if (opts.min_points < 2) throw InvalidParameter("min_points must be at least 2");
    if (!(opts.r2_threshold <= 1.0)) throw InvalidParameter("R^2 threshold must be <= 1");

    std::vector<EisPoint> pts = spectrum.points;
    std::sort(pts.begin(), pts.end(),
              [](const EisPoint& a, const EisPoint& b) { return a.omega > b.omega; });

    std::size_t first = 0;
    if (opts.hf_cutoff_hz) {
        const double w_cut = 2.0 * kPi * *opts.hf_cutoff_hz;
        while (first < pts.size() && pts[first].omega > w_cut) ++first;
    } else {
        first = semicircle_junction(pts);
    }
    R0Estimate est;
    est.hf_discarded = first;
    pts.erase(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(first));

    double best_r2 = -std::numeric_limits<double>::infinity();
    std::size_t n = pts.size();
    while (n >= opts.min_points) {
        const LineFit fit = fit_unit_slope(pts, n);
        best_r2 = std::max(best_r2, fit.r_squared);
        R0Iteration it{n, fit.r_squared, -fit.intercept, 0.0};
        if (fit.r_squared >= opts.r2_threshold) {
            est.trace.push_back(it);
            est.r0 = -fit.intercept;
            est.r_squared = fit.r_squared;
            est.points_used = n;
            est.omega_min_used = pts[n - 1].omega;
            return est;
        }
        it.dropped_omega = pts[n - 1].omega;
        est.trace.push_back(it);
        --n;
    }
    throw RegressionFailure("R0 regression did not reach R^2 >= " +
                                std::to_string(opts.r2_threshold) + " with at least " +
                                std::to_string(opts.min_points) + " points (best R^2 " +
                                std::to_string(best_r2) + ")",
                            best_r2);
}

}  // namespace spmid
