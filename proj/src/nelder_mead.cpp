#include "spmid/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace spmid {

namespace {

double guarded(const std::function<double(const std::vector<double>&)>& f,
               const std::vector<double>& x) {
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += opts.initial_step;
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = guarded(f, simplex[i]);

    std::vector<std::size_t> order(n + 1);
    NelderMeadResult res;
    auto point = [n](const std::vector<double>& c, const std::vector<double>& w, double t) {
        std::vector<double> p(n);
        for (std::size_t j = 0; j < n; ++j) p[j] = c[j] + t * (w[j] - c[j]);
        return p;
    };

    for (std::size_t iter = 0;; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        // Stable sort keeps ties in index order, so the run is reproducible.
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        {
            std::vector<std::vector<double>> s2(n + 1);
            std::vector<double> f2(n + 1);
            for (std::size_t i = 0; i <= n; ++i) {
                s2[i] = simplex[order[i]];
                f2[i] = fv[order[i]];
            }
            simplex.swap(s2);
            fv.swap(f2);
        }

        double diameter = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[0][j]));
            }
        }
        const double spread = fv[n] - fv[0];
        res.diameter = diameter;
        res.spread = spread;
        res.iterations = iter;
        if (diameter < opts.xtol &&
            spread <= opts.ftol_rel * std::abs(fv[0]) + opts.ftol_abs) {
            res.converged = true;
            break;
        }
        if (iter >= opts.max_iterations) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
        }
        const auto& worst = simplex[n];
        const auto xr = point(centroid, worst, -1.0);
        const double fr = guarded(f, xr);
        if (fr < fv[0]) {
            const auto xe = point(centroid, worst, -2.0);
            const double fe = guarded(f, xe);
            if (fe < fr) {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
            continue;
        }
        if (fr < fv[n - 1]) {
            simplex[n] = xr;
            fv[n] = fr;
            continue;
        }
        if (fr < fv[n]) {
            const auto xc = point(centroid, worst, -0.5);
            const double fc = guarded(f, xc);
            if (fc <= fr) {
                simplex[n] = xc;
                fv[n] = fc;
                continue;
            }
        } else {
            const auto xc = point(centroid, worst, 0.5);
            const double fc = guarded(f, xc);
            if (fc < fv[n]) {
                simplex[n] = xc;
                fv[n] = fc;
                continue;
            }
        }
        for (std::size_t i = 1; i <= n; ++i) {
            simplex[i] = point(simplex[0], simplex[i], 0.5);
            fv[i] = guarded(f, simplex[i]);
        }
    }
    res.x = simplex[0];
    res.fx = fv[0];
    return res;
}

}  // namespace spmid
