#include "spmid/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <thread>

#include "spmid/errors.hpp"
#include "spmid/nelder_mead.hpp"

namespace spmid {

namespace {

// Runs body(i) for i in [0, n). Each index writes only its own output slot, so
// the result does not depend on the thread count.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body body) {
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(workers);
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) body(i);
            } catch (...) {
                failures[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
}

double unit_uniform(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

double data_energy(const FitDataset& ds) {
    double e = 0.0;
    for (const auto& entry : ds.entries) {
        for (const auto& p : entry.spectrum.points) e += std::norm(p.z);
    }
    return e;
}

}  // namespace

void validate(const FitDataset& ds) {
    if (ds.entries.empty()) throw InvalidParameter("fit dataset has no entries");
    std::set<double> dods;
    for (const auto& e : ds.entries) {
        validate(e.spectrum);
        if (!dods.insert(e.spectrum.dod).second) {
            throw DatasetInconsistency("duplicate DoD " + std::to_string(e.spectrum.dod) +
                                       " in fit dataset");
        }
    }
}

double loss_single(const IdentifiableParams& p, const EisSpectrum& spectrum,
                   const OcvSlopes& slopes) {
    double acc = 0.0;
    for (const auto& pt : spectrum.points) {
        acc += std::norm(pt.z - model_impedance(pt.omega, p, slopes));
    }
    return acc;
}

double loss_combined(double tau_plus, double tau_minus, const FitDataset& ds) {
    double acc = 0.0;
    for (std::size_t j = 0; j < ds.entries.size(); ++j) {
        const auto& e = ds.entries[j];
        if (!e.r_ct_fixed) {
            throw ConfigError("entry " + std::to_string(j) + " (dod " +
                              std::to_string(e.spectrum.dod) + ") has no charge-transfer resistance");
        }
        acc += loss_single({tau_plus, tau_minus, *e.r_ct_fixed}, e.spectrum, e.slopes);
    }
    return acc;
}

double loss_profiled(double tau_plus, double tau_minus, const FitDataset& ds,
                     std::vector<double>* r_ct_out) {
    if (r_ct_out) r_ct_out->clear();
    double acc = 0.0;
    for (const auto& e : ds.entries) {
        const IdentifiableParams diffusion_only{tau_plus, tau_minus, 0.0};
        std::vector<cplx> resid;
        resid.reserve(e.spectrum.points.size());
        double mean_re = 0.0;
        for (const auto& pt : e.spectrum.points) {
            resid.push_back(pt.z - model_impedance(pt.omega, diffusion_only, e.slopes));
            mean_re += resid.back().real();
        }
        mean_re /= static_cast<double>(resid.size());
        for (const auto& r : resid) acc += std::norm(r - mean_re);
        if (r_ct_out) r_ct_out->push_back(mean_re);
    }
    return acc;
}

double dataset_loss(double tau_plus, double tau_minus, const FitDataset& ds, RctMode mode) {
    return mode == RctMode::Fixed ? loss_combined(tau_plus, tau_minus, ds)
                                  : loss_profiled(tau_plus, tau_minus, ds);
}

std::vector<double> log_axis_values(const LogAxis& axis) {
    if (axis.count == 0) throw InvalidParameter("axis needs at least one point");
    if (!(axis.min > 0.0) || !(axis.max >= axis.min) || !std::isfinite(axis.max)) {
        throw InvalidParameter("axis bounds must satisfy 0 < min <= max");
    }
    if (axis.count == 1) return {axis.min};
    std::vector<double> v(axis.count);
    const double a = std::log(axis.min);
    const double b = std::log(axis.max);
    for (std::size_t k = 0; k < axis.count; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(axis.count - 1);
        v[k] = std::exp(a + t * (b - a));
    }
    v.front() = axis.min;
    v.back() = axis.max;
    return v;
}

FitResult fit(const FitDataset& ds, const FitOptions& opts) {
    validate(ds);
    if (opts.rct_mode == RctMode::Fixed) {
        for (const auto& e : ds.entries) {
            if (!e.r_ct_fixed) {
                throw ConfigError("fixed R_ct mode requires r_ct_fixed on every entry");
            }
        }
    }
    if (opts.starts_per_axis == 0) throw InvalidParameter("starts_per_axis must be >= 1");

    const auto objective = [&](const std::vector<double>& lx) {
        const double tp = std::exp(lx[0]);
        const double tm = std::exp(lx[1]);
        // the simplex may wander far along a flat direction
        if (!(tp > 0.0 && tm > 0.0 && std::isfinite(tp) && std::isfinite(tm))) {
            return std::numeric_limits<double>::infinity();
        }
        return dataset_loss(tp, tm, ds, opts.rct_mode);
    };

    NelderMeadOptions nm;
    nm.xtol = opts.xtol;
    nm.ftol_rel = opts.ftol;
    nm.ftol_abs = opts.ftol_energy * data_energy(ds);
    nm.max_iterations = opts.max_iterations;

    const auto axis = log_axis_values({opts.tau_min, opts.tau_max, opts.starts_per_axis});
    std::vector<std::pair<double, double>> start_points;  // ln tau
    std::vector<std::pair<double, double>> start_taus;
    std::mt19937_64 gen(opts.seed);
    for (const double ap : axis) {
        for (const double am : axis) {
            double lp = std::log(ap);
            double lm = std::log(am);
            double tp = ap, tm = am;
            if (opts.seed != 0) {
                lp += opts.jitter * (2.0 * unit_uniform(gen) - 1.0);
                lm += opts.jitter * (2.0 * unit_uniform(gen) - 1.0);
                tp = std::exp(lp);
                tm = std::exp(lm);
            }
            start_points.emplace_back(lp, lm);
            start_taus.emplace_back(tp, tm);
        }
    }

    FitResult res;
    res.starts.resize(start_points.size());
    std::vector<double> best_x(start_points.size() * 2);
    parallel_for(start_points.size(), opts.threads, [&](std::size_t i) {
        const auto [lp, lm] = start_points[i];
        const auto r = nelder_mead(objective, {lp, lm}, nm);
        auto& s = res.starts[i];
        s.start_tau_plus = start_taus[i].first;
        s.start_tau_minus = start_taus[i].second;
        s.tau_plus = std::exp(r.x[0]);
        s.tau_minus = std::exp(r.x[1]);
        s.loss = r.fx;
        s.iterations = r.iterations;
        s.converged = r.converged;
        best_x[2 * i] = r.x[0];
        best_x[2 * i + 1] = r.x[1];
    });

    std::size_t best = start_points.size();
    for (std::size_t i = 0; i < res.starts.size(); ++i) {
        if (!res.starts[i].converged) continue;
        if (best == start_points.size() || res.starts[i].loss < res.starts[best].loss) best = i;
    }
    if (best == start_points.size()) {
        double lowest = std::numeric_limits<double>::infinity();
        for (const auto& s : res.starts) lowest = std::min(lowest, s.loss);
        throw NonConvergence("none of the " + std::to_string(res.starts.size()) +
                             " Nelder-Mead starts converged (lowest loss " +
                             std::to_string(lowest) + " Ohm^2)");
    }

    const auto& b = res.starts[best];
    res.tau_d_plus = b.tau_plus;
    res.tau_d_minus = b.tau_minus;
    res.loss = b.loss;
    res.iterations = b.iterations;
    res.converged = true;

    for (const auto& e : ds.entries) res.dods.push_back(e.spectrum.dod);
    if (opts.rct_mode == RctMode::Fixed) {
        for (const auto& e : ds.entries) res.r_ct_per_dod.push_back(*e.r_ct_fixed);
    } else {
        loss_profiled(res.tau_d_plus, res.tau_d_minus, ds, &res.r_ct_per_dod);
    }
    for (std::size_t j = 0; j < ds.entries.size(); ++j) {
        const auto& e = ds.entries[j];
        const IdentifiableParams p{res.tau_d_plus, res.tau_d_minus, res.r_ct_per_dod[j]};
        res.per_dod_rms.push_back(
            std::sqrt(loss_single(p, e.spectrum, e.slopes) / static_cast<double>(e.spectrum.points.size())));
    }

    const double h = opts.curvature_step;
    const double lp = best_x[2 * best];
    const double lm = best_x[2 * best + 1];
    const double centre = objective({lp, lm});
    res.curvature_plus = (objective({lp + h, lm}) - 2.0 * centre + objective({lp - h, lm})) / (h * h);
    res.curvature_minus = (objective({lp, lm + h}) - 2.0 * centre + objective({lp, lm - h})) / (h * h);
    const double stiff = std::max(std::abs(res.curvature_plus), std::abs(res.curvature_minus));
    res.flat_plus = std::abs(res.curvature_plus) <= opts.flat_threshold * stiff;
    res.flat_minus = std::abs(res.curvature_minus) <= opts.flat_threshold * stiff;

    const double swapped_loss = dataset_loss(res.tau_d_minus, res.tau_d_plus, ds, opts.rct_mode);
    if (std::abs(swapped_loss - res.loss) <=
        opts.swap_tolerance * std::max(swapped_loss, res.loss)) {
        res.swapped = SwapCandidate{res.tau_d_minus, res.tau_d_plus, swapped_loss};
    }
    return res;
}

LandscapeGrid landscape(const FitDataset& ds, const LandscapeOptions& opts) {
    validate(ds);
    if (!(opts.floor > 0.0)) throw InvalidParameter("landscape floor must be positive");
    LandscapeGrid g;
    g.tau_plus_axis = log_axis_values(opts.tau_plus);
    g.tau_minus_axis = log_axis_values(opts.tau_minus);
    const std::size_t np = g.tau_plus_axis.size();
    const std::size_t nm = g.tau_minus_axis.size();
    g.ln_loss.assign(np * nm, 0.0);
    g.floored.assign(np * nm, 0);
    if (opts.rct_mode == RctMode::Fixed) loss_combined(g.tau_plus_axis[0], g.tau_minus_axis[0], ds);

    parallel_for(np * nm, opts.threads, [&](std::size_t k) {
        const double l = dataset_loss(g.tau_plus_axis[k / nm], g.tau_minus_axis[k % nm], ds,
                                      opts.rct_mode);
        if (l <= 0.0) {
            g.ln_loss[k] = std::log(opts.floor);
            g.floored[k] = 1;
        } else {
            g.ln_loss[k] = std::log(l);
        }
    });
    g.floored_count = static_cast<std::size_t>(std::count(g.floored.begin(), g.floored.end(), 1));
    return g;
}

}  // namespace spmid
