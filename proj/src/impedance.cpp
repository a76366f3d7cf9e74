#include "spmid/impedance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "spmid/constants.hpp"
#include "spmid/errors.hpp"

namespace spmid {

namespace {

constexpr double kSeriesRadius = 1e-4;  // |s tau| below which the series is used
constexpr double kSaturation = 20.0;    // Re sqrt(s tau) above which tanh == 1

void check_args(cplx s, double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw InvalidParameter("diffusion time constant must be positive, got " +
                               std::to_string(tau));
    }
    if (s == cplx(0.0, 0.0)) {
        throw PoleError("f(s, tau) has a pole at s = 0");
    }
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
        throw InvalidParameter("complex frequency must be finite");
    }
}

}  // namespace

FrequencyGrid::FrequencyGrid(std::vector<double> omegas) : omegas_(std::move(omegas)) {
    if (omegas_.empty()) throw InvalidParameter("frequency grid is empty");
    for (double w : omegas_) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw InvalidParameter("angular frequencies must be finite and positive");
        }
    }
    if (omegas_.size() > 1) {
        const bool up = omegas_[1] > omegas_[0];
        for (std::size_t i = 1; i < omegas_.size(); ++i) {
            const bool ok = up ? omegas_[i] > omegas_[i - 1] : omegas_[i] < omegas_[i - 1];
            if (!ok) throw InvalidParameter("frequency grid must be strictly monotone");
        }
    }
}

FrequencyGrid FrequencyGrid::log_spaced_hz(double f_min_hz, double f_max_hz,
                                           int points_per_decade) {
    if (!(f_min_hz > 0.0) || !(f_max_hz > f_min_hz) || points_per_decade < 1) {
        throw InvalidParameter("log grid needs 0 < f_min < f_max and points_per_decade >= 1");
    }
    const double decades = std::log10(f_max_hz / f_min_hz);
    const auto n = static_cast<std::size_t>(std::floor(decades * points_per_decade + 1e-9)) + 1;
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = f_max_hz * std::pow(10.0, -static_cast<double>(k) / points_per_decade);
        w[k] = 2.0 * kPi * f;
    }
    return FrequencyGrid(std::move(w));
}

void validate(const EisSpectrum& spectrum) {
    if (spectrum.points.empty()) throw InvalidParameter("EIS spectrum has no points");
    std::set<double> seen;
    for (const auto& p : spectrum.points) {
        if (!(p.omega > 0.0) || !std::isfinite(p.omega)) {
            throw InvalidParameter("EIS angular frequencies must be positive");
        }
        if (!std::isfinite(p.z.real()) || !std::isfinite(p.z.imag())) {
            throw InvalidParameter("EIS impedance values must be finite");
        }
        if (!seen.insert(p.omega).second) {
            throw InvalidParameter("duplicate frequency in EIS spectrum");
        }
    }
}

WarburgBranch warburg_branch(cplx s, double tau) {
    const cplx z = s * tau;
    if (std::abs(z) < kSeriesRadius) return WarburgBranch::Series;
    if (std::sqrt(z).real() > kSaturation) return WarburgBranch::Saturated;
    return WarburgBranch::General;
}

cplx warburg_f_branch(cplx s, double tau, WarburgBranch branch) {
    check_args(s, tau);
    const cplx z = s * tau;
    switch (branch) {
        case WarburgBranch::Series:
            return tau * (-1.0 / z - 1.0 / 15.0 + z / 525.0 - 2.0 * z * z / 23625.0);
        case WarburgBranch::Saturated: {
            const cplx x = std::sqrt(z);
            return (tau / 3.0) / (1.0 - x);
        }
        case WarburgBranch::General:
        default: {
            const cplx x = std::sqrt(z);
            // Re x >= 0 on the principal branch, so |exp(-2x)| <= 1.
            const cplx e = std::exp(-2.0 * x);
            const cplx t = (1.0 - e) / (1.0 + e);
            return (tau / 3.0) * t / (t - x);
        }
    }
}

cplx warburg_f(cplx s, double tau) {
    check_args(s, tau);
    return warburg_f_branch(s, tau, warburg_branch(s, tau));
}

cplx diffusion_tf(cplx s, double tau_d, double q_th) {
    if (q_th == 0.0 || !std::isfinite(q_th)) {
        throw DegenerateMapping("theoretical capacity must be finite and non-zero");
    }
    return warburg_f(s, tau_d) / q_th;
}

cplx spm_tf(cplx s, const IdentifiableParams& p, const OcvSlopes& slopes) {
    // Real-scalar products keep a zero slope from contributing anything at all.
    return slopes.beta_plus * warburg_f(s, p.tau_d_plus) -
           slopes.beta_minus * warburg_f(s, p.tau_d_minus) - p.r_ct0;
}

cplx model_impedance(double omega, const IdentifiableParams& p, const OcvSlopes& slopes,
                     double r_extra) {
    return -spm_tf(cplx(0.0, omega), p, slopes) + r_extra;
}

EisSpectrum simulate_eis(const IdentifiableParams& p, const OcvSlopes& slopes,
                         const FrequencyGrid& grid, double r_extra) {
    validate(p);
    EisSpectrum out;
    out.dod = slopes.dod;
    out.points.reserve(grid.size());
    for (double w : grid.omegas()) {
        out.points.push_back({w, model_impedance(w, p, slopes, r_extra)});
    }
    return out;
}

}  // namespace spmid
