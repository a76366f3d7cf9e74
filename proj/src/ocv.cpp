#include "spmid/ocv.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spmid/errors.hpp"

namespace spmid {

namespace {

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// Hyman (1983) filter: keep the estimate when it is consistent with monotone
// data, clip it to three times the smaller adjacent secant otherwise, and zero
// it at local extrema of the data.
double hyman_limit(double d, double left_secant, double right_secant) {
    if (sign(left_secant) * sign(right_secant) <= 0) return 0.0;
    const int s = sign(left_secant);
    const double bound = 3.0 * std::min(std::abs(left_secant), std::abs(right_secant));
    return s * std::min(std::max(0.0, s * d), bound);
}

double endpoint_limit(double d, double secant) {
    if (sign(d) != sign(secant)) return 0.0;
    if (std::abs(d) > 3.0 * std::abs(secant)) return 3.0 * secant;
    return d;
}

}  // namespace

OcvCurve::OcvCurve(Electrode electrode, std::vector<Sample> samples, double total_capacity)
    : electrode_(electrode), samples_(std::move(samples)), total_capacity_(total_capacity) {
    if (samples_.size() < 3) {
        throw InvalidParameter("an OCV curve needs at least 3 samples");
    }
    if (!(total_capacity_ > 0.0) || !std::isfinite(total_capacity_)) {
        throw InvalidParameter("total_capacity must be positive");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!std::isfinite(samples_[i].q) || !std::isfinite(samples_[i].u)) {
            throw InvalidParameter("OCV sample " + std::to_string(i) + " is not finite");
        }
        if (i > 0 && !(samples_[i].q > samples_[i - 1].q)) {
            throw InvalidParameter("OCV capacities must be strictly increasing (sample " +
                                   std::to_string(i) + ")");
        }
    }

    const std::size_t n = samples_.size();
    std::vector<double> h(n - 1), secant(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = samples_[k + 1].q - samples_[k].q;
        secant[k] = (samples_[k + 1].u - samples_[k].u) / h[k];
    }

    slopes_.assign(n, 0.0);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double parabolic =
            (h[k] * secant[k - 1] + h[k - 1] * secant[k]) / (h[k - 1] + h[k]);
        slopes_[k] = hyman_limit(parabolic, secant[k - 1], secant[k]);
    }
    const double d0 = ((2.0 * h[0] + h[1]) * secant[0] - h[0] * secant[1]) / (h[0] + h[1]);
    slopes_[0] = endpoint_limit(d0, secant[0]);
    const std::size_t m = n - 2;
    const double dn = ((2.0 * h[m] + h[m - 1]) * secant[m] - h[m] * secant[m - 1]) /
                      (h[m - 1] + h[m]);
    slopes_[n - 1] = endpoint_limit(dn, secant[m]);
}

std::size_t OcvCurve::segment(double q) const {
    auto it = std::upper_bound(samples_.begin(), samples_.end(), q,
                               [](double v, const Sample& s) { return v < s.q; });
    std::size_t k = static_cast<std::size_t>(it - samples_.begin());
    if (k == 0) return 0;
    return std::min(k - 1, samples_.size() - 2);
}

double OcvCurve::value(double q) const {
    if (!(q >= q_min() && q <= q_max())) {
        throw ExtrapolationError("capacity " + std::to_string(q) + " C outside OCV range [" +
                                 std::to_string(q_min()) + ", " + std::to_string(q_max()) + "]");
    }
    const std::size_t k = segment(q);
    const auto& a = samples_[k];
    const auto& b = samples_[k + 1];
    if (q == a.q) return a.u;
    if (q == b.q) return b.u;
    const double h = b.q - a.q;
    const double t = (q - a.q) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * a.u + (t3 - 2 * t2 + t) * h * slopes_[k] +
           (-2 * t3 + 3 * t2) * b.u + (t3 - t2) * h * slopes_[k + 1];
}

double OcvCurve::derivative(double q) const {
    if (!(q > q_min() && q < q_max())) {
        throw ExtrapolationError("slope requested at capacity " + std::to_string(q) +
                                 " C, which is not strictly inside the OCV range");
    }
    const std::size_t k = segment(q);
    const auto& a = samples_[k];
    const auto& b = samples_[k + 1];
    const double h = b.q - a.q;
    const double t = (q - a.q) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * a.u + (-6 * t2 + 6 * t) * b.u) / h +
           (3 * t2 - 4 * t + 1) * slopes_[k] + (3 * t2 - 2 * t) * slopes_[k + 1];
}

OcvCurve OcvCurve::smoothed(std::size_t window) const {
    if (window % 2 == 0 || window == 0) {
        throw InvalidParameter("smoothing window must be a positive odd number");
    }
    const std::size_t n = samples_.size();
    const std::size_t half = window / 2;
    std::vector<Sample> out(samples_);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t reach = std::min({half, i, n - 1 - i});
        double acc = 0.0;
        for (std::size_t j = i - reach; j <= i + reach; ++j) acc += samples_[j].u;
        out[i].u = acc / static_cast<double>(2 * reach + 1);
    }
    return OcvCurve(electrode_, std::move(out), total_capacity_);
}

double ocv_at(const OcvCurve& curve, double q) { return curve.value(q); }

double slope_beta(const OcvCurve& curve, double q) { return curve.derivative(q); }

OcvSlopes slopes_at_dod(const OcvCurve& ocv_plus, const OcvCurve& ocv_minus, double dod) {
    if (ocv_plus.electrode() != Electrode::Positive || ocv_minus.electrode() != Electrode::Negative) {
        throw InvalidParameter("slopes_at_dod expects (positive, negative) curves");
    }
    const double cp = ocv_plus.total_capacity();
    const double cm = ocv_minus.total_capacity();
    if (std::abs(cp - cm) > 0.01 * std::max(cp, cm)) {
        throw DatasetInconsistency("electrode OCV curves disagree on total capacity (" +
                                   std::to_string(cp) + " vs " + std::to_string(cm) + " C)");
    }
    if (!(dod >= 0.0 && dod <= 1.0)) throw InvalidParameter("dod must lie in [0, 1]");
    OcvSlopes s;
    s.dod = dod;
    s.beta_plus = -slope_beta(ocv_plus, dod * cp);
    s.beta_minus = -slope_beta(ocv_minus, dod * cm);
    return s;
}

OcvSlopes scaled(const OcvSlopes& s, double scale_plus, double scale_minus) {
    OcvSlopes out = s;
    out.beta_plus *= scale_plus;
    out.beta_minus *= scale_minus;
    return out;
}

}  // namespace spmid
