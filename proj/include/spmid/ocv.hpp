#pragma once

#include <span>
#include <vector>

namespace spmid {

enum class Electrode { Positive, Negative };

/// Open-circuit potential of one electrode sampled against discharge capacity
/// (for example from a GITT experiment), with a shape-preserving cubic
/// interpolant on top.
///
/// Nodal derivatives come from the three-point parabolic formula and are then
/// clipped with the Hyman monotonicity filter, so the interpolant reproduces
/// quadratic data exactly and never overshoots monotone data.
class OcvCurve {
public:
    struct Sample {
        double q;  // discharge capacity, C
        double u;  // potential, V
    };

    OcvCurve(Electrode electrode, std::vector<Sample> samples, double total_capacity);

    Electrode electrode() const noexcept { return electrode_; }
    std::span<const Sample> samples() const noexcept { return samples_; }
    double total_capacity() const noexcept { return total_capacity_; }
    double q_min() const noexcept { return samples_.front().q; }
    double q_max() const noexcept { return samples_.back().q; }

    /// Potential at capacity q; q must lie in [q_min, q_max].
    double value(double q) const;
    /// dU/dq of the interpolant; q must lie strictly inside (q_min, q_max).
    double derivative(double q) const;

    /// Copy of the curve with a centred moving average of odd width applied to
    /// the potentials. The window shrinks symmetrically near the ends.
    OcvCurve smoothed(std::size_t window) const;

private:
    std::size_t segment(double q) const;

    Electrode electrode_;
    std::vector<Sample> samples_;
    std::vector<double> slopes_;  // nodal dU/dq
    double total_capacity_;
};

/// OCV gradients at a linearisation point, in the sign convention of the
/// impedance model: capacity is counted positive on charge, so a cathode whose
/// potential falls during discharge has beta_plus > 0, and a graphite anode
/// whose potential rises during discharge has beta_minus < 0. In terms of the
/// discharge-capacity axis of an OcvCurve: beta_i = -dU_i/dq.
struct OcvSlopes {
    double beta_plus = 0.0;   // V/C
    double beta_minus = 0.0;  // V/C
    double dod = 0.0;
};

double ocv_at(const OcvCurve& curve, double q);

/// dU/dq along the discharge-capacity axis of the curve.
double slope_beta(const OcvCurve& curve, double q);

/// Evaluates both electrode gradients at q = dod * total_capacity and converts
/// them to the model sign convention (see OcvSlopes).
OcvSlopes slopes_at_dod(const OcvCurve& ocv_plus, const OcvCurve& ocv_minus, double dod);

/// Multiplies the electrode gradients by the given factors.
OcvSlopes scaled(const OcvSlopes& s, double scale_plus, double scale_minus = 1.0);

}  // namespace spmid
