#pragma once

#include <complex>
#include <span>
#include <vector>

#include "spmid/ocv.hpp"
#include "spmid/params.hpp"

namespace spmid {

using cplx = std::complex<double>;

/// Strictly positive, strictly monotone set of angular frequencies (rad/s).
class FrequencyGrid {
public:
    explicit FrequencyGrid(std::vector<double> omegas);

    /// Log-spaced grid from f_max_hz down to f_min_hz (inclusive when it lands
    /// on a point), points_per_decade per decade.
    static FrequencyGrid log_spaced_hz(double f_min_hz, double f_max_hz,
                                       int points_per_decade = 6);

    std::span<const double> omegas() const noexcept { return omegas_; }
    std::size_t size() const noexcept { return omegas_.size(); }

private:
    std::vector<double> omegas_;
};

struct EisPoint {
    double omega;  // rad/s
    cplx z;        // Ohm
};

struct EisSpectrum {
    double dod = 0.0;
    std::vector<EisPoint> points;
};

/// Throws InvalidParameter unless all omegas are positive, finite and distinct.
void validate(const EisSpectrum& spectrum);

enum class WarburgBranch { Series, General, Saturated };

/// Branch used by warburg_f for the given arguments.
WarburgBranch warburg_branch(cplx s, double tau);

/// Evaluates one particular branch, whatever the argument. Exposed so the
/// switch points can be checked for continuity.
cplx warburg_f_branch(cplx s, double tau, WarburgBranch branch);

/// f(s, tau) = (tau/3) tanh(sqrt(s tau)) / (tanh(sqrt(s tau)) - sqrt(s tau))
///
/// Near s = 0 numerator and denominator both vanish like x^3, so |s tau| < 1e-4
/// uses the Laurent series -1/s - tau/15 + tau z/525 - 2 tau z^2/23625 with
/// z = s tau. Once Re sqrt(s tau) > 20, tanh is 1 to double precision.
cplx warburg_f(cplx s, double tau);

/// Current-to-surface-stoichiometry transfer function of one spherical
/// particle: f(s, tau_d) / Q_th.
cplx diffusion_tf(cplx s, double tau_d, double q_th);

/// H0(s) = beta+ f(s, tau+) - beta- f(s, tau-) - R_ct
cplx spm_tf(cplx s, const IdentifiableParams& p, const OcvSlopes& slopes);

/// Cell impedance predicted at angular frequency omega. Impedance is the
/// voltage drop per unit discharge current, Z = -H0(i omega) + r_extra, which
/// makes Re Z > 0 and -Im Z > 0 in the diffusion regime.
cplx model_impedance(double omega, const IdentifiableParams& p, const OcvSlopes& slopes,
                     double r_extra = 0.0);

EisSpectrum simulate_eis(const IdentifiableParams& p, const OcvSlopes& slopes,
                         const FrequencyGrid& grid, double r_extra = 0.0);

}  // namespace spmid
