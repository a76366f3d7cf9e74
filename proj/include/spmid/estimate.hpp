#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spmid/impedance.hpp"
#include "spmid/ocv.hpp"
#include "spmid/params.hpp"

namespace spmid {

struct FitEntry {
    EisSpectrum spectrum;
    OcvSlopes slopes;
    std::optional<double> r_ct_fixed;  // Ohm
};

struct FitDataset {
    std::vector<FitEntry> entries;
};

/// At least one entry, distinct DoDs, valid spectra.
void validate(const FitDataset& ds);

enum class RctMode {
    Fixed,       // every entry carries r_ct_fixed
    CoEstimate,  // per-entry R_ct solved in closed form for each (tau+, tau-)
};

/// Sum over frequencies of |Z_data - Z_model|^2 (Ohm^2).
double loss_single(const IdentifiableParams& p, const EisSpectrum& spectrum,
                   const OcvSlopes& slopes);

/// Sum of loss_single over all entries, sharing the two diffusion time
/// constants and using each entry's fixed R_ct. Throws ConfigError if an entry
/// has no R_ct.
double loss_combined(double tau_plus, double tau_minus, const FitDataset& ds);

/// Same as loss_combined but with each entry's R_ct replaced by its
/// least-squares optimum given the taus. R_ct only shifts the real part, so the
/// optimum is the mean real residual of the diffusion-only model.
double loss_profiled(double tau_plus, double tau_minus, const FitDataset& ds,
                     std::vector<double>* r_ct_out = nullptr);

double dataset_loss(double tau_plus, double tau_minus, const FitDataset& ds, RctMode mode);

struct FitOptions {
    RctMode rct_mode = RctMode::Fixed;
    double tau_min = 1.0;       // s, multi-start grid bounds
    double tau_max = 1e5;       // s
    std::size_t starts_per_axis = 5;
    double xtol = 1e-9;         // simplex size in ln(tau)
    double ftol = 1e-10;        // loss spread, relative to the best vertex ...
    double ftol_energy = 1e-20; // ... plus this fraction of sum |Z_data|^2
    std::size_t max_iterations = 4000;
    std::uint64_t seed = 0;     // 0: starts exactly on the grid; otherwise jittered
    double jitter = 0.25;       // max jitter in ln(tau) when seed != 0
    double curvature_step = 0.1;    // ln(tau) step for the flat-direction probe
    double flat_threshold = 1e-3;   // relative curvature below which a direction is flat
    double swap_tolerance = 1e-6;   // relative loss gap to report the swapped candidate
    unsigned threads = 1;
};

struct StartOutcome {
    double start_tau_plus = 0.0;
    double start_tau_minus = 0.0;
    double tau_plus = 0.0;
    double tau_minus = 0.0;
    double loss = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

struct SwapCandidate {
    double tau_plus = 0.0;
    double tau_minus = 0.0;
    double loss = 0.0;
};

struct FitResult {
    double tau_d_plus = 0.0;
    double tau_d_minus = 0.0;
    std::vector<double> r_ct_per_dod;
    std::vector<double> dods;
    double loss = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> per_dod_rms;
    /// Second differences of the loss along ln(tau+) and ln(tau-) at the
    /// optimum, and the flat-direction flags derived from them.
    double curvature_plus = 0.0;
    double curvature_minus = 0.0;
    bool flat_plus = false;
    bool flat_minus = false;
    std::optional<SwapCandidate> swapped;
    std::vector<StartOutcome> starts;
};

/// Multi-start Nelder-Mead over (ln tau+, ln tau-). Throws NonConvergence if no
/// start converges.
FitResult fit(const FitDataset& ds, const FitOptions& opts = {});

struct LogAxis {
    double min = 1.0;
    double max = 1e5;
    std::size_t count = 50;
};

std::vector<double> log_axis_values(const LogAxis& axis);

struct LandscapeOptions {
    LogAxis tau_plus;
    LogAxis tau_minus;
    RctMode rct_mode = RctMode::Fixed;
    double floor = 1e-30;  // Ohm^2, stands in for exactly-zero loss
    unsigned threads = 1;
};

struct LandscapeGrid {
    std::vector<double> tau_plus_axis;
    std::vector<double> tau_minus_axis;
    std::vector<double> ln_loss;  // row-major: [i_plus * n_minus + j_minus]
    std::vector<std::uint8_t> floored;
    std::size_t floored_count = 0;

    double at(std::size_t i_plus, std::size_t j_minus) const {
        return ln_loss[i_plus * tau_minus_axis.size() + j_minus];
    }
};

LandscapeGrid landscape(const FitDataset& ds, const LandscapeOptions& opts);

}  // namespace spmid
