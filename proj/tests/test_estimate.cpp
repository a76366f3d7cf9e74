#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "spmid/errors.hpp"
#include "spmid/estimate.hpp"
#include "spmid/nelder_mead.hpp"
#include "support.hpp"

using namespace spmid;
using spmid::testing::rel_err;

namespace {

constexpr double kTauPlus = 7.225;
constexpr double kTauMinus = 2840.9090909090909;

const FrequencyGrid& grid() {
    static const FrequencyGrid g = FrequencyGrid::log_spaced_hz(2e-4, 5e3, 6);
    return g;
}

FitEntry entry(const OcvSlopes& s, double r_ct, double tp = kTauPlus, double tm = kTauMinus) {
    return {simulate_eis({tp, tm, r_ct}, s, grid()), s, r_ct};
}

FitDataset lco_dataset() {
    const auto ocv = spmid::testing::fixture_ocv();
    FitDataset ds;
    const double rct[] = {0.055, 0.0506, 0.0487, 0.0513};
    const double dods[] = {0.05, 0.25, 0.75, 0.95};
    for (int k = 0; k < 4; ++k) ds.entries.push_back(entry(slopes_at_dod(ocv.plus, ocv.minus, dods[k]), rct[k]));
    return ds;
}

FitDataset symmetric_dataset(double tp, double tm) {
    FitDataset ds;
    ds.entries.push_back(entry({2e-4, -2e-4, 0.75}, 0.05, tp, tm));
    return ds;
}

}  // namespace

TEST_CASE("single-spectrum loss") {
    const auto ocv = spmid::testing::fixture_ocv();
    const OcvSlopes s = slopes_at_dod(ocv.plus, ocv.minus, 0.25);
    const IdentifiableParams p{kTauPlus, kTauMinus, 0.05};
    const EisSpectrum e = simulate_eis(p, s, grid());
    CHECK(loss_single(p, e, s) <= 1e-20);
    CHECK(loss_single({1.5 * kTauPlus, kTauMinus, 0.05}, e, s) > 0.0);

    // Real and imaginary errors add.
    EisSpectrum shifted = e;
    for (auto& pt : shifted.points) pt.z += cplx(1e-3, -2e-3);
    CHECK(loss_single(p, shifted, s) == doctest::Approx(e.points.size() * 5e-6).epsilon(1e-9));
}

TEST_CASE("combined loss") {
    const FitDataset ds = lco_dataset();
    FitDataset one;
    one.entries.push_back(ds.entries[1]);
    CHECK(loss_combined(20.0, 500.0, one) ==
          loss_single({20.0, 500.0, *one.entries[0].r_ct_fixed}, one.entries[0].spectrum,
                      one.entries[0].slopes));
    CHECK(loss_combined(kTauPlus, kTauMinus, ds) <= 1e-20);
    CHECK(loss_combined(kTauMinus, kTauPlus, ds) > 1e-8);

    FitDataset shuffled = ds;
    std::reverse(shuffled.entries.begin(), shuffled.entries.end());
    for (auto& e : shuffled.entries) std::reverse(e.spectrum.points.begin(), e.spectrum.points.end());
    const double a = loss_combined(30.0, 900.0, ds);
    CHECK(loss_combined(30.0, 900.0, shuffled) == doctest::Approx(a).epsilon(1e-13));

    FitDataset missing = ds;
    missing.entries[2].r_ct_fixed.reset();
    CHECK_THROWS_AS(loss_combined(1.0, 1.0, missing), ConfigError);
    CHECK_THROWS_AS(fit(missing), ConfigError);
}

TEST_CASE("swap symmetry of the loss") {
    const FitDataset ds = symmetric_dataset(40.0, 900.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int k = 0; k < 50; ++k) {
        const double a = std::pow(10.0, u(rng));
        const double b = std::pow(10.0, u(rng));
        CHECK(loss_combined(a, b, ds) == loss_combined(b, a, ds));
    }
}

TEST_CASE("profiled loss matches the best fixed resistance") {
    FitDataset ds = lco_dataset();
    for (auto& e : ds.entries) e.r_ct_fixed.reset();
    std::vector<double> rct;
    const double lp = loss_profiled(12.0, 2000.0, ds, &rct);
    REQUIRE(rct.size() == 4);
    FitDataset fixed = ds;
    for (std::size_t j = 0; j < 4; ++j) fixed.entries[j].r_ct_fixed = rct[j];
    CHECK(loss_combined(12.0, 2000.0, fixed) == doctest::Approx(lp).epsilon(1e-12));
    for (double d : {-1e-3, 1e-3}) {
        for (std::size_t j = 0; j < 4; ++j) {
            FitDataset nudged = fixed;
            *nudged.entries[j].r_ct_fixed += d;
            CHECK(loss_combined(12.0, 2000.0, nudged) > lp);
        }
    }
    CHECK(loss_profiled(kTauPlus, kTauMinus, ds, &rct) <= 1e-20);
    CHECK(rct[1] == doctest::Approx(0.0506).epsilon(1e-9));
}

TEST_CASE("dataset validation") {
    CHECK_THROWS_AS(fit(FitDataset{}), InvalidParameter);
    FitDataset dup = lco_dataset();
    dup.entries[1].spectrum.dod = dup.entries[0].spectrum.dod;
    CHECK_THROWS_AS(fit(dup), DatasetInconsistency);
    FitOptions o;
    o.starts_per_axis = 0;
    CHECK_THROWS_AS(fit(lco_dataset(), o), InvalidParameter);
}

TEST_CASE("Nelder-Mead on a curved valley") {
    auto rosen = [](const std::vector<double>& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    NelderMeadOptions o;
    o.ftol_abs = 1e-30;
    const auto r = nelder_mead(rosen, {-1.2, 1.0}, o);
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.diameter < o.xtol);

    o.max_iterations = 5;
    const auto short_run = nelder_mead(rosen, {-1.2, 1.0}, o);
    CHECK_FALSE(short_run.converged);
    CHECK(short_run.iterations == 5);

    // NaN is treated as a very bad value rather than poisoning the simplex.
    auto holey = [](const std::vector<double>& x) {
        return x[0] < -0.5 ? std::nan("") : (x[0] - 1.0) * (x[0] - 1.0) + x[1] * x[1];
    };
    const auto h = nelder_mead(holey, {0.0, 0.3}, NelderMeadOptions{});
    CHECK(h.x[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("fit recovers the generating time constants") {
    const FitDataset ds = lco_dataset();
    const FitResult r = fit(ds);
    CHECK(r.converged);
    CHECK(rel_err(r.tau_d_plus, kTauPlus) < 0.01);
    CHECK(rel_err(r.tau_d_minus, kTauMinus) < 0.01);
    CHECK(r.loss < 1e-12);
    CHECK(r.starts.size() == 25);
    CHECK(r.dods == std::vector<double>{0.05, 0.25, 0.75, 0.95});
    CHECK(r.r_ct_per_dod[2] == 0.0487);
    for (double rms : r.per_dod_rms) CHECK(rms < 1e-6);
    CHECK_FALSE(r.swapped.has_value());
    CHECK(r.tau_d_plus > 0.0);
}

TEST_CASE("fit is independent of the thread count and repeatable per seed") {
    const FitDataset ds = lco_dataset();
    FitOptions o;
    o.seed = 99;
    const FitResult a = fit(ds, o);
    o.threads = 3;
    const FitResult b = fit(ds, o);
    CHECK(a.tau_d_plus == b.tau_d_plus);
    CHECK(a.tau_d_minus == b.tau_d_minus);
    CHECK(a.loss == b.loss);
    REQUIRE(a.starts.size() == b.starts.size());
    for (std::size_t i = 0; i < a.starts.size(); ++i) {
        CHECK(a.starts[i].start_tau_plus == b.starts[i].start_tau_plus);
        CHECK(a.starts[i].loss == b.starts[i].loss);
    }
    // A different seed moves the starts but not the answer.
    o.seed = 100;
    const FitResult c = fit(ds, o);
    CHECK(c.starts[3].start_tau_plus != a.starts[3].start_tau_plus);
    CHECK(rel_err(c.tau_d_minus, kTauMinus) < 0.01);
    // Seed zero starts exactly on the grid.
    const FitResult d = fit(ds);
    CHECK(d.starts[0].start_tau_plus == 1.0);
    CHECK(d.starts[24].start_tau_minus == 1e5);
}

TEST_CASE("co-estimated resistances") {
    FitDataset ds = lco_dataset();
    for (auto& e : ds.entries) e.r_ct_fixed.reset();
    FitOptions o;
    o.rct_mode = RctMode::CoEstimate;
    const FitResult r = fit(ds, o);
    CHECK(rel_err(r.tau_d_plus, kTauPlus) < 0.01);
    CHECK(rel_err(r.tau_d_minus, kTauMinus) < 0.01);
    REQUIRE(r.r_ct_per_dod.size() == 4);
    CHECK(r.r_ct_per_dod[0] == doctest::Approx(0.055).epsilon(1e-6));
    CHECK(r.r_ct_per_dod[3] == doctest::Approx(0.0513).epsilon(1e-6));
}

TEST_CASE("flat anode is reported as a flat direction") {
    FitDataset ds;
    ds.entries.push_back(entry({2e-4, 0.0, 0.25}, 0.05));
    const FitResult r = fit(ds);
    CHECK(r.flat_minus);
    CHECK_FALSE(r.flat_plus);
    CHECK(rel_err(r.tau_d_plus, kTauPlus) < 0.01);
}

TEST_CASE("equal slopes give two swapped minima") {
    // Seeded noise keeps the minimum loss away from zero so equality is meaningful.
    FitDataset ds = symmetric_dataset(40.0, 900.0);
    std::mt19937_64 rng(21);
    std::normal_distribution<double> noise(0.0, 1e-5);
    for (auto& pt : ds.entries[0].spectrum.points) pt.z += cplx(noise(rng), noise(rng));
    const FitResult r = fit(ds);
    REQUIRE(r.swapped.has_value());
    CHECK(r.swapped->tau_plus == r.tau_d_minus);
    CHECK(r.swapped->tau_minus == r.tau_d_plus);
    // Individual starts land on both orderings with the same loss.
    const StartOutcome* lo = nullptr;
    const StartOutcome* hi = nullptr;
    for (const auto& s : r.starts) {
        if (!s.converged) continue;
        if (rel_err(s.tau_plus, 40.0) < 0.01 && rel_err(s.tau_minus, 900.0) < 0.01) lo = &s;
        if (rel_err(s.tau_plus, 900.0) < 0.01 && rel_err(s.tau_minus, 40.0) < 0.01) hi = &s;
    }
    REQUIRE(lo != nullptr);
    REQUIRE(hi != nullptr);
    CHECK(lo->loss > 0.0);
    CHECK(std::abs(lo->loss - hi->loss) <= 1e-10 * std::max(lo->loss, hi->loss));
}

TEST_CASE("fit reports non-convergence") {
    FitOptions o;
    o.max_iterations = 3;
    CHECK_THROWS_AS(fit(lco_dataset(), o), NonConvergence);
}

TEST_CASE("landscape grid") {
    const FitDataset ds = lco_dataset();
    LandscapeOptions o;
    o.tau_plus = {kTauPlus, kTauPlus, 1};
    o.tau_minus = {500.0, 500.0, 1};
    const LandscapeGrid one = landscape(ds, o);
    REQUIRE(one.ln_loss.size() == 1);
    CHECK(one.at(0, 0) == std::log(loss_combined(kTauPlus, 500.0, ds)));

    // Axes with the generating values on grid nodes.
    o.tau_plus = {kTauPlus / 10.0, kTauPlus * 1e4, 21};
    o.tau_minus = {kTauMinus / 1e3, kTauMinus * 1e2, 21};
    const LandscapeGrid g = landscape(ds, o);
    CHECK(g.tau_plus_axis.size() == 21);
    CHECK(g.tau_minus_axis.size() == 21);
    CHECK(g.ln_loss.size() == 21 * 21);
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < 21; ++i) {
        for (std::size_t j = 0; j < 21; ++j) {
            if (g.at(i, j) < g.at(bi, bj)) { bi = i; bj = j; }
        }
    }
    auto nearest = [](const std::vector<double>& axis, double v) {
        std::size_t k = 0;
        for (std::size_t i = 1; i < axis.size(); ++i) {
            if (std::abs(std::log(axis[i] / v)) < std::abs(std::log(axis[k] / v))) k = i;
        }
        return k;
    };
    CHECK(std::abs(static_cast<long>(bi) - static_cast<long>(nearest(g.tau_plus_axis, kTauPlus))) <= 1);
    CHECK(std::abs(static_cast<long>(bj) - static_cast<long>(nearest(g.tau_minus_axis, kTauMinus))) <= 1);

    o.threads = 4;
    const LandscapeGrid g4 = landscape(ds, o);
    CHECK(g4.ln_loss == g.ln_loss);
}

TEST_CASE("landscape floors exact zeros") {
    FitDataset ds;
    ds.entries.push_back(entry({2e-4, -1e-5, 0.3}, 0.02, 10.0, 100.0));
    LandscapeOptions o;
    o.tau_plus = {10.0, 10.0, 1};
    o.tau_minus = {1.0, 100.0, 3};
    o.floor = 1e-40;
    const LandscapeGrid g = landscape(ds, o);
    CHECK(g.floored_count == 1);
    CHECK(g.floored[2] == 1);
    CHECK(g.at(0, 2) == std::log(1e-40));
    CHECK(g.at(0, 1) > std::log(1e-40));

    FitDataset no_rct = ds;
    no_rct.entries[0].r_ct_fixed.reset();
    CHECK_THROWS_AS(landscape(no_rct, o), ConfigError);
    o.rct_mode = RctMode::CoEstimate;
    CHECK_NOTHROW(landscape(no_rct, o));
    o.floor = 0.0;
    CHECK_THROWS_AS(landscape(ds, o), InvalidParameter);
}

TEST_CASE("equal-magnitude slopes give mirrored landscape minima") {
    const FitDataset ds = symmetric_dataset(40.0, 900.0);
    LandscapeOptions o;
    o.tau_plus = {1.0, 1e4, 41};
    o.tau_minus = o.tau_plus;
    const LandscapeGrid g = landscape(ds, o);
    for (std::size_t i = 0; i < 41; ++i) {
        for (std::size_t j = 0; j < 41; ++j) CHECK(g.at(i, j) == g.at(j, i));
    }
}

TEST_CASE("log axes") {
    const auto v = log_axis_values({1.0, 1e4, 5});
    CHECK(v.front() == 1.0);
    CHECK(v.back() == 1e4);
    CHECK(v[2] == doctest::Approx(100.0).epsilon(1e-14));
    CHECK_THROWS_AS(log_axis_values({1.0, 1e4, 0}), InvalidParameter);
    CHECK_THROWS_AS(log_axis_values({0.0, 1e4, 3}), InvalidParameter);
    CHECK_THROWS_AS(log_axis_values({10.0, 1.0, 3}), InvalidParameter);
}
