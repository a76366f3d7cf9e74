#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "doctest.h"
#include "spmid/constants.hpp"
#include "spmid/errors.hpp"
#include "spmid/impedance.hpp"
#include "spmid/timedomain.hpp"

using namespace spmid;

namespace {

// Complex gain V/I of the simulated steady-state response to I = cos(w t),
// projected over the last three periods.
cplx sinusoid_gain(double tau_plus, double tau_minus, const OcvSlopes& s, double r0, double w,
                   int n_points) {
    const double period = 2.0 * kPi / w;
    const double dt = period / 2000.0;
    const double settle = std::max(2.0 * period, 5.0 * std::max(tau_plus, tau_minus) / 20.0);
    const auto settle_steps = static_cast<std::size_t>(std::ceil(settle / dt));
    const std::size_t total = settle_steps + 3 * 2000;
    std::vector<CurrentProfile::Sample> samples;
    samples.reserve(total + 1);
    for (std::size_t k = 0; k <= total; ++k) {
        const double t = static_cast<double>(k) * dt;
        samples.push_back({t, std::cos(w * (t + 0.5 * dt))});
    }
    CollocationModel m(tau_plus, tau_minus, n_points);
    const TimeSeries ts = simulate(m, s, r0, CurrentProfile(samples), dt);
    double a = 0.0, b = 0.0;
    for (std::size_t k = total - 3 * 2000; k < total; ++k) {
        a += ts.v_dev[k] * std::cos(w * ts.t[k]);
        b += ts.v_dev[k] * std::sin(w * ts.t[k]);
    }
    a *= 2.0 / (3 * 2000);
    b *= 2.0 / (3 * 2000);
    return {a, -b};
}

}  // namespace

TEST_CASE("collocation operators are exact on low-order polynomials") {
    const auto c = ChebyshevNodes::make(20);
    const Eigen::VectorXd r2 = c.r.array().square();
    const Eigen::VectorXd r3 = c.r.array().cube();
    const Eigen::VectorXd d2r2 = c.d2 * r2;
    const Eigen::VectorXd d2r3 = c.d2 * r3;
    for (int j = 1; j < 19; ++j) {
        CHECK(std::abs(d2r2[j] - 2.0) < 1e-10);
        CHECK(std::abs(d2r3[j] - 6.0 * c.r[j]) < 1e-9);
    }
    CHECK(c.r[0] == 0.0);
    CHECK(c.r[19] == doctest::Approx(1.0).epsilon(1e-15));
    // Quadrature integrates r^k exactly on [0, 1].
    for (int k = 0; k <= 10; ++k) {
        const double q = c.weights.dot(c.r.array().pow(k).matrix());
        CHECK(q == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
}

TEST_CASE("model construction") {
    CHECK_THROWS_AS(CollocationModel(1.0, 1.0, 7), ResolutionError);
    CHECK_NOTHROW(CollocationModel(1.0, 1.0, 8));
    CHECK_THROWS_AS(CollocationModel(0.0, 1.0), InvalidParameter);
    const CollocationModel m = build_model(20.0, 50.0);
    CHECK(m.n_points() == 20);
    for (const auto* e : {&m.positive(), &m.negative()}) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(e->a);
        for (int k = 0; k < es.eigenvalues().size(); ++k) CHECK(es.eigenvalues()[k].real() <= 1e-9);
    }
}

TEST_CASE("current profile") {
    const CurrentProfile p({{0.0, 1.0}, {2.0, -3.0}, {5.0, 0.5}});
    CHECK(p.at(0.0) == 1.0);
    CHECK(p.at(1.999) == 1.0);
    CHECK(p.at(2.0) == -3.0);
    CHECK(p.at(100.0) == 0.5);
    CHECK(p.end_time() == 5.0);
    CHECK(p.charge(5.0) == doctest::Approx(2.0 - 9.0));
    CHECK(p.charge(3.0) == doctest::Approx(2.0 - 3.0));
    CHECK(p.abs_charge(6.0) == doctest::Approx(2.0 + 9.0 + 0.5));
    CHECK_THROWS_AS(CurrentProfile({{1.0, 1.0}}), InvalidParameter);
    CHECK_THROWS_AS(CurrentProfile({{0.0, 1.0}, {0.0, 2.0}}), InvalidParameter);
    CHECK_THROWS_AS(CurrentProfile(std::vector<CurrentProfile::Sample>{}), InvalidParameter);
}

TEST_CASE("zero current stays at rest") {
    CollocationModel m(20.0, 50.0);
    const CurrentProfile p({{0.0, 0.0}, {100.0, 0.0}});
    const TimeSeries ts = simulate(m, {2e-4, -5e-5, 0.5}, 0.05, p, 0.5);
    CHECK(ts.t.size() == 201);
    for (double v : ts.v_dev) CHECK(v == 0.0);
}

TEST_CASE("constant current drains the particle at the applied rate") {
    CollocationModel m(20.0, 50.0);
    const double i = 1.7;
    const CurrentProfile p({{0.0, i}, {100.0, i}});
    const TimeSeries ts = simulate(m, {2e-4, -5e-5, 0.5}, 0.05, p, 0.25);
    const double want = -i * 100.0;
    CHECK(std::abs((ts.x_avg_plus.back() - ts.x_avg_plus.front()) - want) < 1e-3 * std::abs(want));
    CHECK(std::abs((ts.x_avg_minus.back() - ts.x_avg_minus.front()) - want) < 1e-3 * std::abs(want));
}

TEST_CASE("linearity and superposition") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<CurrentProfile::Sample> s1, s2, s12, s2x;
    for (int t = 0; t <= 200; ++t) {
        const double a = u(rng), b = u(rng);
        s1.push_back({double(t), a});
        s2.push_back({double(t), b});
        s12.push_back({double(t), a + b});
        s2x.push_back({double(t), 2.0 * a});
    }
    const OcvSlopes sl{2e-4, -5e-5, 0.5};
    CollocationModel m(20.0, 50.0);
    const TimeSeries r1 = simulate(m, sl, 0.05, CurrentProfile(s1), 1.0);
    const TimeSeries r2 = simulate(m, sl, 0.05, CurrentProfile(s2), 1.0);
    const TimeSeries r12 = simulate(m, sl, 0.05, CurrentProfile(s12), 1.0);
    const TimeSeries rx = simulate(m, sl, 0.05, CurrentProfile(s2x), 1.0);
    for (std::size_t k = 0; k < r1.v_dev.size(); ++k) {
        CHECK(rx.v_dev[k] == 2.0 * r1.v_dev[k]);
        CHECK(std::abs(r12.v_dev[k] - r1.v_dev[k] - r2.v_dev[k]) <= 1e-12);
    }
}

TEST_CASE("slope scale acts on the cathode term only") {
    const CurrentProfile p({{0.0, 1.0}, {30.0, 0.0}, {60.0, 0.0}});
    CollocationModel m(20.0, 50.0);
    const TimeSeries base = simulate(m, {2e-4, -5e-5, 0.5}, 0.05, p, 1.0);
    const TimeSeries sc = simulate(m, {2e-4, -5e-5, 0.5}, 0.05, p, 1.0, 0.78);
    const TimeSeries manual = simulate(m, {0.78 * 2e-4, -5e-5, 0.5}, 0.05, p, 1.0);
    for (std::size_t k = 0; k < base.v_dev.size(); ++k) {
        CHECK(sc.v_dev[k] == doctest::Approx(manual.v_dev[k]).epsilon(1e-14));
    }
    CHECK(sc.v_dev[40] != base.v_dev[40]);
}

TEST_CASE("horizon and step checks") {
    const CurrentProfile p({{0.0, 1.0}, {10.0, 1.0}});
    CollocationModel m(20.0, 50.0);
    CHECK_THROWS_AS(simulate(m, {2e-4, -5e-5, 0.5}, 0.05, p, 1.0, 1.0, 20.0), InvalidParameter);
    CHECK_THROWS_AS(simulate(m, {2e-4, -5e-5, 0.5}, 0.05, p, 0.0), InvalidParameter);
    const TimeSeries part = simulate(m, {2e-4, -5e-5, 0.5}, 0.05, p, 1.0, 1.0, 4.0);
    CHECK(part.t.back() == 4.0);
    const CurrentProfile huge({{0.0, 1e308}, {2.0, 1e308}});
    CHECK_THROWS_AS(simulate(m, {2e-4, -5e-5, 0.5}, 10.0, huge, 1.0), StepRejected);
}

TEST_CASE("sinusoidal steady state matches the transfer function") {
    const OcvSlopes s{2e-4, -5e-5, 0.5};
    const IdentifiableParams p{20.0, 50.0, 0.03};
    for (double wt : {0.1, 3.0}) {
        const double w = wt / 20.0;
        const cplx g = sinusoid_gain(20.0, 50.0, s, 0.03, w, 20);
        const cplx h = spm_tf(cplx(0.0, w), p, s);
        CHECK(std::abs(std::abs(g) / std::abs(h) - 1.0) < 0.01);
        CHECK(std::abs(std::arg(g / h)) * 180.0 / kPi < 1.0);
    }
}

TEST_CASE("spectral convergence of the sinusoid gain") {
    const OcvSlopes s{2e-4, -5e-5, 0.5};
    const double w = 1.0 / 20.0;
    const cplx g16 = sinusoid_gain(20.0, 50.0, s, 0.03, w, 16);
    const cplx g32 = sinusoid_gain(20.0, 50.0, s, 0.03, w, 32);
    CHECK(std::abs(g32 - g16) / std::abs(g32) < 1e-6);
}
