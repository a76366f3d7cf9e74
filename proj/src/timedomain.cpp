#include "spmid/timedomain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spmid/constants.hpp"
#include "spmid/errors.hpp"

namespace spmid {

CurrentProfile::CurrentProfile(std::vector<Sample> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw InvalidParameter("current profile is empty");
    if (samples_.front().t != 0.0) throw InvalidParameter("current profile must start at t = 0");
    for (std::size_t k = 0; k < samples_.size(); ++k) {
        if (!std::isfinite(samples_[k].t) || !std::isfinite(samples_[k].i)) {
            throw InvalidParameter("current profile sample " + std::to_string(k) + " is not finite");
        }
        if (k > 0 && !(samples_[k].t > samples_[k - 1].t)) {
            throw InvalidParameter("current profile times must be strictly increasing");
        }
    }
}

double CurrentProfile::at(double t) const {
    auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                               [](double v, const Sample& s) { return v < s.t; });
    if (it == samples_.begin()) return 0.0;
    return std::prev(it)->i;
}

double CurrentProfile::charge(double t) const {
    double q = 0.0;
    for (std::size_t k = 0; k < samples_.size() && samples_[k].t < t; ++k) {
        const double end = k + 1 < samples_.size() ? std::min(samples_[k + 1].t, t) : t;
        q += samples_[k].i * (end - samples_[k].t);
    }
    return q;
}

double CurrentProfile::abs_charge(double t) const {
    double q = 0.0;
    for (std::size_t k = 0; k < samples_.size() && samples_[k].t < t; ++k) {
        const double end = k + 1 < samples_.size() ? std::min(samples_[k + 1].t, t) : t;
        q += std::abs(samples_[k].i) * (end - samples_[k].t);
    }
    return q;
}

ChebyshevNodes ChebyshevNodes::make(int n_points) {
    if (n_points < 2) throw ResolutionError("need at least 2 collocation points");
    const int n = n_points;
    const int m = n - 1;
    ChebyshevNodes c;
    c.r.resize(n);
    Eigen::VectorXd bary(n);
    for (int j = 0; j < n; ++j) {
        c.r[j] = 0.5 * (1.0 - std::cos(kPi * j / m));
        bary[j] = ((j % 2 == 0) ? 1.0 : -1.0) * ((j == 0 || j == m) ? 0.5 : 1.0);
    }
    c.d1 = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double diag = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            c.d1(i, j) = (bary[j] / bary[i]) / (c.r[i] - c.r[j]);
            diag -= c.d1(i, j);
        }
        c.d1(i, i) = diag;
    }
    c.d2 = c.d1 * c.d1;

    // Clenshaw-Curtis weights on [-1, 1], halved for [0, 1].
    c.weights = Eigen::VectorXd::Zero(n);
    for (int j = 0; j <= m; ++j) {
        const double theta = kPi * j / m;
        if (j == 0 || j == m) {
            c.weights[j] = (m % 2 == 0) ? 1.0 / (m * m - 1.0) : 1.0 / (m * m);
            continue;
        }
        double v = 1.0;
        if (m % 2 == 0) {
            for (int k = 1; k < m / 2; ++k) v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
            v -= std::cos(m * theta) / (m * m - 1.0);
        } else {
            for (int k = 1; k <= (m - 1) / 2; ++k) {
                v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
            }
        }
        c.weights[j] = 2.0 * v / m;
    }
    c.weights *= 0.5;
    return c;
}

CollocationModel::CollocationModel(double tau_plus, double tau_minus, int n_points)
    : n_points_(n_points) {
    if (n_points < 8) {
        throw ResolutionError("collocation needs at least 8 points per electrode, got " +
                              std::to_string(n_points));
    }
    if (!(tau_plus > 0.0) || !(tau_minus > 0.0) || !std::isfinite(tau_plus) ||
        !std::isfinite(tau_minus)) {
        throw InvalidParameter("diffusion time constants must be positive");
    }
    nodes_ = ChebyshevNodes::make(n_points);
    plus_ = build(tau_plus);
    minus_ = build(tau_minus);
}

CollocationModel::Electrode CollocationModel::build(double tau) const {
    const int n = n_points_;
    const int s = n - 1;   // surface node
    const int ni = n - 2;  // interior nodes 1 .. n-2
    const auto& d1 = nodes_.d1;
    const auto& d2 = nodes_.d2;

    // Robin row: sum_j D1(s,j) u_j - u_s = -(tau/3) I with u_0 = 0.
    const double pivot = d1(s, s) - 1.0;
    Electrode e;
    e.tau = tau;
    e.g.resize(ni);
    for (int j = 0; j < ni; ++j) e.g[j] = -d1(s, j + 1) / pivot;
    e.h = -(tau / 3.0) / pivot;

    const Eigen::MatrixXd d2_ii = d2.block(1, 1, ni, ni);
    const Eigen::VectorXd d2_is = d2.block(1, s, ni, 1);
    e.a = (d2_ii + d2_is * e.g) / tau;
    e.b = d2_is * (e.h / tau);
    e.state = Eigen::VectorXd::Zero(ni);
    return e;
}

void CollocationModel::reset() {
    plus_.state.setZero();
    minus_.state.setZero();
}

void CollocationModel::set_time_step(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("time step must be positive");
    if (dt == dt_) return;
    dt_ = dt;
    auto prepare = [dt](const Electrode& e, Stepper& st) {
        const auto eye = Eigen::MatrixXd::Identity(e.a.rows(), e.a.cols());
        st.lhs.compute(eye - 0.5 * dt * e.a);
        st.rhs = eye + 0.5 * dt * e.a;
        st.forcing = dt * e.b;
    };
    prepare(plus_, step_plus_);
    prepare(minus_, step_minus_);
}

void CollocationModel::step(double current) {
    if (dt_ <= 0.0) throw InvalidParameter("set_time_step must be called before step");
    plus_.state = step_plus_.lhs.solve(step_plus_.rhs * plus_.state + step_plus_.forcing * current);
    minus_.state =
        step_minus_.lhs.solve(step_minus_.rhs * minus_.state + step_minus_.forcing * current);
}

double CollocationModel::surface(const Electrode& e, double current) const {
    return e.g.dot(e.state) + e.h * current;
}

double CollocationModel::volume_average(const Electrode& e, double current) const {
    const int n = n_points_;
    double acc = 0.0;
    for (int j = 1; j < n - 1; ++j) acc += nodes_.weights[j] * nodes_.r[j] * e.state[j - 1];
    acc += nodes_.weights[n - 1] * nodes_.r[n - 1] * surface(e, current);
    return 3.0 * acc;
}

CollocationModel build_model(double tau_plus, double tau_minus, int n_points) {
    return CollocationModel(tau_plus, tau_minus, n_points);
}

TimeSeries simulate(CollocationModel& model, const OcvSlopes& slopes, double r0,
                    const CurrentProfile& profile, double dt, double slope_scale_plus,
                    double duration) {
    if (duration < 0.0) duration = profile.end_time();
    if (duration > profile.end_time() * (1.0 + 1e-12)) {
        throw InvalidParameter("requested horizon exceeds the current profile");
    }
    if (!std::isfinite(r0) || !std::isfinite(slope_scale_plus)) {
        throw InvalidParameter("r0 and slope scale must be finite");
    }
    model.set_time_step(dt);
    model.reset();
    const double beta_plus = slopes.beta_plus * slope_scale_plus;
    const double beta_minus = slopes.beta_minus;
    const auto steps = static_cast<std::size_t>(std::llround(duration / dt));

    TimeSeries ts;
    ts.t.reserve(steps + 1);
    for (std::size_t n = 0; n <= steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        const double i = profile.at(t);
        const double xs_plus = model.surface_plus(i);
        const double xs_minus = model.surface_minus(i);
        const double v = beta_plus * xs_plus - beta_minus * xs_minus - r0 * i;
        if (!std::isfinite(v)) {
            throw StepRejected("state became non-finite at t = " + std::to_string(t) + " s");
        }
        ts.t.push_back(t);
        ts.current.push_back(i);
        ts.v_dev.push_back(v);
        ts.x_surf_plus.push_back(xs_plus);
        ts.x_surf_minus.push_back(xs_minus);
        ts.x_avg_plus.push_back(model.volume_average_plus(i));
        ts.x_avg_minus.push_back(model.volume_average_minus(i));
        if (n < steps) model.step(i);
    }
    return ts;
}

}  // namespace spmid
