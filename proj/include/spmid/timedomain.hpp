#pragma once

#include <Eigen/Dense>
#include <vector>

#include "spmid/ocv.hpp"

namespace spmid {

/// Piecewise-constant current, positive on discharge. Sample k holds from t_k
/// until t_{k+1}; the last sample holds indefinitely.
class CurrentProfile {
public:
    struct Sample {
        double t;  // s
        double i;  // A
    };

    explicit CurrentProfile(std::vector<Sample> samples);

    double at(double t) const;
    double end_time() const noexcept { return samples_.back().t; }
    const std::vector<Sample>& samples() const noexcept { return samples_; }

    /// Exact integral of the held current over [0, t].
    double charge(double t) const;
    double abs_charge(double t) const;

private:
    std::vector<Sample> samples_;
};

/// Chebyshev-Gauss-Lobatto collocation on [0, 1] (node 0 at the centre,
/// node n-1 at the surface) with first- and second-derivative matrices.
struct ChebyshevNodes {
    Eigen::VectorXd r;
    Eigen::MatrixXd d1;
    Eigen::MatrixXd d2;
    Eigen::VectorXd weights;  // Clenshaw-Curtis quadrature on [0, 1]

    static ChebyshevNodes make(int n_points);
};

/// Linearised particle diffusion for both electrodes in the scaled variable
/// u_hat = Q_th * r * x_bar (coulombs):
///   du/dt = (1/tau) d2u/dr2,  u(0) = 0,  du/dr(1) - u(1) = -(tau/3) I
/// The boundary values are eliminated, leaving a linear system
///   du_int/dt = A u_int + b I,  u_surface = g . u_int + h I
/// per electrode. The surface value is the scaled surface stoichiometry
/// deviation x_hat_s.
class CollocationModel {
public:
    struct Electrode {
        double tau = 0.0;
        Eigen::MatrixXd a;
        Eigen::VectorXd b;
        Eigen::RowVectorXd g;
        double h = 0.0;
        Eigen::VectorXd state;
    };

    CollocationModel(double tau_plus, double tau_minus, int n_points = 20);

    int n_points() const noexcept { return n_points_; }
    const ChebyshevNodes& nodes() const noexcept { return nodes_; }
    const Electrode& positive() const noexcept { return plus_; }
    const Electrode& negative() const noexcept { return minus_; }

    void reset();

    /// Advances both electrodes by dt with the current held constant
    /// (trapezoidal rule, exact for the held input).
    void step(double current);

    /// Prepares the step operators for a given dt. Called by step() on demand.
    void set_time_step(double dt);

    double surface_plus(double current) const { return surface(plus_, current); }
    double surface_minus(double current) const { return surface(minus_, current); }

    /// <x_hat> = 3 * integral_0^1 r^2 x_hat dr = 3 * integral_0^1 r u_hat dr
    double volume_average_plus(double current) const { return volume_average(plus_, current); }
    double volume_average_minus(double current) const { return volume_average(minus_, current); }

private:
    Electrode build(double tau) const;
    double surface(const Electrode& e, double current) const;
    double volume_average(const Electrode& e, double current) const;

    struct Stepper {
        Eigen::PartialPivLU<Eigen::MatrixXd> lhs;
        Eigen::MatrixXd rhs;
        Eigen::VectorXd forcing;
    };

    int n_points_;
    ChebyshevNodes nodes_;
    Electrode plus_;
    Electrode minus_;
    double dt_ = 0.0;
    Stepper step_plus_;
    Stepper step_minus_;
};

CollocationModel build_model(double tau_plus, double tau_minus, int n_points = 20);

struct TimeSeries {
    std::vector<double> t;           // s
    std::vector<double> current;     // A, held value at t
    std::vector<double> v_dev;       // V, deviation from the equilibrium voltage
    std::vector<double> x_surf_plus; // C, scaled surface stoichiometry deviation
    std::vector<double> x_surf_minus;
    std::vector<double> x_avg_plus;  // C, scaled volume-averaged deviation
    std::vector<double> x_avg_minus;
};

/// V_dev = beta+ x_hat_s+ - beta- x_hat_s- - r0 I, starting from rest, with
/// outputs at t = 0, dt, 2 dt, ... up to the profile end time.
/// slope_scale_plus multiplies beta+ (empirical OCV slope correction).
TimeSeries simulate(CollocationModel& model, const OcvSlopes& slopes, double r0,
                    const CurrentProfile& profile, double dt, double slope_scale_plus = 1.0,
                    double duration = -1.0);

}  // namespace spmid
