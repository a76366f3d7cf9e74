#pragma once

#include <array>

#include "spmid/constants.hpp"

namespace spmid {

/// Raw material and geometry parameters of one electrode, SI units.
struct ElectrodeParams {
    double thickness = 0.0;        // m
    double particle_radius = 0.0;  // m
    double volume_fraction = 0.0;  // active material, (0, 1)
    double diffusivity = 0.0;      // m^2/s
    double rate_constant = 0.0;    // m^2.5 mol^-0.5 s^-1
    double c_max = 0.0;            // mol/m^3
};

/// Full physical parameter set of the single particle model.
struct PhysicalParams {
    ElectrodeParams positive;
    ElectrodeParams negative;
    double area = 0.0;                          // m^2
    double c_electrolyte = 0.0;                 // mol/m^3
    double temperature = kDefaultTemperature;   // K
};

/// The six lumped groups that fully parametrise the model.
/// The cathode capacity is negative by convention.
struct GroupedParams {
    double tau_d_plus = 0.0;   // s
    double tau_d_minus = 0.0;  // s
    double tau_k_plus = 0.0;   // s
    double tau_k_minus = 0.0;  // s
    double q_th_plus = 0.0;    // C, < 0
    double q_th_minus = 0.0;   // C, > 0
};

/// theta = [tau_d+, tau_d+/(3Q+), tau_k+/(3Q+), tau_d-, tau_d-/(3Q-), tau_k-/(3Q-)]
struct ThetaVector {
    std::array<double, 6> theta{};

    double operator[](std::size_t i) const { return theta[i]; }
    double& operator[](std::size_t i) { return theta[i]; }
};

/// Parameters of the linearised model that can actually be identified.
struct IdentifiableParams {
    double tau_d_plus = 0.0;   // s
    double tau_d_minus = 0.0;  // s
    double r_ct0 = 0.0;        // Ohm
};

/// Linearisation point. The current is always zero there.
struct OperatingPoint {
    double x0_plus = 0.5;
    double x0_minus = 0.5;
    double dod = 0.0;
    static constexpr double current = 0.0;
};

void validate(const PhysicalParams& p);
void validate(const GroupedParams& g);
void validate(const IdentifiableParams& p);
void validate(const OperatingPoint& op);

GroupedParams group_from_physical(const PhysicalParams& p);
ThetaVector theta_from_groups(const GroupedParams& g);
GroupedParams groups_from_theta(const ThetaVector& t);

/// Linearised Butler-Volmer resistance at I = 0:
///   R_ct = -(2RT/F) [theta3 / sqrt((1-x+)x+) - theta6 / sqrt((1-x-)x-)]
double charge_transfer_resistance(double theta3, double theta6, const OperatingPoint& op,
                                  double temperature = kDefaultTemperature);

/// Stoichiometries at a given depth of discharge, starting from those at
/// DoD = 0. Discharge lithiates the cathode and delithiates the anode:
///   x_i(dod) = x_i(0) - dod * total_capacity / Q_i^th
OperatingPoint operating_point_at_dod(double x_plus_at_0, double x_minus_at_0,
                                      const GroupedParams& g, double total_capacity,
                                      double dod);

}  // namespace spmid
