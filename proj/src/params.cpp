#include "spmid/params.hpp"

#include <cmath>
#include <string>

#include "spmid/errors.hpp"

namespace spmid {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidParameter(std::string(name) + " must be finite and strictly positive, got " +
                               std::to_string(v));
    }
}

void validate_electrode(const ElectrodeParams& e, const char* tag) {
    const std::string t(tag);
    require_positive(e.thickness, (t + ".delta").c_str());
    require_positive(e.particle_radius, (t + ".R").c_str());
    require_positive(e.volume_fraction, (t + ".eps").c_str());
    if (!(e.volume_fraction < 1.0)) {
        throw InvalidParameter(t + ".eps must be < 1");
    }
    require_positive(e.diffusivity, (t + ".D").c_str());
    require_positive(e.rate_constant, (t + ".k").c_str());
    require_positive(e.c_max, (t + ".c_max").c_str());
}

double open_unit_stoichiometry(double x, const char* name) {
    if (!(x > 0.0 && x < 1.0)) {
        throw SingularStoichiometry(std::string(name) + " must lie strictly inside (0, 1), got " +
                                    std::to_string(x));
    }
    return x;
}

}  // namespace

void validate(const PhysicalParams& p) {
    validate_electrode(p.positive, "positive");
    validate_electrode(p.negative, "negative");
    require_positive(p.area, "A");
    require_positive(p.c_electrolyte, "c_e");
    require_positive(p.temperature, "T");
}

void validate(const GroupedParams& g) {
    require_positive(g.tau_d_plus, "tau_d_plus");
    require_positive(g.tau_d_minus, "tau_d_minus");
    require_positive(g.tau_k_plus, "tau_k_plus");
    require_positive(g.tau_k_minus, "tau_k_minus");
    require_positive(g.q_th_minus, "Q_th_minus");
    if (!(g.q_th_plus < 0.0) || !std::isfinite(g.q_th_plus)) {
        throw InvalidParameter("Q_th_plus must be finite and negative");
    }
}

void validate(const IdentifiableParams& p) {
    require_positive(p.tau_d_plus, "tau_d_plus");
    require_positive(p.tau_d_minus, "tau_d_minus");
    if (!std::isfinite(p.r_ct0)) {
        throw InvalidParameter("R_ct0 must be finite");
    }
}

void validate(const OperatingPoint& op) {
    open_unit_stoichiometry(op.x0_plus, "x0_plus");
    open_unit_stoichiometry(op.x0_minus, "x0_minus");
    if (!(op.dod >= 0.0 && op.dod <= 1.0)) {
        throw InvalidParameter("dod must lie in [0, 1]");
    }
}

GroupedParams group_from_physical(const PhysicalParams& p) {
    validate(p);
    const double sqrt_ce = std::sqrt(p.c_electrolyte);
    const auto& pos = p.positive;
    const auto& neg = p.negative;
    GroupedParams g;
    g.tau_d_plus = pos.particle_radius * pos.particle_radius / pos.diffusivity;
    g.tau_d_minus = neg.particle_radius * neg.particle_radius / neg.diffusivity;
    g.tau_k_plus = pos.particle_radius / (2.0 * pos.rate_constant * sqrt_ce);
    g.tau_k_minus = neg.particle_radius / (2.0 * neg.rate_constant * sqrt_ce);
    g.q_th_plus = -pos.volume_fraction * pos.thickness * pos.c_max * kFaraday * p.area;
    g.q_th_minus = neg.volume_fraction * neg.thickness * neg.c_max * kFaraday * p.area;
    return g;
}

ThetaVector theta_from_groups(const GroupedParams& g) {
    validate(g);
    ThetaVector t;
    t[0] = g.tau_d_plus;
    t[1] = g.tau_d_plus / (3.0 * g.q_th_plus);
    t[2] = g.tau_k_plus / (3.0 * g.q_th_plus);
    t[3] = g.tau_d_minus;
    t[4] = g.tau_d_minus / (3.0 * g.q_th_minus);
    t[5] = g.tau_k_minus / (3.0 * g.q_th_minus);
    return t;
}

GroupedParams groups_from_theta(const ThetaVector& t) {
    for (double v : t.theta) {
        if (!std::isfinite(v)) throw InvalidParameter("theta entries must be finite");
    }
    if (t[1] == 0.0 || t[4] == 0.0) {
        throw DegenerateMapping("theta2 and theta5 must be non-zero");
    }
    if (!(t[0] > 0.0 && t[3] > 0.0 && t[1] < 0.0 && t[2] < 0.0 && t[4] > 0.0 && t[5] > 0.0)) {
        throw InvalidParameter("theta violates sign invariants (+,-,-,+,+,+)");
    }
    GroupedParams g;
    g.tau_d_plus = t[0];
    g.tau_k_plus = t[0] * t[2] / t[1];
    g.q_th_plus = t[0] / (3.0 * t[1]);
    g.tau_d_minus = t[3];
    g.tau_k_minus = t[3] * t[5] / t[4];
    g.q_th_minus = t[3] / (3.0 * t[4]);
    return g;
}

double charge_transfer_resistance(double theta3, double theta6, const OperatingPoint& op,
                                  double temperature) {
    const double xp = open_unit_stoichiometry(op.x0_plus, "x0_plus");
    const double xm = open_unit_stoichiometry(op.x0_minus, "x0_minus");
    require_positive(temperature, "T");
    const double scale = 2.0 * kGasConstant * temperature / kFaraday;
    return -scale * (theta3 / std::sqrt((1.0 - xp) * xp) - theta6 / std::sqrt((1.0 - xm) * xm));
}

OperatingPoint operating_point_at_dod(double x_plus_at_0, double x_minus_at_0,
                                      const GroupedParams& g, double total_capacity,
                                      double dod) {
    validate(g);
    require_positive(total_capacity, "total_capacity");
    if (!(dod >= 0.0 && dod <= 1.0)) throw InvalidParameter("dod must lie in [0, 1]");
    OperatingPoint op;
    op.dod = dod;
    op.x0_plus = x_plus_at_0 - dod * total_capacity / g.q_th_plus;
    op.x0_minus = x_minus_at_0 - dod * total_capacity / g.q_th_minus;
    validate(op);
    return op;
}

}  // namespace spmid
