#pragma once

#include <vector>

#include "pdg/tfc.hpp"

namespace pdg {

// Vehicle and environment constants. The raw fields describe the engine
// cluster; derive_params fills the net thrust bounds and the mass-flow slope
//   T_min/max = throttle * thrust_per_engine * n_engines * cos(cant)
//   alpha     = 1 / (isp * g0 * cos(cant))
struct LanderConfig {
    Vec3 a_g{0.0, 0.0, -3.7114};    // gravity, m/s^2
    double isp = 225.0;             // s
    double g0 = 9.807;              // m/s^2, reference gravity in the Isp relation
    double thrust_per_engine = 3100.0;  // N
    int n_engines = 6;
    double cant_angle = 0.471238898038469;  // rad (27 deg)
    double throttle_min = 0.3;
    double throttle_max = 0.8;

    // derived
    double t_min = 0.0;  // N
    double t_max = 0.0;  // N
    double alpha = 0.0;  // s/m
};

LanderConfig derive_params(LanderConfig raw);

struct BoundaryConditions {
    Vec3 r0{0, 0, 0}, v0{0, 0, 0};
    Vec3 rf{0, 0, 0}, vf{0, 0, 0};
    double m0 = 1905.0;  // wet mass, kg
};

enum class ProfileKind { MinMax, MaxMinMax };

// Strictly increasing segment boundaries [t0, t1, (t2), tf].
struct SegmentTimes {
    std::vector<double> bounds;

    int segments() const { return static_cast<int>(bounds.size()) - 1; }
    double t0() const { return bounds.front(); }
    double tf() const { return bounds.back(); }
};

inline constexpr double kTimeOrderMargin = 1e-6;

SegmentTimes segment_times(std::vector<double> bounds);

// Piecewise-constant thrust magnitude over the segments.
struct ThrustProfile {
    ProfileKind kind = ProfileKind::MinMax;
    SegmentTimes times;
    std::vector<double> levels;  // N, one per segment

    int segments() const { return times.segments(); }
};

ThrustProfile make_profile(ProfileKind kind, SegmentTimes times, const LanderConfig& cfg);

// Right-continuous at the switch times; t is clamped to [t0, tf].
double thrust_at(const ThrustProfile& profile, double t);
int segment_index(const ThrustProfile& profile, double t);

// Analytic piecewise-linear mass, chained across segments.
double mass_at(const ThrustProfile& profile, double m0, double alpha, double t);
double beta_at(const ThrustProfile& profile, double m0, double alpha, double t);

inline constexpr double kCostateFloor = 1e-12;

// Acceleration residual of the thrust-steered dynamics at each node:
//   L_i = a_i - a_g_i + beta * lambda_v_i / ||lambda_v||
// Throws SingularCostateError if any node's ||lambda_v|| falls below the
// floor; the thrust direction is undefined there and no regularization is
// attempted. min_norm_out, when given, receives the smallest node norm.
MatX dynamics_loss(const MatX& a_nodes, const MatX& lambda_v_nodes, const VecX& beta_nodes,
                   const Vec3& a_g, double* min_norm_out = nullptr);

// Terminal transversality residual. With lambda_m(tf) = 0 the Hamiltonian at
// tf reduces to alpha T + lambda_v . a_g - beta ||lambda_v||.
double hamiltonian_loss(const Vec3& lambda_v_tf, double beta_tf, double thrust_tf,
                        double alpha, const Vec3& a_g);

// Hamiltonian at each node (should be flat and ~0 along an optimal arc):
//   H = alpha T + lambda_r . v + lambda_v . a_g - (T/m) ||lambda_v|| - lambda_m alpha T
VecX hamiltonian_history(const MatX& v_nodes, const MatX& lambda_v_nodes, const Vec3& lambda_r,
                         const VecX& lambda_m_nodes, const VecX& thrust_nodes,
                         const VecX& mass_nodes, double alpha, const Vec3& a_g);

// Thrust switching function sigma = alpha - ||lambda_v||/m - alpha lambda_m;
// the minimum principle selects T_max where sigma < 0 and T_min where > 0.
VecX switching_function(const MatX& lambda_v_nodes, const VecX& lambda_m_nodes,
                        const VecX& mass_nodes, double alpha);

}  // namespace pdg
