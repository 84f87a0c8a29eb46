#pragma once

#include <functional>

#include "pdg/model.hpp"

namespace pdg {

struct OdeOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-13;
    double initial_step = 0.0;  // 0 = pick automatically
    long max_steps = 2'000'000;
};

struct OdeStats {
    long steps = 0;
    long rejected = 0;
    long evals = 0;
};

using OdeRhs = std::function<void(double t, const VecX& y, VecX& dy)>;

// Embedded Dormand-Prince 5(4) pair with FSAL and standard step control.
// Integrates from t0 to t1 in either direction.
VecX integrate_dp54(const OdeRhs& f, double t0, double t1, VecX y0, const OdeOptions& opts,
                    OdeStats* stats = nullptr);

struct PropagationReport {
    double r_error = 0.0;        // ||r(tf) - rf||, m
    double v_error = 0.0;        // ||v(tf) - vf||, m/s
    double lambda_m_final = 0.0;
    double mass_final = 0.0;     // kg, for cross-checking the analytic profile
    double rel_tol = 0.0;
    long steps = 0;
    VecX y_final;                // [r, v, m, lambda_r, lambda_v, lambda_m]
};

// Propagates the full state/costate system forward from t0 with the thrust
// magnitude taken from the profile and the direction -lambda_v/||lambda_v||,
// integrating segment-by-segment so the switch times are hit exactly.
PropagationReport propagate_oracle(const BoundaryConditions& bc, const Vec3& lambda_r0,
                                   const Vec3& lambda_v0, double lambda_m0,
                                   const ThrustProfile& profile, const LanderConfig& cfg,
                                   double rel_tol = 1e-12);

// Quadrature cross-check of the analytic mass profile.
double mass_quadrature(const ThrustProfile& profile, double m0, double alpha, double t,
                       double rel_tol = 1e-12);

// Backward integration of the mass-costate equation from lambda_m(tf) = 0,
// with lambda_v taken from the converged affine expression and the analytic
// mass profile. Returns lambda_m(t0).
double lambda_m_oracle(const ThrustProfile& profile, const LanderConfig& cfg, double m0,
                       const CostateExpression& ce, double rel_tol = 1e-12);

// Hamiltonian of a propagated state vector under thrust magnitude T.
double hamiltonian_of_state(const VecX& y, double thrust, double alpha, const Vec3& a_g);

// Hamiltonian samples along the propagated path (segment boundaries and
// midpoints), for consistency checks against the collocation solution.
VecX hamiltonian_samples(const BoundaryConditions& bc, const Vec3& lambda_r0,
                         const Vec3& lambda_v0, double lambda_m0, const ThrustProfile& profile,
                         const LanderConfig& cfg, double rel_tol = 1e-12);

}  // namespace pdg
