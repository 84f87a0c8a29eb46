#pragma once

#include <string>
#include <vector>

#include "pdg/inner.hpp"
#include "pdg/mass_costate.hpp"

namespace pdg {

enum class ProfileMode { ForceMinMax, ForceMaxMinMax, Auto };

struct OuterSettings {
    double time_tolerance = 1e-9;   // step-size stop on the switching times
    double residual_accept = 1e-6;  // max |component| declared converged
    double fd_step = 1e-6;          // forward-difference step, s
    int max_iterations = 100;
    ProfileMode profile_mode = ProfileMode::Auto;
    int nodes = 60;    // collocation order per segment (nodes + 1 grid points)
    int n_basis = 16;  // free coefficients per axis per segment
    std::vector<double> initial_times;  // [t1, tf] or [t1, t2, tf]; empty = defaults
    InnerSettings inner;
    int polish_max_iterations = 40;  // cap for the final from-scratch inner solve
    int auto_max_iterations = 40;    // outer cap per attempt during Auto classification
};

// Node-wise solution fields, segments concatenated (switch nodes appear once
// per adjacent segment, carrying that segment's thrust).
struct NodeHistories {
    VecX t;
    MatX r, v, a, lam_v;  // n x 3
    VecX thrust, mass, lam_m, hamiltonian, sigma;
    Vec3 lam_r;
};

struct SolveMetrics {
    std::vector<double> times;  // segment boundaries including t0
    double m_used = 0.0;
    double l2_loss = 0.0;         // stacked residual at the reported solution
    double l2_hamiltonian = 0.0;  // over all nodes
    double max_hamiltonian = 0.0;
    double hamiltonian_spread = 0.0;  // max - min over all nodes
    VecX outer_residual_final;
    int outer_iterations = 0;
    std::vector<int> inner_iterations;  // every inner solve run by the outer loop
    int inner_first = 0;
    double inner_median = 0.0;
    int inner_max = 0;
    double wall_seconds = 0.0;
    std::string termination;
    bool sigma_pattern_ok = false;
    double max_sigma_at_switch = 0.0;
};

struct GuidanceSolution {
    ProfileKind kind = ProfileKind::MinMax;
    ThrustProfile profile;
    BoundaryConditions bc;
    LanderConfig cfg;
    int nodes = 0, n_basis = 0;
    VecX xi;  // converged unknown vector
    Mat32 costate;
    TimeMap global;
    double lambda_m0 = 0.0;
    NodeHistories hist;
    SolveMetrics metrics;
    std::string selection_note;

    CostateExpression costate_expr() const { return {global, costate}; }
};

std::vector<double> default_initial_times(ProfileKind kind, const BoundaryConditions& bc,
                                          const LanderConfig& cfg);

// Residual the outer Newton iteration drives to zero: the L2 norms of the
// Hamiltonian history on each non-final segment, then the L2 norm of the
// converged inner residual. Solves the inner problem from scratch.
VecX outer_residual(const SegmentTimes& times, ProfileKind kind, const BoundaryConditions& bc,
                    const LanderConfig& cfg, const OuterSettings& settings);

GuidanceSolution solve_switching_times(ProfileKind kind, const BoundaryConditions& bc,
                                       const LanderConfig& cfg, const OuterSettings& settings);

// Auto classification: solve both profiles, keep the ones whose switching
// function sign pattern matches, break ties by the smaller stacked residual.
GuidanceSolution select_profile(const BoundaryConditions& bc, const LanderConfig& cfg,
                                const OuterSettings& settings);

// Dispatch on settings.profile_mode.
GuidanceSolution solve(const BoundaryConditions& bc, const LanderConfig& cfg,
                       const OuterSettings& settings);

bool check_sigma_pattern(const GuidanceSolution& sol, double* max_switch_sigma = nullptr,
                         double switch_tol = 1e-3);

}  // namespace pdg
