#pragma once

#include <vector>

#include "pdg/model.hpp"

namespace pdg {

// Column layout of the stacked unknown vector. Per segment: 3*n_basis free
// coefficients (axis-major), then the 6 junction values (r, v at the
// segment's right end) for every segment but the last; the 6 costate
// coefficients (a0, a1 per axis) sit at the tail.
struct UnknownLayout {
    int n_segments = 0;
    int n_basis = 0;

    int xi_col(int s) const { return s * (3 * n_basis + 6); }
    int junction_col(int s) const { return xi_col(s) + 3 * n_basis; }
    int costate_col() const { return dim() - 6; }
    int dim() const { return n_segments * 3 * n_basis + (n_segments - 1) * 6 + 6; }
};

// Everything that is fixed once the switching times and profile are chosen:
// segment expressions, node masses, thrust accelerations, costate rows.
struct CollocationProblem {
    LanderConfig cfg;
    BoundaryConditions bc;
    ThrustProfile profile;
    int n_points = 0;  // nodes per segment
    int n_basis = 0;
    UnknownLayout layout;
    TimeMap global;
    std::vector<SegmentExpression> segs;
    std::vector<VecX> mass;   // per segment, at its nodes
    std::vector<VecX> beta;   // thrust acceleration T_s / m
    std::vector<MatX> h_lam;  // costate rows [1, z_global], n_points x 2
};

CollocationProblem make_problem(const BoundaryConditions& bc, const ThrustProfile& profile,
                                const LanderConfig& cfg, int n_points, int n_basis);

MatX xi_block(const CollocationProblem& pb, const VecX& Xi, int s);  // n_basis x 3
Mat32 costate_coeff(const CollocationProblem& pb, const VecX& Xi);
CostateExpression costate_expression(const CollocationProblem& pb, const VecX& Xi);

// Start/end (r, v) for segment s: the problem boundary conditions at the
// outer ends, junction unknowns in between.
struct SegmentBoundary {
    Vec3 r_start, v_start, r_end, v_end;
};
SegmentBoundary segment_boundary(const CollocationProblem& pb, const VecX& Xi, int s);

// Stacked residual: 3 axes x n_points rows per segment (node-major within an
// axis), terminal-Hamiltonian row last. The Jacobian columns follow
// UnknownLayout.
struct ResidualSystem {
    VecX residual;
    MatX jacobian;  // empty unless requested
    double min_lambda_norm = 0.0;
};

int residual_rows(const CollocationProblem& pb);
ResidualSystem assemble(const CollocationProblem& pb, const VecX& Xi, bool want_jacobian);

}  // namespace pdg
