#pragma once

#include "pdg/basis.hpp"

namespace pdg {

// Cubic Hermite switching functions Omega_1..4 on [t_start, t_end] together
// with their first and second time derivatives. At the endpoints they pick
// out (r_start, r_end, v_start, v_end) exactly:
//   Omega(t_start) = (1,0,0,0), Omega(t_end) = (0,1,0,0),
//   dOmega(t_start) = (0,0,1,0), dOmega(t_end) = (0,0,0,1).
struct OmegaSet {
    MatX w, wd, wdd;  // each n x 4
};

OmegaSet omega_set(const VecX& t_nodes, double t_start, double t_end);

// One segment's constrained expression. The basis rows are projected so the
// value and slope at both ends are carried entirely by the Omega terms; any
// coefficient vector then satisfies the endpoint data exactly.
//   P0 = H0 - Omega (x) boundary basis rows        (position rows)
//   P1 = c H1 - dOmega (x) boundary basis rows     (velocity rows)
//   P2 = c^2 H2 - ddOmega (x) boundary basis rows  (acceleration rows)
struct SegmentExpression {
    TimeMap map;
    VecX t_nodes;
    CollocationGrid grid;
    BasisEval basis;  // degree offset 4
    OmegaSet omega;
    MatX P0, P1, P2;
};

SegmentExpression segment_expression(double t_start, double t_end, int n_points, int n_basis);
SegmentExpression segment_expression(double t_start, double t_end, const VecX& t_nodes,
                                     int n_basis);

struct SegmentStates {
    MatX r, v, a;  // each n x 3
};

// xi is n_basis x 3, one column per axis.
SegmentStates eval_segment_states(const SegmentExpression& expr, const MatX& xi,
                                  const Vec3& r_start, const Vec3& v_start,
                                  const Vec3& r_end, const Vec3& v_end);

// Velocity costate over the whole horizon: affine in the global domain
// variable z, so lambda_v = a0 + a1 z(t) and lambda_r = -dlambda_v/dt = -a1 c
// is constant, matching the first-order necessary conditions.
struct CostateExpression {
    TimeMap map;   // global [t0, tf]
    Mat32 coeff;   // row = axis, col 0 = a0, col 1 = a1

    Vec3 lambda_v(double t) const { return coeff.col(0) + coeff.col(1) * map.to_z(t); }
    Vec3 lambda_r() const { return -coeff.col(1) * map.c; }
};

Vec3 eval_costate_v(const CostateExpression& ce, double t);

// Rows [1, z(t)] that multiply (a0, a1) per axis.
MatX costate_rows(const TimeMap& global_map, const VecX& t_nodes);

}  // namespace pdg
