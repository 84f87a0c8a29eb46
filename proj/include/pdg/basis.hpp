#pragma once

#include "pdg/types.hpp"

namespace pdg {

// Affine map between physical time [t_start, t_end] and the basis domain [-1, 1].
struct TimeMap {
    double t_start = 0.0;
    double t_end = 1.0;
    double c = 2.0;  // dz/dt

    double to_z(double t) const { return -1.0 + c * (t - t_start); }
    double to_t(double z) const { return t_start + (z + 1.0) / c; }
};

TimeMap time_map(double t_start, double t_end);

// Chebyshev-Gauss-Lobatto nodes, ascending, with the endpoints exactly -1 and +1.
struct CollocationGrid {
    int n_points = 0;
    VecX z;
};

CollocationGrid collocation_grid(int n_points);

// Chebyshev polynomials T_j and their first two z-derivatives, evaluated at a
// set of points. Column j holds degree (degree_offset + j); the offset skips
// the low degrees spanned by the boundary-interpolation terms.
struct BasisEval {
    int n_basis = 0;
    int degree_offset = 0;
    MatX H0, H1, H2;  // each n_points x n_basis
};

BasisEval chebyshev_eval(const VecX& z, int n_basis, int degree_offset);
BasisEval chebyshev_eval(const CollocationGrid& grid, int n_basis, int degree_offset);

}  // namespace pdg
