#pragma once

#include <vector>

#include "pdg/system.hpp"

namespace pdg {

// lambda_m is decoupled from the state/costate least squares: with lambda_v
// known it satisfies  dlambda_m/dt = -(T/m^2) ||lambda_v||  with the terminal
// condition lambda_m(tf) = 0. Each segment gets its own offset-1 Chebyshev
// expansion of the antiderivative, solved backward so segment end values
// chain exactly.
struct MassCostateSolution {
    std::vector<VecX> xi;        // per segment, offset-1 coefficients
    std::vector<VecX> lambda_m;  // per segment, at that segment's nodes
    std::vector<double> fit_residual;  // L2 of the collocation fit per segment
    double lambda_m0 = 0.0;      // value at t0
};

MassCostateSolution solve_lambda_m(const CollocationProblem& pb, const Mat32& costate_coeff);

}  // namespace pdg
