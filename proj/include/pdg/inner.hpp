#pragma once

#include <string>
#include <vector>

#include "pdg/system.hpp"

namespace pdg {

enum class InnerDamping { Backtracking, None };

struct InnerSettings {
    int max_iterations = 20;
    double step_tolerance = 1e-12;      // on the max component of the damped step
    double residual_tolerance = 1e-12;  // absolute L2 stop
    InnerDamping damping = InnerDamping::Backtracking;
    double lambda_floor = 1e-12;  // singular-costate threshold
};

struct InnerResult {
    VecX xi;
    std::vector<double> residual_history;  // L2 per iterate, initial included
    int iterations = 0;                    // accepted Gauss-Newton steps
    std::string termination;
    double min_lambda_norm = 0.0;

    double final_l2() const { return residual_history.back(); }
};

// Straight-line warm start: junction values on the chord from r0 to rf with
// its constant slope as velocity, per-segment coefficients least-squares
// fitted to that line, and the costate seeded from the unit vectors
//   lambda_v(t0) = v0/||v0||, lambda_v(tf) = -r0/||r0||.
VecX initialize(const CollocationProblem& pb);

// Same state setup, but with the costate coefficients supplied (carried over
// from a previous solve at nearby switching times).
VecX initialize(const CollocationProblem& pb, const Mat32& costate_seed);

// Damped Gauss-Newton on the stacked residual: QR least-squares step, then
// step halving until the L2 norm decreases and the costate stays clear of the
// singular floor. Plain undamped steps are available via settings.damping.
InnerResult solve_inner(const CollocationProblem& pb, VecX xi0, const InnerSettings& settings);

}  // namespace pdg
