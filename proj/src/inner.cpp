#include "pdg/inner.hpp"

#include <algorithm>

#include "pdg/errors.hpp"

namespace pdg {

namespace {

Vec3 unit_or(const Vec3& v, const Vec3& fallback) {
    const double n = v.norm();
    return n > 1e-12 ? Vec3(v / n) : fallback;
}

Mat32 default_costate_seed(const BoundaryConditions& bc) {
    const Vec3 lv0 = unit_or(bc.v0, Vec3(0, 0, 1));
    const Vec3 lvf = unit_or(-bc.r0, Vec3(0, 0, -1));
    Mat32 lam;
    lam.col(0) = 0.5 * (lv0 + lvf);
    lam.col(1) = 0.5 * (lvf - lv0);
    return lam;
}

}  // namespace

VecX initialize(const CollocationProblem& pb, const Mat32& costate_seed) {
    const UnknownLayout& lay = pb.layout;
    const int S = lay.n_segments;
    VecX Xi = VecX::Zero(lay.dim());

    const double t0 = pb.global.t_start, tf = pb.global.t_end;
    const Vec3 dr = pb.bc.rf - pb.bc.r0;
    const Vec3 v_line = dr / (tf - t0);
    for (int s = 0; s + 1 < S; ++s) {
        const double frac = (pb.profile.times.bounds[s + 1] - t0) / (tf - t0);
        Xi.segment<3>(lay.junction_col(s)) = pb.bc.r0 + frac * dr;
        Xi.segment<3>(lay.junction_col(s) + 3) = v_line;
    }

    for (int s = 0; s < S; ++s) {
        const SegmentExpression& seg = pb.segs[s];
        const SegmentBoundary sb = segment_boundary(pb, Xi, s);
        Eigen::Matrix<double, 4, 3> bd;
        bd.row(0) = sb.r_start.transpose();
        bd.row(1) = sb.r_end.transpose();
        bd.row(2) = sb.v_start.transpose();
        bd.row(3) = sb.v_end.transpose();
        MatX target(pb.n_points, 3);
        for (int k = 0; k < pb.n_points; ++k) {
            const double frac = (seg.t_nodes(k) - t0) / (tf - t0);
            target.row(k) = (pb.bc.r0 + frac * dr).transpose();
        }
        target -= seg.omega.w * bd;
        const MatX xi_fit = seg.P0.colPivHouseholderQr().solve(target);
        for (int i = 0; i < 3; ++i)
            Xi.segment(lay.xi_col(s) + i * pb.n_basis, pb.n_basis) = xi_fit.col(i);
    }

    const int c = lay.costate_col();
    for (int i = 0; i < 3; ++i) {
        Xi(c + 2 * i) = costate_seed(i, 0);
        Xi(c + 2 * i + 1) = costate_seed(i, 1);
    }
    return Xi;
}

VecX initialize(const CollocationProblem& pb) {
    return initialize(pb, default_costate_seed(pb.bc));
}

InnerResult solve_inner(const CollocationProblem& pb, VecX Xi, const InnerSettings& set) {
    // Probes may approach the singular floor before being rejected; keep the
    // accepted iterates two orders clear of it.
    const double lambda_guard = 100.0 * set.lambda_floor;

    ResidualSystem sys = assemble(pb, Xi, true);
    double l2 = sys.residual.norm();

    InnerResult res;
    res.residual_history.push_back(l2);
    res.termination = "max_iterations";

    int consecutive_growth = 0;
    for (int it = 0; it < set.max_iterations; ++it) {
        if (l2 < set.residual_tolerance) {
            res.termination = "residual";
            break;
        }

        const VecX step = sys.jacobian.colPivHouseholderQr().solve(sys.residual);

        double t_step = 1.0;
        bool accepted = false;
        VecX Xi_new;
        ResidualSystem sys_new;
        double l2_new = 0.0;

        if (set.damping == InnerDamping::Backtracking) {
            for (int h = 0; h < 30; ++h) {
                Xi_new = Xi - t_step * step;
                try {
                    sys_new = assemble(pb, Xi_new, true);
                } catch (const SingularCostateError&) {
                    t_step *= 0.5;
                    continue;
                }
                l2_new = sys_new.residual.norm();
                if (sys_new.min_lambda_norm > lambda_guard && l2_new < l2) {
                    accepted = true;
                    break;
                }
                t_step *= 0.5;
            }
            if (!accepted) {
                // Starting at the discretization floor leaves no strict
                // decrease to find; that is not a failure.
                if (res.iterations == 0 && l2 > 1e-6)
                    throw InnerSolveError("solve_inner: no descent step from the initialization");
                res.termination = "no_descent";
                break;
            }
        } else {
            Xi_new = Xi - step;
            sys_new = assemble(pb, Xi_new, true);  // singular costate propagates
            l2_new = sys_new.residual.norm();
            consecutive_growth = l2_new >= l2 ? consecutive_growth + 1 : 0;
            if (consecutive_growth >= 3)
                throw InnerSolveError("solve_inner: residual grew on three consecutive iterations");
        }

        const double rel_gain = (l2 - l2_new) / std::max(l2, 1e-300);
        Xi = std::move(Xi_new);
        sys = std::move(sys_new);
        l2 = l2_new;
        res.residual_history.push_back(l2);
        ++res.iterations;

        if (t_step * step.cwiseAbs().maxCoeff() < set.step_tolerance) {
            res.termination = "step";
            break;
        }
        if (set.damping == InnerDamping::Backtracking) {
            // Two-tier stagnation stop: fussy only once the residual is small,
            // so early slow progress far from the root still counts as failure
            // to converge rather than an accepted floor.
            const double stall_tol = l2 > 1e-4 ? 1e-3 : 1e-10;
            if (rel_gain < stall_tol) {
                res.termination = "stagnation";
                break;
            }
        }
    }

    res.xi = std::move(Xi);
    res.min_lambda_norm = sys.min_lambda_norm;
    return res;
}

}  // namespace pdg
