#include "pdg/system.hpp"

#include <algorithm>
#include <limits>

#include "pdg/errors.hpp"

namespace pdg {

CollocationProblem make_problem(const BoundaryConditions& bc, const ThrustProfile& profile,
                                const LanderConfig& cfg, int n_points, int n_basis) {
    if (n_basis < 1)
        throw ConfigError("make_problem: n_basis must be positive");

    CollocationProblem pb;
    pb.cfg = cfg;
    pb.bc = bc;
    pb.profile = profile;
    pb.n_points = n_points;
    pb.n_basis = n_basis;
    pb.layout = {profile.segments(), n_basis};
    pb.global = time_map(profile.times.t0(), profile.times.tf());

    const auto& b = profile.times.bounds;
    double m_start = bc.m0;
    for (int s = 0; s < profile.segments(); ++s) {
        pb.segs.push_back(segment_expression(b[s], b[s + 1], n_points, n_basis));
        const VecX& t = pb.segs.back().t_nodes;
        VecX mass = m_start - cfg.alpha * profile.levels[s] * (t.array() - b[s]);
        if (mass.minCoeff() <= 0.0)
            throw ConfigError("make_problem: mass depleted inside a segment");
        pb.beta.push_back(profile.levels[s] / mass.array());
        pb.mass.push_back(std::move(mass));
        pb.h_lam.push_back(costate_rows(pb.global, t));
        m_start -= cfg.alpha * profile.levels[s] * (b[s + 1] - b[s]);
    }
    return pb;
}

MatX xi_block(const CollocationProblem& pb, const VecX& Xi, int s) {
    const int m = pb.n_basis;
    MatX xi(m, 3);
    for (int i = 0; i < 3; ++i)
        xi.col(i) = Xi.segment(pb.layout.xi_col(s) + i * m, m);
    return xi;
}

Mat32 costate_coeff(const CollocationProblem& pb, const VecX& Xi) {
    Mat32 lam;
    const int c = pb.layout.costate_col();
    for (int i = 0; i < 3; ++i) {
        lam(i, 0) = Xi(c + 2 * i);
        lam(i, 1) = Xi(c + 2 * i + 1);
    }
    return lam;
}

CostateExpression costate_expression(const CollocationProblem& pb, const VecX& Xi) {
    return {pb.global, costate_coeff(pb, Xi)};
}

SegmentBoundary segment_boundary(const CollocationProblem& pb, const VecX& Xi, int s) {
    const int S = pb.layout.n_segments;
    SegmentBoundary sb;
    if (s == 0) {
        sb.r_start = pb.bc.r0;
        sb.v_start = pb.bc.v0;
    } else {
        const int c = pb.layout.junction_col(s - 1);
        sb.r_start = Xi.segment<3>(c);
        sb.v_start = Xi.segment<3>(c + 3);
    }
    if (s == S - 1) {
        sb.r_end = pb.bc.rf;
        sb.v_end = pb.bc.vf;
    } else {
        const int c = pb.layout.junction_col(s);
        sb.r_end = Xi.segment<3>(c);
        sb.v_end = Xi.segment<3>(c + 3);
    }
    return sb;
}

int residual_rows(const CollocationProblem& pb) {
    return 3 * pb.layout.n_segments * pb.n_points + 1;
}

ResidualSystem assemble(const CollocationProblem& pb, const VecX& Xi, bool want_jacobian) {
    const int S = pb.layout.n_segments;
    const int n = pb.n_points;
    const int m = pb.n_basis;
    const int rows = residual_rows(pb);
    const UnknownLayout& lay = pb.layout;

    ResidualSystem sys;
    sys.residual = VecX::Zero(rows);
    if (want_jacobian)
        sys.jacobian = MatX::Zero(rows, lay.dim());

    const Mat32 lam = costate_coeff(pb, Xi);
    double min_norm = std::numeric_limits<double>::infinity();

    int row = 0;
    for (int s = 0; s < S; ++s) {
        const SegmentExpression& seg = pb.segs[s];
        const SegmentBoundary sb = segment_boundary(pb, Xi, s);
        const SegmentStates st =
            eval_segment_states(seg, xi_block(pb, Xi, s), sb.r_start, sb.v_start, sb.r_end, sb.v_end);

        const MatX lv = pb.h_lam[s] * lam.transpose();  // n x 3
        double seg_min = 0.0;
        const MatX loss = dynamics_loss(st.a, lv, pb.beta[s], pb.cfg.a_g, &seg_min);
        min_norm = std::min(min_norm, seg_min);
        const VecX nl = lv.rowwise().norm();
        const VecX nl3 = nl.array().cube();

        for (int i = 0; i < 3; ++i) {
            sys.residual.segment(row, n) = loss.col(i);
            if (want_jacobian) {
                sys.jacobian.block(row, lay.xi_col(s) + i * m, n, m) = seg.P2;
                if (s > 0) {
                    sys.jacobian.block(row, lay.junction_col(s - 1) + i, n, 1) = seg.omega.wdd.col(0);
                    sys.jacobian.block(row, lay.junction_col(s - 1) + 3 + i, n, 1) = seg.omega.wdd.col(2);
                }
                if (s < S - 1) {
                    sys.jacobian.block(row, lay.junction_col(s) + i, n, 1) = seg.omega.wdd.col(1);
                    sys.jacobian.block(row, lay.junction_col(s) + 3 + i, n, 1) = seg.omega.wdd.col(3);
                }
                for (int j = 0; j < 3; ++j) {
                    VecX fac;
                    if (i == j)
                        fac = pb.beta[s].array()
                            * (1.0 / nl.array() - lv.col(i).array().square() / nl3.array());
                    else
                        fac = -pb.beta[s].array()
                            * lv.col(i).array() * lv.col(j).array() / nl3.array();
                    sys.jacobian.block(row, lay.costate_col() + 2 * j, n, 2) =
                        fac.asDiagonal() * pb.h_lam[s];
                }
            }
            row += n;
        }
    }

    // terminal transversality H(tf) = 0, with lambda_v(tf) = a0 + a1
    const Vec3 lv_f = lam.col(0) + lam.col(1);
    const double nl_f = lv_f.norm();
    const double beta_f = pb.beta.back()(n - 1);
    sys.residual(row) =
        hamiltonian_loss(lv_f, beta_f, pb.profile.levels.back(), pb.cfg.alpha, pb.cfg.a_g);
    if (want_jacobian) {
        for (int i = 0; i < 3; ++i) {
            const double d = pb.cfg.a_g(i) - beta_f * lv_f(i) / nl_f;
            sys.jacobian(row, lay.costate_col() + 2 * i) = d;
            sys.jacobian(row, lay.costate_col() + 2 * i + 1) = d;
        }
    }

    sys.min_lambda_norm = min_norm;
    return sys;
}

}  // namespace pdg
