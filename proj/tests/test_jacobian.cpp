#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "pdg/inner.hpp"
#include "pdg/system.hpp"

using namespace pdg;

namespace {

CollocationProblem reference_problem(int n_basis) {
    LanderConfig cfg = derive_params(LanderConfig{});
    BoundaryConditions bc;
    bc.r0 = {-200, 100, 1500};
    bc.v0 = {85, 50, -65};
    ThrustProfile prof = make_profile(
        ProfileKind::MaxMinMax, segment_times({0.0, 32.41774972, 38.83750017, 44.82292095}), cfg);
    return make_problem(bc, prof, cfg, 61, n_basis);
}

MatX fd_jacobian(const CollocationProblem& pb, const VecX& Xi, double h) {
    const int rows = residual_rows(pb);
    MatX J(rows, Xi.size());
    for (int j = 0; j < Xi.size(); ++j) {
        VecX xp = Xi, xm = Xi;
        xp(j) += h;
        xm(j) -= h;
        J.col(j) = (assemble(pb, xp, false).residual - assemble(pb, xm, false).residual) / (2 * h);
    }
    return J;
}

}  // namespace

TEST_CASE("residual and Jacobian dimensions") {
    CollocationProblem pb = reference_problem(16);
    CHECK(pb.layout.dim() == 162);
    CHECK(residual_rows(pb) == 550);
    VecX xi0 = initialize(pb);
    ResidualSystem sys = assemble(pb, xi0, true);
    CHECK(sys.residual.size() == 550);
    CHECK(sys.jacobian.rows() == 550);
    CHECK(sys.jacobian.cols() == 162);
    ResidualSystem no_jac = assemble(pb, xi0, false);
    CHECK(no_jac.jacobian.size() == 0);
    CHECK((no_jac.residual - sys.residual).norm() == 0.0);
}

TEST_CASE("analytic Jacobian matches central differences along the solve path") {
    CollocationProblem pb = reference_problem(10);
    InnerSettings set;
    VecX xi = initialize(pb);

    for (int stage = 0; stage < 4; ++stage) {
        ResidualSystem sys = assemble(pb, xi, true);
        MatX fd = fd_jacobian(pb, xi, 1e-6);
        const double scale = sys.jacobian.cwiseAbs().maxCoeff();
        CHECK((fd - sys.jacobian).cwiseAbs().maxCoeff() / scale <= 1e-5);

        // advance a couple of damped Gauss-Newton steps to the next iterate
        set.max_iterations = 2;
        xi = solve_inner(pb, xi, set).xi;
    }
}

TEST_CASE("Jacobian matches central differences at random feasible points") {
    CollocationProblem pb = reference_problem(8);
    std::mt19937 rng(99);
    std::normal_distribution<double> g(0.0, 1.0);
    InnerSettings set;
    set.max_iterations = 6;
    VecX base = solve_inner(pb, initialize(pb), set).xi;

    for (int trial = 0; trial < 5; ++trial) {
        VecX xi = base;
        for (int j = 0; j < xi.size(); ++j) xi(j) += 0.02 * g(rng);
        ResidualSystem sys = assemble(pb, xi, true);
        MatX fd = fd_jacobian(pb, xi, 1e-6);
        const double scale = sys.jacobian.cwiseAbs().maxCoeff();
        CHECK((fd - sys.jacobian).cwiseAbs().maxCoeff() / scale <= 1e-5);
    }
}

TEST_CASE("coefficient columns only touch their own segment") {
    CollocationProblem pb = reference_problem(9);
    VecX xi0 = initialize(pb);
    ResidualSystem sys = assemble(pb, xi0, true);
    const int n = pb.n_points;
    const int S = pb.layout.n_segments;

    for (int s = 0; s < S; ++s) {
        for (int c = pb.layout.xi_col(s); c < pb.layout.xi_col(s) + 3 * pb.n_basis; ++c) {
            for (int other = 0; other < S; ++other) {
                if (other == s) continue;
                CHECK(sys.jacobian.col(c).segment(3 * n * other, 3 * n).cwiseAbs().maxCoeff() ==
                      0.0);
            }
            // the terminal row depends only on the costate coefficients
            CHECK(sys.jacobian(sys.jacobian.rows() - 1, c) == 0.0);
        }
    }
}

TEST_CASE("junction columns couple exactly the two adjacent segments") {
    CollocationProblem pb = reference_problem(9);
    VecX xi0 = initialize(pb);
    ResidualSystem sys = assemble(pb, xi0, true);
    const int n = pb.n_points;
    const int S = pb.layout.n_segments;

    for (int s = 0; s + 1 < S; ++s) {
        for (int c = pb.layout.junction_col(s); c < pb.layout.junction_col(s) + 6; ++c) {
            CHECK(sys.jacobian.col(c).segment(3 * n * s, 3 * n).cwiseAbs().maxCoeff() > 0.0);
            CHECK(sys.jacobian.col(c).segment(3 * n * (s + 1), 3 * n).cwiseAbs().maxCoeff() > 0.0);
            for (int other = 0; other < S; ++other) {
                if (other == s || other == s + 1) continue;
                CHECK(sys.jacobian.col(c).segment(3 * n * other, 3 * n).cwiseAbs().maxCoeff() ==
                      0.0);
            }
        }
    }

    // junction blocks are the curvature rows of the constrained expression:
    // left segment sees its own end columns, right segment its start columns
    const int jc = pb.layout.junction_col(0);
    const SegmentExpression& left = pb.segs[0];
    const SegmentExpression& right = pb.segs[1];
    for (int k = 0; k < n; ++k) {
        CHECK(sys.jacobian(k, jc) == doctest::Approx(left.omega.wdd(k, 1)).epsilon(1e-12));
        CHECK(sys.jacobian(k, jc + 3) == doctest::Approx(left.omega.wdd(k, 3)).epsilon(1e-12));
        CHECK(sys.jacobian(3 * n + k, jc) ==
              doctest::Approx(right.omega.wdd(k, 0)).epsilon(1e-12));
        CHECK(sys.jacobian(3 * n + k, jc + 3) ==
              doctest::Approx(right.omega.wdd(k, 2)).epsilon(1e-12));
    }
}

TEST_CASE("terminal Hamiltonian row differentiates the costate pair") {
    CollocationProblem pb = reference_problem(9);
    VecX xi0 = initialize(pb);
    ResidualSystem sys = assemble(pb, xi0, true);
    const int hrow = static_cast<int>(sys.jacobian.rows()) - 1;
    const int cc = pb.layout.costate_col();

    const Mat32 coeff = costate_coeff(pb, xi0);
    const Vec3 lv = coeff.col(0) + coeff.col(1);  // z(tf) = 1
    const double nl = lv.norm();
    const double beta_f = pb.beta.back()(pb.n_points - 1);
    for (int i = 0; i < 3; ++i) {
        const double expect = pb.cfg.a_g(i) - beta_f * lv(i) / nl;
        CHECK(sys.jacobian(hrow, cc + 2 * i) == doctest::Approx(expect).epsilon(1e-12));
        CHECK(sys.jacobian(hrow, cc + 2 * i + 1) == doctest::Approx(expect).epsilon(1e-12));
    }
}
