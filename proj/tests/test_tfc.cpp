#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "pdg/tfc.hpp"

using namespace pdg;

namespace {

Vec3 rand_vec(std::mt19937& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("switching functions pick out the boundary data at the endpoints") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ut(0.0, 50.0), ud(0.5, 80.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double t0 = ut(rng), tf = t0 + ud(rng);
        VecX ends(2);
        ends << t0, tf;
        OmegaSet om = omega_set(ends, t0, tf);

        VecX w0_expect(4), wf_expect(4), wd0_expect(4), wdf_expect(4);
        w0_expect << 1, 0, 0, 0;
        wf_expect << 0, 1, 0, 0;
        wd0_expect << 0, 0, 1, 0;
        wdf_expect << 0, 0, 0, 1;
        CHECK((om.w.row(0).transpose() - w0_expect).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((om.w.row(1).transpose() - wf_expect).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((om.wd.row(0).transpose() - wd0_expect).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((om.wd.row(1).transpose() - wdf_expect).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("switching function derivatives agree with finite differences") {
    const double t0 = 3.0, tf = 17.5, h = 1e-6;
    VecX t(25);
    for (int i = 0; i < 25; ++i)
        t(i) = t0 + (tf - t0 - 2e-3) * (i / 24.0) + 1e-3;
    OmegaSet om = omega_set(t, t0, tf);
    OmegaSet omp = omega_set(t.array() + h, t0, tf);
    OmegaSet omm = omega_set(t.array() - h, t0, tf);
    CHECK(((omp.w - omm.w) / (2 * h) - om.wd).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(((omp.wd - omm.wd) / (2 * h) - om.wdd).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("constrained expression embeds random boundary data exactly") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ut(0.0, 40.0), ud(0.5, 60.0), uxi(-50.0, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double t0 = ut(rng), tf = t0 + ud(rng);
        SegmentExpression expr = segment_expression(t0, tf, 21, 9);
        MatX xi(9, 3);
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 3; ++j) xi(i, j) = uxi(rng);
        const Vec3 r0 = rand_vec(rng, 1500), v0 = rand_vec(rng, 90);
        const Vec3 r1 = rand_vec(rng, 1500), v1 = rand_vec(rng, 90);

        SegmentStates st = eval_segment_states(expr, xi, r0, v0, r1, v1);
        CHECK((st.r.row(0).transpose() - r0).norm() <= 1e-10);
        CHECK((st.r.row(20).transpose() - r1).norm() <= 1e-10);
        CHECK((st.v.row(0).transpose() - v0).norm() <= 1e-10);
        CHECK((st.v.row(20).transpose() - v1).norm() <= 1e-10);
    }
}

TEST_CASE("projected basis vanishes at the endpoints") {
    SegmentExpression expr = segment_expression(1.0, 9.0, 15, 8);
    CHECK(expr.P0.row(0).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(expr.P0.row(14).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(expr.P1.row(0).cwiseAbs().maxCoeff() <= 1e-11);
    CHECK(expr.P1.row(14).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("zero coefficients reduce to the Hermite cubic") {
    const double t0 = 0.0, tf = 4.0;
    SegmentExpression expr = segment_expression(t0, tf, 33, 7);
    MatX xi = MatX::Zero(7, 3);
    const Vec3 r0{10, -4, 3}, v0{1, 2, -1}, r1{-6, 0, 12}, v1{0.5, -2, 4};
    SegmentStates st = eval_segment_states(expr, xi, r0, v0, r1, v1);

    for (int k = 0; k < 33; ++k) {
        const double t = expr.t_nodes(k), dt = tf - t0;
        const double s = (t - t0) / dt;
        const double h00 = 1 + 2 * s * s * s - 3 * s * s;
        const double h01 = -2 * s * s * s + 3 * s * s;
        const double h10 = dt * (s - 2 * s * s + s * s * s);
        const double h11 = dt * (s * s * s - s * s);
        const Vec3 expect = h00 * r0 + h01 * r1 + h10 * v0 + h11 * v1;
        CHECK((st.r.row(k).transpose() - expect).norm() <= 1e-10);
    }
}

TEST_CASE("velocity and acceleration rows are time derivatives of position") {
    SegmentExpression ea = segment_expression(2.0, 10.0, 41, 10);
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    MatX xi(10, 3);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 3; ++j) xi(i, j) = u(rng);
    const Vec3 r0{100, 50, 900}, v0{10, -4, -30}, r1{0, 0, 0}, v1{0, 0, 0};

    const double h = 1e-5;
    VecX tp = ea.t_nodes.array() + h, tm = ea.t_nodes.array() - h;
    SegmentExpression ep = segment_expression(2.0, 10.0, tp, 10);
    SegmentExpression em = segment_expression(2.0, 10.0, tm, 10);
    SegmentStates s0 = eval_segment_states(ea, xi, r0, v0, r1, v1);
    SegmentStates sp = eval_segment_states(ep, xi, r0, v0, r1, v1);
    SegmentStates sm = eval_segment_states(em, xi, r0, v0, r1, v1);

    // interior nodes only: the Chebyshev derivatives peak toward |z| = 1,
    // where the difference quotient's truncation term blows up
    double worst_v = 0.0, worst_a = 0.0;
    int used = 0;
    for (int k = 0; k < 41; ++k) {
        if (std::abs(ea.grid.z(k)) > 0.8) continue;
        ++used;
        worst_v = std::max(
            worst_v, ((sp.r.row(k) - sm.r.row(k)) / (2 * h) - s0.v.row(k)).cwiseAbs().maxCoeff());
        worst_a = std::max(
            worst_a, ((sp.v.row(k) - sm.v.row(k)) / (2 * h) - s0.a.row(k)).cwiseAbs().maxCoeff());
    }
    CHECK(used >= 20);
    CHECK(worst_v < 1e-6);
    CHECK(worst_a < 1e-6);
}

TEST_CASE("costate expression is affine with constant position costate") {
    TimeMap map = time_map(0.0, 30.0);
    Mat32 coeff;
    coeff << 0.4, -0.1, 0.2, 0.3, -0.6, 0.05;
    CostateExpression ce{map, coeff};

    CHECK((ce.lambda_v(0.0) - (coeff.col(0) - coeff.col(1))).norm() <= 1e-14);
    CHECK((ce.lambda_v(30.0) - (coeff.col(0) + coeff.col(1))).norm() <= 1e-14);
    CHECK((eval_costate_v(ce, 12.0) - ce.lambda_v(12.0)).norm() == 0.0);

    // lambda_r = -d(lambda_v)/dt, uniform in t
    const double h = 1e-6;
    Vec3 fd = (ce.lambda_v(10.0 + h) - ce.lambda_v(10.0 - h)) / (2 * h);
    CHECK((ce.lambda_r() + fd).norm() <= 1e-9);

    VecX t(3);
    t << 0.0, 15.0, 30.0;
    MatX rows = costate_rows(map, t);
    REQUIRE(rows.rows() == 3);
    CHECK(rows(0, 0) == 1.0);
    CHECK(rows(0, 1) == doctest::Approx(-1.0));
    CHECK(rows(1, 1) == doctest::Approx(0.0));
    CHECK(rows(2, 1) == doctest::Approx(1.0));
}
