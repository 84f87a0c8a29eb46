#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pdg/inner.hpp"
#include "pdg/mass_costate.hpp"
#include "pdg/oracle.hpp"

using namespace pdg;

namespace {

struct Converged {
    CollocationProblem pb;
    Mat32 costate;
};

Converged descent1_converged() {
    LanderConfig cfg = derive_params(LanderConfig{});
    BoundaryConditions bc;
    bc.r0 = {-900, 10, 1500};
    bc.v0 = {30, -10, -70};
    ThrustProfile prof = make_profile(ProfileKind::MinMax,
                                      segment_times({0.0, 7.25708176, 31.26836378}), cfg);
    CollocationProblem pb = make_problem(bc, prof, cfg, 61, 20);
    InnerSettings set;
    set.max_iterations = 30;
    InnerResult res = solve_inner(pb, initialize(pb), set);
    return {pb, costate_coeff(pb, res.xi)};
}

}  // namespace

TEST_CASE("terminal condition, continuity, and fit quality") {
    Converged cv = descent1_converged();
    MassCostateSolution mc = solve_lambda_m(cv.pb, cv.costate);
    const int S = cv.pb.layout.n_segments;
    const int n = cv.pb.n_points;

    REQUIRE(static_cast<int>(mc.lambda_m.size()) == S);
    CHECK(mc.lambda_m.back()(n - 1) == 0.0);  // lambda_m(tf) exactly zero
    for (int s = 0; s + 1 < S; ++s)
        CHECK(mc.lambda_m[s](n - 1) ==
              doctest::Approx(mc.lambda_m[s + 1](0)).epsilon(1e-14));
    for (int s = 0; s < S; ++s)
        CHECK(mc.fit_residual[s] <= 1e-10);
    CHECK(mc.lambda_m0 == mc.lambda_m.front()(0));
}

TEST_CASE("mass costate decreases along the flight and stays positive") {
    Converged cv = descent1_converged();
    MassCostateSolution mc = solve_lambda_m(cv.pb, cv.costate);
    double prev = std::numeric_limits<double>::infinity();
    for (const VecX& seg : mc.lambda_m) {
        for (int k = 0; k < seg.size(); ++k) {
            CHECK(seg(k) <= prev + 1e-12);
            prev = seg(k);
        }
    }
    CHECK(mc.lambda_m0 > 0.0);
    CHECK(mc.lambda_m0 == doctest::Approx(0.1218861105).epsilon(2e-6));
}

TEST_CASE("collocation solution matches backward integration of the rate") {
    Converged cv = descent1_converged();
    MassCostateSolution mc = solve_lambda_m(cv.pb, cv.costate);
    CostateExpression ce{cv.pb.global, cv.costate};
    const double oracle = lambda_m_oracle(cv.pb.profile, cv.pb.cfg, cv.pb.bc.m0, ce);
    CHECK(std::abs(mc.lambda_m0 - oracle) <= 1e-9);
}

TEST_CASE("derivative of the fit reproduces the forcing term") {
    Converged cv = descent1_converged();
    MassCostateSolution mc = solve_lambda_m(cv.pb, cv.costate);

    // central difference across each segment's interior nodes
    for (int s = 0; s < cv.pb.layout.n_segments; ++s) {
        const VecX& t = cv.pb.segs[s].t_nodes;
        const VecX& lm = mc.lambda_m[s];
        const MatX lv = cv.pb.h_lam[s] * cv.costate.transpose();
        for (int k = 2; k < t.size() - 2; k += 7) {
            const double dt = t(k + 1) - t(k - 1);
            const double fd = (lm(k + 1) - lm(k - 1)) / dt;
            const double expect = -cv.pb.profile.levels[s] / std::pow(cv.pb.mass[s](k), 2)
                                * lv.row(k).norm();
            CHECK(fd == doctest::Approx(expect).epsilon(5e-3));
        }
    }
}
