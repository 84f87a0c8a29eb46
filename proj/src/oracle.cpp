#include "pdg/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "pdg/errors.hpp"

namespace pdg {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;
constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0, kC5 = 8.0 / 9.0;

double error_norm(const VecX& err, const VecX& y_old, const VecX& y_new, double atol,
                  double rtol) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y_old(i)), std::abs(y_new(i)));
        const double e = err(i) / sc;
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

}  // namespace

VecX integrate_dp54(const OdeRhs& f, double t0, double t1, VecX y, const OdeOptions& opts,
                    OdeStats* stats) {
    const double span = t1 - t0;
    if (span == 0.0) return y;
    const double dir = span > 0.0 ? 1.0 : -1.0;

    const Eigen::Index n = y.size();
    VecX k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y_tmp(n), y_new(n), err(n);

    double t = t0;
    f(t, y, k1);
    long evals = 1, steps = 0, rejected = 0;

    double h = opts.initial_step != 0.0 ? std::abs(opts.initial_step)
                                        : std::abs(span) * 1e-6;
    h = std::min(h, std::abs(span));

    while (dir * (t1 - t) > 0.0) {
        if (steps >= opts.max_steps)
            throw ValidationError("integrate_dp54: step limit exceeded");
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw ValidationError("integrate_dp54: step size underflow");
        double hd = dir * std::min(h, std::abs(t1 - t));

        y_tmp = y + hd * (kA21 * k1);
        f(t + kC2 * hd, y_tmp, k2);
        y_tmp = y + hd * (kA31 * k1 + kA32 * k2);
        f(t + kC3 * hd, y_tmp, k3);
        y_tmp = y + hd * (kA41 * k1 + kA42 * k2 + kA43 * k3);
        f(t + kC4 * hd, y_tmp, k4);
        y_tmp = y + hd * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
        f(t + kC5 * hd, y_tmp, k5);
        y_tmp = y + hd * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
        f(t + hd, y_tmp, k6);
        y_new = y + hd * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
        f(t + hd, y_new, k7);  // FSAL
        evals += 6;

        err = hd * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
        const double en = error_norm(err, y, y_new, opts.abs_tol, opts.rel_tol);

        if (en <= 1.0) {
            t += hd;
            y.swap(y_new);
            k1.swap(k7);
            ++steps;
            const double grow = en == 0.0 ? 10.0
                                          : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 10.0);
            h = std::abs(hd) * grow;
        } else {
            ++rejected;
            h = std::abs(hd) * std::max(0.1, 0.9 * std::pow(en, -0.2));
        }
    }

    if (stats) {
        stats->steps += steps;
        stats->rejected += rejected;
        stats->evals += evals;
    }
    return y;
}

namespace {

// State layout: [r(0..2), v(3..5), m(6), lambda_r(7..9), lambda_v(10..12), lambda_m(13)]
OdeRhs pmp_rhs(double thrust, const LanderConfig& cfg) {
    return [thrust, cfg](double, const VecX& y, VecX& dy) {
        const Vec3 v = y.segment<3>(3);
        const double m = y(6);
        if (m <= 0.0)
            throw ValidationError("propagate_oracle: mass nonpositive");
        const Vec3 lam_r = y.segment<3>(7);
        const Vec3 lam_v = y.segment<3>(10);
        const double nl = lam_v.norm();
        if (nl < kCostateFloor)
            throw ValidationError("propagate_oracle: costate norm below floor");

        dy.resize(14);
        dy.segment<3>(0) = v;
        dy.segment<3>(3) = cfg.a_g - (thrust / m) * lam_v / nl;
        dy(6) = -cfg.alpha * thrust;
        dy.segment<3>(7).setZero();
        dy.segment<3>(10) = -lam_r;
        dy(13) = -(thrust / (m * m)) * nl;
    };
}

void check_rel_tol(double rel_tol) {
    if (!(rel_tol >= 1e-13 && rel_tol <= 1e-6))
        throw ConfigError("propagate_oracle: rel_tol must lie in [1e-13, 1e-6]");
}

}  // namespace

PropagationReport propagate_oracle(const BoundaryConditions& bc, const Vec3& lambda_r0,
                                   const Vec3& lambda_v0, double lambda_m0,
                                   const ThrustProfile& profile, const LanderConfig& cfg,
                                   double rel_tol) {
    check_rel_tol(rel_tol);

    VecX y(14);
    y.segment<3>(0) = bc.r0;
    y.segment<3>(3) = bc.v0;
    y(6) = bc.m0;
    y.segment<3>(7) = lambda_r0;
    y.segment<3>(10) = lambda_v0;
    y(13) = lambda_m0;

    OdeOptions opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = 1e-13;
    OdeStats stats;

    const auto& b = profile.times.bounds;
    for (int s = 0; s < profile.segments(); ++s)
        y = integrate_dp54(pmp_rhs(profile.levels[s], cfg), b[s], b[s + 1], std::move(y), opts,
                           &stats);

    PropagationReport rep;
    rep.r_error = (y.segment<3>(0) - bc.rf).norm();
    rep.v_error = (y.segment<3>(3) - bc.vf).norm();
    rep.lambda_m_final = y(13);
    rep.mass_final = y(6);
    rep.rel_tol = rel_tol;
    rep.steps = stats.steps;
    rep.y_final = std::move(y);
    return rep;
}

double mass_quadrature(const ThrustProfile& profile, double m0, double alpha, double t,
                       double rel_tol) {
    OdeOptions opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = 1e-13;

    const auto& b = profile.times.bounds;
    VecX y(1);
    y(0) = m0;
    for (int s = 0; s < profile.segments() && b[s] < t; ++s) {
        const double t_end = std::min(t, b[s + 1]);
        const double level = profile.levels[s];
        y = integrate_dp54(
            [level, alpha](double, const VecX&, VecX& dy) { dy.resize(1); dy(0) = -alpha * level; },
            b[s], t_end, std::move(y), opts);
    }
    return y(0);
}

double lambda_m_oracle(const ThrustProfile& profile, const LanderConfig& cfg, double m0,
                       const CostateExpression& ce, double rel_tol) {
    OdeOptions opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = 1e-14;

    const auto& b = profile.times.bounds;
    VecX y(1);
    y(0) = 0.0;  // lambda_m(tf)
    for (int s = profile.segments() - 1; s >= 0; --s) {
        const double level = profile.levels[s];
        auto rhs = [&, level](double t, const VecX&, VecX& dy) {
            const double m = mass_at(profile, m0, cfg.alpha, t);
            dy.resize(1);
            dy(0) = -(level / (m * m)) * ce.lambda_v(t).norm();
        };
        y = integrate_dp54(rhs, b[s + 1], b[s], std::move(y), opts);
    }
    return y(0);
}

double hamiltonian_of_state(const VecX& y, double thrust, double alpha, const Vec3& a_g) {
    const Vec3 v = y.segment<3>(3);
    const double m = y(6);
    const Vec3 lam_r = y.segment<3>(7);
    const Vec3 lam_v = y.segment<3>(10);
    const double lam_m = y(13);
    return alpha * thrust * (1.0 - lam_m) + lam_r.dot(v) + lam_v.dot(a_g)
         - (thrust / m) * lam_v.norm();
}

VecX hamiltonian_samples(const BoundaryConditions& bc, const Vec3& lambda_r0,
                         const Vec3& lambda_v0, double lambda_m0, const ThrustProfile& profile,
                         const LanderConfig& cfg, double rel_tol) {
    check_rel_tol(rel_tol);

    VecX y(14);
    y.segment<3>(0) = bc.r0;
    y.segment<3>(3) = bc.v0;
    y(6) = bc.m0;
    y.segment<3>(7) = lambda_r0;
    y.segment<3>(10) = lambda_v0;
    y(13) = lambda_m0;

    OdeOptions opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = 1e-13;

    std::vector<double> samples;
    const auto& b = profile.times.bounds;
    for (int s = 0; s < profile.segments(); ++s) {
        const double level = profile.levels[s];
        samples.push_back(hamiltonian_of_state(y, level, cfg.alpha, cfg.a_g));
        const double mid = 0.5 * (b[s] + b[s + 1]);
        y = integrate_dp54(pmp_rhs(level, cfg), b[s], mid, std::move(y), opts);
        samples.push_back(hamiltonian_of_state(y, level, cfg.alpha, cfg.a_g));
        y = integrate_dp54(pmp_rhs(level, cfg), mid, b[s + 1], std::move(y), opts);
        samples.push_back(hamiltonian_of_state(y, level, cfg.alpha, cfg.a_g));
    }
    return Eigen::Map<VecX>(samples.data(), static_cast<Eigen::Index>(samples.size()));
}

}  // namespace pdg
