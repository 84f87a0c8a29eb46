#include "pdg/model.hpp"

#include <algorithm>
#include <cmath>

#include "pdg/errors.hpp"

namespace pdg {

LanderConfig derive_params(LanderConfig c) {
    if (c.isp <= 0.0 || c.g0 <= 0.0 || c.thrust_per_engine <= 0.0 || c.n_engines <= 0)
        throw ConfigError("derive_params: engine constants must be positive");
    if (!(c.throttle_min > 0.0 && c.throttle_min < c.throttle_max && c.throttle_max <= 1.0))
        throw ConfigError("derive_params: need 0 < throttle_min < throttle_max <= 1");
    if (!(c.cant_angle >= 0.0 && c.cant_angle < 1.5707963267948966))
        throw ConfigError("derive_params: cant angle must lie in [0, pi/2)");

    const double cosphi = std::cos(c.cant_angle);
    const double t_full = c.thrust_per_engine * c.n_engines * cosphi;
    c.t_min = c.throttle_min * t_full;
    c.t_max = c.throttle_max * t_full;
    c.alpha = 1.0 / (c.isp * c.g0 * cosphi);
    return c;
}

SegmentTimes segment_times(std::vector<double> bounds) {
    if (bounds.size() < 2)
        throw ConfigError("segment_times: need at least two boundaries");
    for (size_t i = 0; i + 1 < bounds.size(); ++i)
        if (!(bounds[i + 1] - bounds[i] > kTimeOrderMargin))
            throw ConfigError("segment_times: boundaries must increase by more than the ordering margin");
    return {std::move(bounds)};
}

ThrustProfile make_profile(ProfileKind kind, SegmentTimes times, const LanderConfig& cfg) {
    const int need = kind == ProfileKind::MinMax ? 2 : 3;
    if (times.segments() != need)
        throw ConfigError("make_profile: segment count does not match the profile kind");
    if (cfg.t_min <= 0.0 || cfg.t_max <= cfg.t_min)
        throw ConfigError("make_profile: lander config lacks derived thrust bounds");

    ThrustProfile p;
    p.kind = kind;
    p.times = std::move(times);
    if (kind == ProfileKind::MinMax)
        p.levels = {cfg.t_min, cfg.t_max};
    else
        p.levels = {cfg.t_max, cfg.t_min, cfg.t_max};
    return p;
}

int segment_index(const ThrustProfile& p, double t) {
    const auto& b = p.times.bounds;
    if (t <= b.front()) return 0;
    if (t >= b.back()) return p.segments() - 1;
    int s = 0;
    while (s + 1 < p.segments() && t >= b[s + 1])
        ++s;  // right-continuous: at a switch the later segment wins
    return s;
}

double thrust_at(const ThrustProfile& p, double t) {
    return p.levels[segment_index(p, t)];
}

double mass_at(const ThrustProfile& p, double m0, double alpha, double t) {
    const auto& b = p.times.bounds;
    const double tc = std::clamp(t, b.front(), b.back());
    double m = m0;
    for (int s = 0; s < p.segments(); ++s) {
        const double t_end = std::min(tc, b[s + 1]);
        if (t_end > b[s])
            m -= alpha * p.levels[s] * (t_end - b[s]);
        if (tc <= b[s + 1]) break;
    }
    if (m <= 0.0)
        throw ConfigError("mass_at: mass depleted before requested time");
    return m;
}

double beta_at(const ThrustProfile& p, double m0, double alpha, double t) {
    return thrust_at(p, t) / mass_at(p, m0, alpha, t);
}

MatX dynamics_loss(const MatX& a_nodes, const MatX& lambda_v_nodes, const VecX& beta_nodes,
                   const Vec3& a_g, double* min_norm_out) {
    const Eigen::Index n = a_nodes.rows();
    VecX nl = lambda_v_nodes.rowwise().norm();
    const double min_norm = nl.minCoeff();
    if (min_norm_out) *min_norm_out = min_norm;
    if (min_norm < kCostateFloor)
        throw SingularCostateError("dynamics_loss: costate norm below floor, thrust direction undefined");

    MatX out(n, 3);
    for (int i = 0; i < 3; ++i)
        out.col(i) = a_nodes.col(i).array() - a_g(i)
                   + beta_nodes.array() * lambda_v_nodes.col(i).array() / nl.array();
    return out;
}

double hamiltonian_loss(const Vec3& lambda_v_tf, double beta_tf, double thrust_tf,
                        double alpha, const Vec3& a_g) {
    return alpha * thrust_tf + lambda_v_tf.dot(a_g) - beta_tf * lambda_v_tf.norm();
}

VecX hamiltonian_history(const MatX& v_nodes, const MatX& lambda_v_nodes, const Vec3& lambda_r,
                         const VecX& lambda_m_nodes, const VecX& thrust_nodes,
                         const VecX& mass_nodes, double alpha, const Vec3& a_g) {
    VecX nl = lambda_v_nodes.rowwise().norm();
    return alpha * thrust_nodes.array() * (1.0 - lambda_m_nodes.array())
         + (v_nodes * lambda_r).array()
         + (lambda_v_nodes * a_g).array()
         - thrust_nodes.array() / mass_nodes.array() * nl.array();
}

VecX switching_function(const MatX& lambda_v_nodes, const VecX& lambda_m_nodes,
                        const VecX& mass_nodes, double alpha) {
    VecX nl = lambda_v_nodes.rowwise().norm();
    return alpha * (1.0 - lambda_m_nodes.array()) - nl.array() / mass_nodes.array();
}

}  // namespace pdg
