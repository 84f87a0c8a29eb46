#include "pdg/tfc.hpp"

#include "pdg/errors.hpp"

namespace pdg {

OmegaSet omega_set(const VecX& t_nodes, double t_start, double t_end) {
    if (!(t_end > t_start))
        throw ConfigError("omega_set: t_end must exceed t_start");
    const double dt = t_end - t_start;
    const double dt2 = dt * dt, dt3 = dt2 * dt;
    const Eigen::Index n = t_nodes.size();

    OmegaSet o;
    o.w.resize(n, 4);
    o.wd.resize(n, 4);
    o.wdd.resize(n, 4);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ts = t_nodes(i) - t_start;
        const double ts2 = ts * ts, ts3 = ts2 * ts;
        o.w(i, 0) = 1.0 + 2.0 * ts3 / dt3 - 3.0 * ts2 / dt2;
        o.w(i, 1) = -2.0 * ts3 / dt3 + 3.0 * ts2 / dt2;
        o.w(i, 2) = ts + ts3 / dt2 - 2.0 * ts2 / dt;
        o.w(i, 3) = ts3 / dt2 - ts2 / dt;
        o.wd(i, 0) = 6.0 * ts2 / dt3 - 6.0 * ts / dt2;
        o.wd(i, 1) = -6.0 * ts2 / dt3 + 6.0 * ts / dt2;
        o.wd(i, 2) = 1.0 + 3.0 * ts2 / dt2 - 4.0 * ts / dt;
        o.wd(i, 3) = 3.0 * ts2 / dt2 - 2.0 * ts / dt;
        o.wdd(i, 0) = 12.0 * ts / dt3 - 6.0 / dt2;
        o.wdd(i, 1) = -12.0 * ts / dt3 + 6.0 / dt2;
        o.wdd(i, 2) = 6.0 * ts / dt2 - 4.0 / dt;
        o.wdd(i, 3) = 6.0 * ts / dt2 - 2.0 / dt;
    }
    return o;
}

namespace {

SegmentExpression build_expression(TimeMap map, VecX t_nodes, CollocationGrid grid,
                                   int n_basis) {
    SegmentExpression e;
    e.map = map;
    e.t_nodes = std::move(t_nodes);
    e.grid = std::move(grid);
    e.basis = chebyshev_eval(e.grid.z, n_basis, 4);
    e.omega = omega_set(e.t_nodes, map.t_start, map.t_end);

    VecX zb(2);
    zb << -1.0, 1.0;
    BasisEval bb = chebyshev_eval(zb, n_basis, 4);
    RowVecX h_s = bb.H0.row(0), h_e = bb.H0.row(1);
    RowVecX hd_s = map.c * bb.H1.row(0);  // time derivatives at the ends
    RowVecX hd_e = map.c * bb.H1.row(1);

    const double c = map.c;
    e.P0 = e.basis.H0
         - e.omega.w.col(0) * h_s - e.omega.w.col(1) * h_e
         - e.omega.w.col(2) * hd_s - e.omega.w.col(3) * hd_e;
    e.P1 = c * e.basis.H1
         - e.omega.wd.col(0) * h_s - e.omega.wd.col(1) * h_e
         - e.omega.wd.col(2) * hd_s - e.omega.wd.col(3) * hd_e;
    e.P2 = c * c * e.basis.H2
         - e.omega.wdd.col(0) * h_s - e.omega.wdd.col(1) * h_e
         - e.omega.wdd.col(2) * hd_s - e.omega.wdd.col(3) * hd_e;
    return e;
}

}  // namespace

SegmentExpression segment_expression(double t_start, double t_end, int n_points,
                                     int n_basis) {
    TimeMap map = time_map(t_start, t_end);
    CollocationGrid grid = collocation_grid(n_points);
    VecX t(n_points);
    for (int k = 0; k < n_points; ++k)
        t(k) = map.to_t(grid.z(k));
    t(0) = t_start;  // exact endpoints
    t(n_points - 1) = t_end;
    return build_expression(map, std::move(t), std::move(grid), n_basis);
}

SegmentExpression segment_expression(double t_start, double t_end, const VecX& t_nodes,
                                     int n_basis) {
    TimeMap map = time_map(t_start, t_end);
    CollocationGrid grid;
    grid.n_points = static_cast<int>(t_nodes.size());
    grid.z.resize(t_nodes.size());
    for (Eigen::Index k = 0; k < t_nodes.size(); ++k)
        grid.z(k) = map.to_z(t_nodes(k));
    return build_expression(map, t_nodes, std::move(grid), n_basis);
}

SegmentStates eval_segment_states(const SegmentExpression& e, const MatX& xi,
                                  const Vec3& r_start, const Vec3& v_start,
                                  const Vec3& r_end, const Vec3& v_end) {
    SegmentStates st;
    Eigen::Matrix<double, 4, 3> bd;
    bd.row(0) = r_start.transpose();
    bd.row(1) = r_end.transpose();
    bd.row(2) = v_start.transpose();
    bd.row(3) = v_end.transpose();
    st.r = e.P0 * xi + e.omega.w * bd;
    st.v = e.P1 * xi + e.omega.wd * bd;
    st.a = e.P2 * xi + e.omega.wdd * bd;
    return st;
}

Vec3 eval_costate_v(const CostateExpression& ce, double t) {
    return ce.lambda_v(t);
}

MatX costate_rows(const TimeMap& global_map, const VecX& t_nodes) {
    MatX h(t_nodes.size(), 2);
    h.col(0).setOnes();
    for (Eigen::Index i = 0; i < t_nodes.size(); ++i)
        h(i, 1) = global_map.to_z(t_nodes(i));
    return h;
}

}  // namespace pdg
