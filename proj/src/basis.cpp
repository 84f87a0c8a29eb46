#include "pdg/basis.hpp"

#include <cmath>
#include <numbers>

#include "pdg/errors.hpp"

namespace pdg {

TimeMap time_map(double t_start, double t_end) {
    if (!(t_end > t_start))
        throw ConfigError("time_map: t_end must exceed t_start");
    return {t_start, t_end, 2.0 / (t_end - t_start)};
}

CollocationGrid collocation_grid(int n_points) {
    if (n_points < 5)
        throw ConfigError("collocation_grid: need at least 5 points");
    const int N = n_points - 1;
    VecX z(n_points);
    for (int k = 0; k <= N; ++k)
        z(k) = -std::cos(std::numbers::pi * k / N);
    z(0) = -1.0;  // exact endpoints
    z(N) = 1.0;
    return {n_points, z};
}

BasisEval chebyshev_eval(const VecX& z, int n_basis, int degree_offset) {
    if (n_basis < 1)
        throw ConfigError("chebyshev_eval: n_basis must be positive");
    if (degree_offset < 0)
        throw ConfigError("chebyshev_eval: degree_offset must be nonnegative");

    const int deg_max = degree_offset + n_basis - 1;
    const Eigen::Index n = z.size();
    MatX P = MatX::Zero(n, deg_max + 1);
    MatX D1 = MatX::Zero(n, deg_max + 1);
    MatX D2 = MatX::Zero(n, deg_max + 1);

    P.col(0).setOnes();
    if (deg_max >= 1) {
        P.col(1) = z;
        D1.col(1).setOnes();
    }
    for (int j = 1; j < deg_max; ++j) {
        P.col(j + 1) = 2.0 * z.cwiseProduct(P.col(j)) - P.col(j - 1);
        D1.col(j + 1) = 2.0 * P.col(j) + 2.0 * z.cwiseProduct(D1.col(j)) - D1.col(j - 1);
        D2.col(j + 1) = 4.0 * D1.col(j) + 2.0 * z.cwiseProduct(D2.col(j)) - D2.col(j - 1);
    }

    BasisEval be;
    be.n_basis = n_basis;
    be.degree_offset = degree_offset;
    be.H0 = P.rightCols(n_basis);
    be.H1 = D1.rightCols(n_basis);
    be.H2 = D2.rightCols(n_basis);
    return be;
}

BasisEval chebyshev_eval(const CollocationGrid& grid, int n_basis, int degree_offset) {
    return chebyshev_eval(grid.z, n_basis, degree_offset);
}

}  // namespace pdg
