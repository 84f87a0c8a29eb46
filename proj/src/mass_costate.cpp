#include "pdg/mass_costate.hpp"

namespace pdg {

MassCostateSolution solve_lambda_m(const CollocationProblem& pb, const Mat32& lam) {
    const int S = pb.layout.n_segments;

    MassCostateSolution sol;
    sol.xi.resize(S);
    sol.lambda_m.resize(S);
    sol.fit_residual.resize(S);

    VecX z_end(1);
    z_end << 1.0;
    const RowVecX h_end = chebyshev_eval(z_end, pb.n_basis, 1).H0.row(0);

    double end_value = 0.0;  // lambda_m at the segment's right boundary
    for (int s = S - 1; s >= 0; --s) {
        const SegmentExpression& seg = pb.segs[s];
        const BasisEval bl = chebyshev_eval(seg.grid, pb.n_basis, 1);

        const VecX nl = (pb.h_lam[s] * lam.transpose()).rowwise().norm();
        const VecX f = -(pb.profile.levels[s] * nl.array() / pb.mass[s].array().square());

        const MatX A = seg.map.c * bl.H1;  // d/dt of the expansion at the nodes
        const VecX xs = A.colPivHouseholderQr().solve(f);
        sol.fit_residual[s] = (A * xs - f).norm();

        // Anchor the expansion at the right end so values chain backward.
        sol.xi[s] = xs;
        sol.lambda_m[s] = ((bl.H0.rowwise() - h_end) * xs).array() + end_value;
        end_value = sol.lambda_m[s](0);
    }
    sol.lambda_m0 = end_value;
    return sol;
}

}  // namespace pdg
