#include "wg/weak_ops.hpp"

namespace wg {

LocalOperators build_local_operators(const MeshContext& ctx, int cell_id)
{
    const CellContext& cc = ctx.cells[cell_id];
    const Cell& cell = ctx.mesh->cells[cell_id];
    const int nk = ctx.nk();
    const int ns = ctx.ns();
    const int nedges = int(cell.edges.size());

    LocalOperators ops;
    ops.edge_offset.resize(nedges);
    int ndof = 2 * nk;
    for (int i = 0; i < nedges; ++i) {
        ops.edge_offset[i] = ndof;
        ndof += 2 * ctx.edges[cell.edges[i]].basis.size();
    }
    ops.ndof = ndof;

    // (nabla_w v, q)_T = -(v_0, div q)_T + <v_b, q n>_dT for all tensor
    // test functions q = e_{rc} sigma_m.  Rows follow the (r,c) block order.
    MatrixXd Egrad = MatrixXd::Zero(4 * ns, ndof);
    MatrixXd Ediv = MatrixXd::Zero(ns, ndof);

    const int nq = int(cc.quad.points.size());
    for (int q = 0; q < nq; ++q) {
        const double w = cc.quad.weights[q];
        auto phi = cc.eval.row(q).head(nk);
        auto dxs = cc.dx.row(q).head(ns);
        auto dys = cc.dy.row(q).head(ns);
        for (int m = 0; m < ns; ++m) {
            // -(v_0, div q): div of e_{rc} sigma_m has component r equal to d_c sigma_m
            double gx = w * dxs[m], gy = w * dys[m];
            for (int i = 0; i < nk; ++i) {
                double px = gx * phi[i], py = gy * phi[i];
                Egrad(0 * ns + m, i) -= px;      // (r,c)=(0,0), comp 0
                Egrad(1 * ns + m, i) -= py;      // (0,1)
                Egrad(2 * ns + m, nk + i) -= px; // (1,0), comp 1
                Egrad(3 * ns + m, nk + i) -= py; // (1,1)
                Ediv(m, i) -= px;                // -(v_0, grad tau) component 0
                Ediv(m, nk + i) -= py;
            }
        }
    }

    for (int i = 0; i < nedges; ++i) {
        const EdgeContext& ec = ctx.edges[cell.edges[i]];
        const int nb = ec.basis.size();
        const int off = ops.edge_offset[i];
        const double nsign = cc.trace[i].nsign;
        const int nqe = int(ec.quad.points.size());
        for (int q = 0; q < nqe; ++q) {
            const double w = ec.quad.weights[q];
            const Vec2 n = nsign * ec.quad.normal[q];
            auto sig = cc.trace[i].eval.row(q).head(ns);
            auto le = ec.eval.row(q);
            for (int m = 0; m < ns; ++m) {
                double sx = w * sig[m] * n.x(), sy = w * sig[m] * n.y();
                for (int a = 0; a < nb; ++a) {
                    // <v_b, q n>: q n for e_{rc} sigma_m has component r = sigma_m n_c
                    Egrad(0 * ns + m, off + a) += sx * le[a];
                    Egrad(1 * ns + m, off + a) += sy * le[a];
                    Egrad(2 * ns + m, off + nb + a) += sx * le[a];
                    Egrad(3 * ns + m, off + nb + a) += sy * le[a];
                    // <v_b, tau n> = <v_b . n, sigma_m>
                    Ediv(m, off + a) += sx * le[a];
                    Ediv(m, off + nb + a) += sy * le[a];
                }
            }
        }
    }

    ops.grad.resize(4 * ns, ndof);
    for (int c = 0; c < 4; ++c)
        ops.grad.middleRows(c * ns, ns) = cc.mass_s_ldlt.solve(Egrad.middleRows(c * ns, ns));
    ops.div = cc.mass_s_ldlt.solve(Ediv);
    ops.div_moment = std::move(Ediv);
    return ops;
}

} // namespace wg
