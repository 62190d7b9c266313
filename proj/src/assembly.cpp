#include "wg/assembly.hpp"

#include <cstdio>
#include <fstream>

namespace wg {

void ProblemData::validate_coefficients() const
{
    for (const Mat2* A : {&A1, &A2}) {
        if ((*A - A->transpose()).cwiseAbs().maxCoeff() > 1e-14)
            throw std::invalid_argument("viscosity coefficient is not symmetric");
        Eigen::SelfAdjointEigenSolver<Mat2> es(*A);
        if (!(es.eigenvalues().minCoeff() > 0.0))
            throw std::invalid_argument("viscosity coefficient is not positive definite");
    }
}

DofMap build_dof_map(const InterfaceMesh& mesh, int k)
{
    DofMap d;
    d.k = k;
    const int nk = pk_dim(k);
    const int ns = pk_dim(k - 1);
    d.cell_u0.resize(mesh.cells.size());
    d.edge_u1.resize(mesh.edges.size());
    d.edge_u2.assign(mesh.edges.size(), -1);
    d.cell_p.resize(mesh.cells.size());
    d.edge_nb.resize(mesh.edges.size());

    int off = 0;
    for (size_t c = 0; c < mesh.cells.size(); ++c) {
        d.cell_u0[c] = off;
        off += 2 * nk;
    }
    for (size_t e = 0; e < mesh.edges.size(); ++e) {
        d.edge_nb[e] = (mesh.edges[e].tag == EdgeTag::interface) ? k + 1 : k;
        d.edge_u1[e] = off;
        off += 2 * d.edge_nb[e];
    }
    for (size_t e = 0; e < mesh.edges.size(); ++e)
        if (mesh.edges[e].tag == EdgeTag::interface) {
            d.edge_u2[e] = off;
            off += 2 * d.edge_nb[e];
        }
    d.n_u = off;

    off = 0;
    for (size_t c = 0; c < mesh.cells.size(); ++c) {
        d.cell_p[c] = off;
        off += ns;
    }
    d.n_p = off;
    return d;
}

std::vector<int> cell_global_dofs(const MeshContext& ctx, const DofMap& dofs, int cell_id)
{
    const Cell& cell = ctx.mesh->cells[cell_id];
    const int nk = ctx.nk();
    std::vector<int> g;
    for (int i = 0; i < 2 * nk; ++i) g.push_back(dofs.cell_u0[cell_id] + i);
    for (size_t j = 0; j < cell.edges.size(); ++j) {
        const Edge& e = ctx.mesh->edges[cell.edges[j]];
        int base = dofs.edge_u1[cell.edges[j]];
        if (e.tag == EdgeTag::interface && e.owner[1] == cell_id)
            base = dofs.edge_u2[cell.edges[j]];
        for (int i = 0; i < 2 * dofs.edge_nb[cell.edges[j]]; ++i) g.push_back(base + i);
    }
    return g;
}

LocalForms local_forms(const MeshContext& ctx, int cell_id, const ProblemData& data)
{
    const CellContext& cc = ctx.cells[cell_id];
    const Cell& cell = ctx.mesh->cells[cell_id];
    const int nk = ctx.nk();
    const int ns = ctx.ns();
    const Mat2& A = data.A(cell.subdomain);

    LocalForms lf;
    lf.ops = build_local_operators(ctx, cell_id);
    const int ndof = lf.ops.ndof;

    // (A grad_w v, grad_w w)_T through the tensor-weighted mass matrix
    const MatrixXd Ms = cc.mass.topLeftCorner(ns, ns);
    MatrixXd W = MatrixXd::Zero(4 * ns, 4 * ns);
    for (int rc = 0; rc < 4; ++rc)
        for (int rc2 = 0; rc2 < 4; ++rc2) {
            int r = rc / 2, c = rc % 2, r2 = rc2 / 2, c2 = rc2 % 2;
            if (c == c2) W.block(rc * ns, rc2 * ns, ns, ns) = A(r, r2) * Ms;
        }
    lf.A = lf.ops.grad.transpose() * W * lf.ops.grad;

    // stabilizer: h_T^{-1} <Q_b v_0 - v_b, Q_b w_0 - w_b> off the interface,
    // h_T^{-1} <v_0 - v_b, w_0 - w_b> on it (no projection there)
    lf.S = MatrixXd::Zero(ndof, ndof);
    const double hinv = 1.0 / cell.diameter;
    for (size_t j = 0; j < cell.edges.size(); ++j) {
        const EdgeContext& ec = ctx.edges[cell.edges[j]];
        const bool on_interface = ctx.mesh->edges[cell.edges[j]].tag == EdgeTag::interface;
        const int nb = ec.basis.size();
        const int off = lf.ops.edge_offset[int(j)];
        const int nqe = int(ec.quad.points.size());
        auto Wq = Eigen::Map<const VectorXd>(ec.quad.weights.data(), nqe).asDiagonal();
        const MatrixXd C = ec.eval.transpose() * Wq * cc.trace[j].eval; // nb x nk
        if (on_interface) {
            const MatrixXd Gii = cc.trace[j].eval.transpose() * Wq * cc.trace[j].eval;
            for (int comp = 0; comp < 2; ++comp) {
                lf.S.block(comp * nk, comp * nk, nk, nk) += hinv * Gii;
                lf.S.block(comp * nk, off + comp * nb, nk, nb) -= hinv * C.transpose();
                lf.S.block(off + comp * nb, comp * nk, nb, nk) -= hinv * C;
                lf.S.block(off + comp * nb, off + comp * nb, nb, nb) += hinv * ec.mass;
            }
        } else {
            const MatrixXd X = ec.mass_ldlt.solve(C); // Q_b of the interior trace
            const MatrixXd CtX = C.transpose() * X;
            for (int comp = 0; comp < 2; ++comp) {
                lf.S.block(comp * nk, comp * nk, nk, nk) += hinv * CtX;
                lf.S.block(comp * nk, off + comp * nb, nk, nb) -= hinv * C.transpose();
                lf.S.block(off + comp * nb, comp * nk, nb, nk) -= hinv * C;
                lf.S.block(off + comp * nb, off + comp * nb, nb, nb) += hinv * ec.mass;
            }
        }
    }

    lf.B = -lf.ops.div_moment;

    lf.F = VectorXd::Zero(ndof);
    const auto& f = data.f(cell.subdomain);
    if (f) {
        const int nq = int(cc.quad.points.size());
        for (int q = 0; q < nq; ++q) {
            Vec2 fv = f(cc.quad.points[q]);
            lf.F.head(nk) += cc.quad.weights[q] * fv.x() * cc.eval.row(q).transpose();
            lf.F.segment(nk, nk) += cc.quad.weights[q] * fv.y() * cc.eval.row(q).transpose();
        }
    }
    return lf;
}

namespace {

void add_block(std::vector<Eigen::Triplet<double>>& trips, const std::vector<int>& rows,
               const std::vector<int>& cols, const MatrixXd& m)
{
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j)
            if (m(i, j) != 0.0) trips.emplace_back(rows[i], cols[j], m(i, j));
}

} // namespace

SaddlePointSystem assemble(const MeshContext& ctx, const ProblemData& data, Exec exec)
{
    const InterfaceMesh& mesh = *ctx.mesh;
    data.validate_coefficients();

    SaddlePointSystem sys;
    sys.dofs = build_dof_map(mesh, ctx.k());
    const int nc = int(mesh.cells.size());
    const int ns = ctx.ns();

    // per-cell local forms; embarrassingly parallel, scattered in cell order
    std::vector<LocalForms> lf(nc);
    if (exec == Exec::parallel) {
        std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 8)
        for (int c = 0; c < nc; ++c) {
            try {
                lf[c] = local_forms(ctx, c, data);
            } catch (...) {
#pragma omp critical
                if (!error) error = std::current_exception();
            }
        }
        if (error) std::rethrow_exception(error);
    } else {
        for (int c = 0; c < nc; ++c) lf[c] = local_forms(ctx, c, data);
    }

    std::vector<Eigen::Triplet<double>> ta, tb, tm;
    sys.F_full = VectorXd::Zero(sys.dofs.n_u);
    sys.gauge = VectorXd::Zero(sys.dofs.n_p);
    for (int c = 0; c < nc; ++c) {
        std::vector<int> gu = cell_global_dofs(ctx, sys.dofs, c);
        std::vector<int> gp(ns);
        for (int i = 0; i < ns; ++i) gp[i] = sys.dofs.cell_p[c] + i;
        add_block(ta, gu, gu, lf[c].A + lf[c].S);
        add_block(tb, gp, gu, lf[c].B);
        for (size_t i = 0; i < gu.size(); ++i) sys.F_full[gu[i]] += lf[c].F[int(i)];

        const CellContext& cc = ctx.cells[c];
        const int nq = int(cc.quad.points.size());
        for (int q = 0; q < nq; ++q)
            for (int m = 0; m < ns; ++m)
                sys.gauge[gp[m]] += cc.quad.weights[q] * cc.eval(q, m);
        MatrixXd mp = cc.mass.topLeftCorner(ns, ns);
        add_block(tm, gp, gp, mp);
    }

    // interface traction load against the surviving (side-1) trace
    if (data.psi) {
        for (const Edge& e : mesh.edges) {
            if (e.tag != EdgeTag::interface) continue;
            const EdgeContext& ec = ctx.edges[e.id];
            const int nb = ec.basis.size();
            const int base = sys.dofs.edge_u1[e.id];
            for (size_t q = 0; q < ec.quad.points.size(); ++q) {
                Vec2 psi = data.psi(ec.quad.points[q], ec.quad.normal[q]);
                for (int a = 0; a < nb; ++a) {
                    sys.F_full[base + a] += ec.quad.weights[q] * psi.x() * ec.eval(int(q), a);
                    sys.F_full[base + nb + a] += ec.quad.weights[q] * psi.y() * ec.eval(int(q), a);
                }
            }
        }
    }

    sys.A_full.resize(sys.dofs.n_u, sys.dofs.n_u);
    sys.A_full.setFromTriplets(ta.begin(), ta.end());
    sys.B_full.resize(sys.dofs.n_p, sys.dofs.n_u);
    sys.B_full.setFromTriplets(tb.begin(), tb.end());
    sys.M_p.resize(sys.dofs.n_p, sys.dofs.n_p);
    sys.M_p.setFromTriplets(tm.begin(), tm.end());

    // constraints: Dirichlet traces and side-2 interface elimination
    sys.x_fix = VectorXd::Zero(sys.dofs.n_u);
    std::vector<char> constrained(sys.dofs.n_u, 0);
    std::vector<std::pair<int, int>> aliased; // (side-2 dof, side-1 dof)
    auto fix_dof = [&](int dof, double value) {
        if (constrained[dof] && std::abs(sys.x_fix[dof] - value) > 1e-10)
            throw InconsistentConstraint(dof, sys.x_fix[dof], value);
        constrained[dof] = 1;
        sys.x_fix[dof] = value;
    };

    for (const Edge& e : mesh.edges) {
        const EdgeContext& ec = ctx.edges[e.id];
        const int nb2 = 2 * ec.basis.size();
        if (e.tag == EdgeTag::boundary) {
            VectorXd gb = data.g ? project_Qb(ec, data.g) : VectorXd::Zero(nb2);
            for (int i = 0; i < nb2; ++i) fix_dof(sys.dofs.edge_u1[e.id] + i, gb[i]);
        } else if (e.tag == EdgeTag::interface) {
            VectorXd jump = data.phi ? project_Qb(ec, data.phi) : VectorXd::Zero(nb2);
            for (int i = 0; i < nb2; ++i) {
                int d2 = sys.dofs.edge_u2[e.id] + i;
                fix_dof(d2, -jump[i]); // u_2b = u_1b - Q_b phi
                aliased.emplace_back(d2, sys.dofs.edge_u1[e.id] + i);
            }
        }
    }

    sys.free_index.assign(sys.dofs.n_u, -1);
    int nf = 0;
    for (int d = 0; d < sys.dofs.n_u; ++d)
        if (!constrained[d]) sys.free_index[d] = nf++;
    sys.n_free = nf;

    std::vector<Eigen::Triplet<double>> tr;
    for (int d = 0; d < sys.dofs.n_u; ++d)
        if (sys.free_index[d] >= 0) tr.emplace_back(d, sys.free_index[d], 1.0);
    for (auto& [d2, d1] : aliased) tr.emplace_back(d2, sys.free_index[d1], 1.0);
    sys.R.resize(sys.dofs.n_u, nf);
    sys.R.setFromTriplets(tr.begin(), tr.end());

    // reduced KKT with the mean-zero pressure gauge
    SpMat A_red = SpMat(sys.R.transpose()) * sys.A_full * sys.R;
    SpMat B_red = sys.B_full * sys.R;
    VectorXd F_red = sys.R.transpose() * (sys.F_full - sys.A_full * sys.x_fix);
    VectorXd G_red = -(sys.B_full * sys.x_fix);

    const int np = sys.dofs.n_p;
    const int total = nf + np + 1;
    std::vector<Eigen::Triplet<double>> tk;
    for (int o = 0; o < A_red.outerSize(); ++o)
        for (SpMat::InnerIterator it(A_red, o); it; ++it)
            tk.emplace_back(int(it.row()), int(it.col()), it.value());
    for (int o = 0; o < B_red.outerSize(); ++o)
        for (SpMat::InnerIterator it(B_red, o); it; ++it) {
            tk.emplace_back(nf + int(it.row()), int(it.col()), it.value());
            tk.emplace_back(int(it.col()), nf + int(it.row()), it.value());
        }
    for (int q = 0; q < np; ++q)
        if (sys.gauge[q] != 0.0) {
            tk.emplace_back(nf + q, nf + np, sys.gauge[q]);
            tk.emplace_back(nf + np, nf + q, sys.gauge[q]);
        }
    sys.K.resize(total, total);
    sys.K.setFromTriplets(tk.begin(), tk.end());

    sys.rhs = VectorXd::Zero(total);
    sys.rhs.head(nf) = F_red;
    sys.rhs.segment(nf, np) = G_red;
    return sys;
}

void dump_matrix(const SpMat& m, const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    char buf[64];
    for (int o = 0; o < m.outerSize(); ++o)
        for (SpMat::InnerIterator it(m, o); it; ++it) {
            std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n", (long long)it.row(),
                          (long long)it.col(), it.value());
            f << buf;
        }
}

} // namespace wg
