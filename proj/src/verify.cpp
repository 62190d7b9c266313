#include "wg/verify.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace wg {

namespace {

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return lo + (hi - lo) * uniform01(rng);
}

} // namespace

// ---- exact-field projections --------------------------------------------

VectorXd project_exact_velocity(const MeshContext& ctx, const DofMap& dofs,
                                const ManufacturedProblem& prob)
{
    const InterfaceMesh& mesh = *ctx.mesh;
    VectorXd u = VectorXd::Zero(dofs.n_u);
    for (size_t c = 0; c < mesh.cells.size(); ++c) {
        VectorXd q0 = project_Q0(ctx.cells[c], prob.velocity(mesh.cells[c].subdomain));
        u.segment(dofs.cell_u0[c], q0.size()) = q0;
    }
    for (size_t e = 0; e < mesh.edges.size(); ++e) {
        const Edge& edge = mesh.edges[e];
        if (edge.tag == EdgeTag::interface) {
            VectorXd q1 = project_Qb(ctx.edges[e], prob.omega1.u);
            VectorXd q2 = project_Qb(ctx.edges[e], prob.omega2.u);
            u.segment(dofs.edge_u1[e], q1.size()) = q1;
            u.segment(dofs.edge_u2[e], q2.size()) = q2;
        } else {
            Subdomain s = mesh.cells[edge.owner[0]].subdomain;
            VectorXd qb = project_Qb(ctx.edges[e], prob.velocity(s));
            u.segment(dofs.edge_u1[e], qb.size()) = qb;
        }
    }
    return u;
}

VectorXd project_exact_pressure(const MeshContext& ctx, const DofMap& dofs,
                                const ManufacturedProblem& prob)
{
    const InterfaceMesh& mesh = *ctx.mesh;
    VectorXd p = VectorXd::Zero(dofs.n_p);
    for (size_t c = 0; c < mesh.cells.size(); ++c) {
        VectorXd pc = project_scalar(ctx.cells[c], prob.pressure(mesh.cells[c].subdomain),
                                     ctx.k() - 1);
        p.segment(dofs.cell_p[c], pc.size()) = pc;
    }
    return p;
}

double pressure_mean(const MeshContext& ctx, const ManufacturedProblem& prob)
{
    double integral = 0.0, area = 0.0;
    for (size_t c = 0; c < ctx.cells.size(); ++c) {
        auto pf = prob.pressure(ctx.mesh->cells[c].subdomain);
        const CellContext& cc = ctx.cells[c];
        for (size_t q = 0; q < cc.quad.points.size(); ++q) {
            integral += cc.quad.weights[q] * pf(cc.quad.points[q]);
            area += cc.quad.weights[q];
        }
    }
    return integral / area;
}

// ---- error norms ---------------------------------------------------------

double energy_norm(const SaddlePointSystem& sys, const VectorXd& u_full)
{
    return std::sqrt(std::max(0.0, u_full.dot(sys.A_full * u_full)));
}

double energy_error(const MeshContext& ctx, const SaddlePointSystem& sys,
                    const WGSolution& sol, const ManufacturedProblem& prob)
{
    VectorXd e = project_exact_velocity(ctx, sys.dofs, prob) - sol.u;
    return energy_norm(sys, e);
}

L2Errors l2_errors(const MeshContext& ctx, const SaddlePointSystem& sys,
                   const WGSolution& sol, const ManufacturedProblem& prob)
{
    const DofMap& dofs = sys.dofs;
    const int nk = ctx.nk();
    const int ns = ctx.ns();
    VectorXd uex = project_exact_velocity(ctx, dofs, prob);
    VectorXd pex = project_exact_pressure(ctx, dofs, prob);
    const double mean = pressure_mean(ctx, prob);

    L2Errors err;
    double su = 0.0, sp = 0.0, sps = 0.0;
    for (size_t c = 0; c < ctx.cells.size(); ++c) {
        const MatrixXd& M = ctx.cells[c].mass;
        for (int comp = 0; comp < 2; ++comp) {
            VectorXd d = uex.segment(dofs.cell_u0[c] + comp * nk, nk) -
                         sol.u.segment(dofs.cell_u0[c] + comp * nk, nk);
            su += d.dot(M * d);
        }
        VectorXd dp = pex.segment(dofs.cell_p[c], ns) - sol.p.segment(dofs.cell_p[c], ns);
        sp += dp.dot(M.topLeftCorner(ns, ns) * dp);
        dp[0] -= mean; // shift the exact projection to mean zero
        sps += dp.dot(M.topLeftCorner(ns, ns) * dp);
    }
    err.u = std::sqrt(su);
    err.p_raw = std::sqrt(sp);
    err.p_shifted = std::sqrt(sps);
    return err;
}

// ---- convergence studies --------------------------------------------------

InterfaceMesh build_problem_mesh(const ManufacturedProblem& prob, int n, MeshKind kind,
                                 bool straighten)
{
    InterfaceMesh bg = build_background_mesh(prob.domain, n, kind);
    InterfaceMesh fitted = fit_interface(bg, prob.curve);
    return straighten ? straighten_interface(fitted) : fitted;
}

void ErrorReport::compute_orders()
{
    energy_order.clear();
    l2u_order.clear();
    l2p_order.clear();
    for (size_t i = 1; i < rows.size(); ++i) {
        double lh = std::log(rows[i - 1].h / rows[i].h);
        energy_order.push_back(std::log(rows[i - 1].energy / rows[i].energy) / lh);
        l2u_order.push_back(std::log(rows[i - 1].l2u / rows[i].l2u) / lh);
        l2p_order.push_back(std::log(rows[i - 1].l2p / rows[i].l2p) / lh);
    }
}

std::string ErrorReport::csv() const
{
    std::ostringstream os;
    os << "n,h,energy_err,energy_order,l2u_err,l2u_order,l2p_err,l2p_order\n";
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.4e", v);
        return std::string(buf);
    };
    auto ord = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.3f", v);
        return std::string(buf);
    };
    for (size_t i = 0; i < rows.size(); ++i) {
        const ErrorRow& r = rows[i];
        os << r.n << "," << num(r.h) << "," << num(r.energy) << ","
           << (i ? ord(energy_order[i - 1]) : "") << "," << num(r.l2u) << ","
           << (i ? ord(l2u_order[i - 1]) : "") << "," << num(r.l2p) << ","
           << (i ? ord(l2p_order[i - 1]) : "") << "\n";
    }
    return os.str();
}

ErrorReport convergence_study(const StudyConfig& cfg)
{
    if (cfg.levels < 1) throw std::invalid_argument("levels must be >= 1");
    ManufacturedProblem prob = make_problem(cfg.problem);
    prob.chord_interface_data = cfg.straighten;
    ProblemData data = prob.data();
    SchemeOptions opts{cfg.k, cfg.quad_exactness};

    ErrorReport report;
    for (int n = 1; n <= cfg.levels; ++n) {
        InterfaceMesh mesh;
        try {
            mesh = build_problem_mesh(prob, n, cfg.kind, cfg.straighten);
        } catch (const std::exception& ex) {
            throw std::runtime_error("level " + std::to_string(n) + ": " + ex.what());
        }
        MeshContext ctx = build_context(mesh, opts, cfg.exec);
        SaddlePointSystem sys = assemble(ctx, data, cfg.exec);
        WGSolution sol = solve(sys);

        ErrorRow row;
        row.n = n;
        row.h = mesh.h();
        row.energy = energy_error(ctx, sys, sol, prob);
        L2Errors l2 = l2_errors(ctx, sys, sol, prob);
        row.l2u = l2.u;
        row.l2p = l2.p_shifted;
        row.l2p_raw = l2.p_raw;
        row.div_residual = sol.residuals.divergence;
        row.n_dofs = sys.total_dim();
        report.rows.push_back(row);
    }
    report.compute_orders();
    return report;
}

// ---- patch test ------------------------------------------------------------

namespace {

ManufacturedProblem patch_problem(int k)
{
    ExactField f;
    switch (k) {
    case 1:
        f.u = [](const Vec2& v) -> Vec2 { return {v.y(), v.x()}; };
        f.grad_u = [](const Vec2&) -> Mat2 { return (Mat2() << 0, 1, 1, 0).finished(); };
        f.lap_u = [](const Vec2&) -> Vec2 { return {0, 0}; };
        f.p = [](const Vec2&) { return 0.0; };
        f.grad_p = [](const Vec2&) -> Vec2 { return {0, 0}; };
        break;
    case 2:
        f.u = [](const Vec2& v) -> Vec2 { return {v.x() * v.x(), -2 * v.x() * v.y()}; };
        f.grad_u = [](const Vec2& v) -> Mat2 {
            return (Mat2() << 2 * v.x(), 0, -2 * v.y(), -2 * v.x()).finished();
        };
        f.lap_u = [](const Vec2&) -> Vec2 { return {2, 0}; };
        f.p = [](const Vec2& v) { return v.x(); };
        f.grad_p = [](const Vec2&) -> Vec2 { return {1, 0}; };
        break;
    default:
        f.u = [](const Vec2& v) -> Vec2 {
            return {v.y() * v.y() * v.y(), v.x() * v.x() * v.x()};
        };
        f.grad_u = [](const Vec2& v) -> Mat2 {
            return (Mat2() << 0, 3 * v.y() * v.y(), 3 * v.x() * v.x(), 0).finished();
        };
        f.lap_u = [](const Vec2& v) -> Vec2 { return {6 * v.y(), 6 * v.x()}; };
        f.p = [](const Vec2& v) { return v.x() * v.y(); };
        f.grad_p = [](const Vec2& v) -> Vec2 { return {v.y(), v.x()}; };
        break;
    }
    ManufacturedProblem prob;
    prob.id = 0;
    prob.omega1 = f;
    prob.omega2 = f;
    return prob;
}

} // namespace

PatchResult patch_test(int k, MeshKind kind, int n)
{
    ManufacturedProblem prob = patch_problem(k);
    InterfaceMesh mesh = build_background_mesh(prob.domain, n, kind);
    MeshContext ctx = build_context(mesh, SchemeOptions{k});
    SaddlePointSystem sys = assemble(ctx, prob.data());
    WGSolution sol = solve(sys);

    PatchResult res;
    res.energy = energy_error(ctx, sys, sol, prob);
    L2Errors l2 = l2_errors(ctx, sys, sol, prob);
    res.l2u = l2.u;
    res.l2p = l2.p_shifted;
    return res;
}

// ---- inf-sup probe ----------------------------------------------------------

double infsup_probe(const SaddlePointSystem& sys, int max_iter, double tol)
{
    const int nf = sys.n_free;
    const int np = sys.dofs.n_p;
    if (sys.gauge.norm() == 0.0) return 0.0; // constant pressure sits in the kernel
    KKTSolver solver(sys);

    std::mt19937_64 rng(0x5eedu);
    VectorXd rho(np);
    for (int i = 0; i < np; ++i) rho[i] = uniform(rng, -1.0, 1.0);
    rho /= std::sqrt(rho.dot(sys.M_p * rho));

    double theta = 0.0, theta_old = -1.0;
    for (int it = 0; it < max_iter; ++it) {
        VectorXd m = sys.M_p * rho;
        VectorXd rhs = VectorXd::Zero(nf + np + 1);
        rhs.segment(nf, np) = -m; // K [v; rho'; lam] = [0; -m; 0] gives rho' = S^{-1} m
        VectorXd z = solver.solve(rhs);
        VectorXd next = z.segment(nf, np);
        theta = rho.dot(sys.M_p * next); // -> 1 / lambda_min(S, M_p)
        double nn = std::sqrt(next.dot(sys.M_p * next));
        if (!(nn > 0.0) || !std::isfinite(nn))
            return 0.0; // constant-pressure kernel: no gauge, beta = 0
        rho = next / nn;
        if (theta_old > 0.0 && std::abs(theta - theta_old) <= tol * std::abs(theta)) break;
        theta_old = theta;
    }
    return 1.0 / std::sqrt(theta);
}

// ---- boundary functionals ---------------------------------------------------

namespace {

// Values of (v_0 - v_b) at the quadrature points of cell edge slot j.
MatrixXd trace_mismatch(const MeshContext& ctx, const DofMap& dofs, int cell_id, int slot,
                        const VectorXd& v_full)
{
    const CellContext& cc = ctx.cells[cell_id];
    const Cell& cell = ctx.mesh->cells[cell_id];
    const int eid = cell.edges[slot];
    const EdgeContext& ec = ctx.edges[eid];
    const Edge& edge = ctx.mesh->edges[eid];
    const int nk = ctx.nk();
    const int nb = ec.basis.size();

    int base = dofs.edge_u1[eid];
    if (edge.tag == EdgeTag::interface && edge.owner[1] == cell_id) base = dofs.edge_u2[eid];

    MatrixXd vals(ec.quad.points.size(), 2);
    for (int comp = 0; comp < 2; ++comp) {
        VectorXd ci = v_full.segment(dofs.cell_u0[cell_id] + comp * nk, nk);
        VectorXd cb = v_full.segment(base + comp * nb, nb);
        vals.col(comp) = cc.trace[slot].eval * ci - ec.eval * cb;
    }
    return vals;
}

} // namespace

double ell1(const MeshContext& ctx, const DofMap& dofs, const ManufacturedProblem& prob,
            const VectorXd& v_full)
{
    const int ns = ctx.ns();
    double total = 0.0;
    for (size_t c = 0; c < ctx.cells.size(); ++c) {
        const Cell& cell = ctx.mesh->cells[c];
        const ExactField& fld = prob.field(cell.subdomain);
        const Mat2& A = prob.A(cell.subdomain);
        VectorXd gq = project_tensor(ctx.cells[c], fld.grad_u);
        for (size_t j = 0; j < cell.edges.size(); ++j) {
            const EdgeContext& ec = ctx.edges[cell.edges[j]];
            MatrixXd vm = trace_mismatch(ctx, dofs, int(c), int(j), v_full);
            const double nsign = ctx.cells[c].trace[j].nsign;
            for (size_t q = 0; q < ec.quad.points.size(); ++q) {
                Vec2 n = nsign * ec.quad.normal[q];
                auto sig = ctx.cells[c].trace[j].eval.row(q).head(ns);
                Mat2 G = fld.grad_u(ec.quad.points[q]);
                Mat2 Gh;
                Gh(0, 0) = sig.dot(gq.segment(0 * ns, ns));
                Gh(0, 1) = sig.dot(gq.segment(1 * ns, ns));
                Gh(1, 0) = sig.dot(gq.segment(2 * ns, ns));
                Gh(1, 1) = sig.dot(gq.segment(3 * ns, ns));
                Vec2 flux = A * (G - Gh) * n;
                total += ec.quad.weights[q] * (vm(q, 0) * flux.x() + vm(q, 1) * flux.y());
            }
        }
    }
    return total;
}

double ell2(const MeshContext& ctx, const DofMap& dofs, const ManufacturedProblem& prob,
            const VectorXd& v_full)
{
    const int ns = ctx.ns();
    double total = 0.0;
    for (size_t c = 0; c < ctx.cells.size(); ++c) {
        const Cell& cell = ctx.mesh->cells[c];
        const ExactField& fld = prob.field(cell.subdomain);
        VectorXd ph = project_scalar(ctx.cells[c], fld.p, ctx.k() - 1);
        for (size_t j = 0; j < cell.edges.size(); ++j) {
            const EdgeContext& ec = ctx.edges[cell.edges[j]];
            MatrixXd vm = trace_mismatch(ctx, dofs, int(c), int(j), v_full);
            const double nsign = ctx.cells[c].trace[j].nsign;
            for (size_t q = 0; q < ec.quad.points.size(); ++q) {
                Vec2 n = nsign * ec.quad.normal[q];
                auto sig = ctx.cells[c].trace[j].eval.row(q).head(ns);
                double dp = fld.p(ec.quad.points[q]) - sig.dot(ph);
                total += ec.quad.weights[q] * dp * (vm(q, 0) * n.x() + vm(q, 1) * n.y());
            }
        }
    }
    return total;
}

double ell3(const MeshContext& ctx, const DofMap& dofs, const ManufacturedProblem& prob,
            const VectorXd& v_full)
{
    const int ns = ctx.ns();
    double total = 0.0;
    for (const Edge& edge : ctx.mesh->edges) {
        if (edge.tag != EdgeTag::interface) continue;
        const EdgeContext& ec = ctx.edges[edge.id];
        for (int side = 0; side < 2; ++side) {
            const int cid = edge.owner[side];
            const Cell& cell = ctx.mesh->cells[cid];
            const ExactField& fld = prob.field(cell.subdomain);
            const Mat2& A = prob.A(cell.subdomain);
            VectorXd qb = project_Qb(ec, fld.u);
            const int nb = ec.basis.size();

            LocalOperators ops = build_local_operators(ctx, cid);
            std::vector<int> gd = cell_global_dofs(ctx, dofs, cid);
            VectorXd v_loc(ops.ndof);
            for (int i = 0; i < ops.ndof; ++i) v_loc[i] = v_full[gd[i]];
            VectorXd wg = ops.grad * v_loc;

            int slot = -1;
            for (size_t j = 0; j < cell.edges.size(); ++j)
                if (cell.edges[j] == edge.id) slot = int(j);
            const double nsign = ctx.cells[cid].trace[slot].nsign;

            for (size_t q = 0; q < ec.quad.points.size(); ++q) {
                Vec2 n = nsign * ec.quad.normal[q];
                auto le = ec.eval.row(q);
                Vec2 diff(le.dot(qb.head(nb)) - fld.u(ec.quad.points[q]).x(),
                          le.dot(qb.tail(nb)) - fld.u(ec.quad.points[q]).y());
                auto sig = ctx.cells[cid].trace[slot].eval.row(q).head(ns);
                Mat2 Gw;
                Gw(0, 0) = sig.dot(wg.segment(0 * ns, ns));
                Gw(0, 1) = sig.dot(wg.segment(1 * ns, ns));
                Gw(1, 0) = sig.dot(wg.segment(2 * ns, ns));
                Gw(1, 1) = sig.dot(wg.segment(3 * ns, ns));
                Vec2 flux = A * Gw * n;
                total += ec.quad.weights[q] * diff.dot(flux);
            }
        }
    }
    return total;
}

double ell4(const MeshContext& ctx, const DofMap& dofs, const ManufacturedProblem& prob,
            const VectorXd& q_coef)
{
    const int ns = ctx.ns();
    double total = 0.0;
    for (const Edge& edge : ctx.mesh->edges) {
        if (edge.tag != EdgeTag::interface) continue;
        const EdgeContext& ec = ctx.edges[edge.id];
        for (int side = 0; side < 2; ++side) {
            const int cid = edge.owner[side];
            const Cell& cell = ctx.mesh->cells[cid];
            const ExactField& fld = prob.field(cell.subdomain);
            VectorXd qb = project_Qb(ec, fld.u);
            const int nb = ec.basis.size();
            int slot = -1;
            for (size_t j = 0; j < cell.edges.size(); ++j)
                if (cell.edges[j] == edge.id) slot = int(j);
            const double nsign = ctx.cells[cid].trace[slot].nsign;
            for (size_t q = 0; q < ec.quad.points.size(); ++q) {
                Vec2 n = nsign * ec.quad.normal[q];
                auto le = ec.eval.row(q);
                Vec2 diff(le.dot(qb.head(nb)) - fld.u(ec.quad.points[q]).x(),
                          le.dot(qb.tail(nb)) - fld.u(ec.quad.points[q]).y());
                auto sig = ctx.cells[cid].trace[slot].eval.row(q).head(ns);
                double qv = sig.dot(q_coef.segment(dofs.cell_p[cid], ns));
                total += ec.quad.weights[q] * qv * diff.dot(n);
            }
        }
    }
    return total;
}

double stabilizer_form(const MeshContext& ctx, const ProblemData& data,
                       const VectorXd& u_full, const VectorXd& v_full)
{
    DofMap dofs = build_dof_map(*ctx.mesh, ctx.k());
    double total = 0.0;
    for (size_t c = 0; c < ctx.cells.size(); ++c) {
        LocalForms lf = local_forms(ctx, int(c), data);
        std::vector<int> gd = cell_global_dofs(ctx, dofs, int(c));
        VectorXd ul(lf.ops.ndof), vl(lf.ops.ndof);
        for (int i = 0; i < lf.ops.ndof; ++i) {
            ul[i] = u_full[gd[i]];
            vl[i] = v_full[gd[i]];
        }
        total += vl.dot(lf.S * ul);
    }
    return total;
}

void write_file(const std::string& path, const std::string& contents)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << contents;
}

} // namespace wg
