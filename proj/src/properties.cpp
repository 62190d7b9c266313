// properties.cpp -- the runtime property suite behind `wg check`: commutation
// identities of the weak operators, the divergence theorem on every cell, the
// polynomial patch test, consistency of the error equation, and positivity of
// the constrained energy matrix.
#include "wg/verify.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <random>

namespace wg {

namespace {

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return lo + (hi - lo) * uniform01(rng);
}

// Bivariate polynomial with exact derivatives, for oracle inputs.
struct Poly2 {
    int deg = 0;
    std::vector<double> c; // x^a y^b ordered by total degree, a descending

    static Poly2 random(int deg, std::mt19937_64& rng)
    {
        Poly2 p;
        p.deg = deg;
        p.c.resize(pk_dim(deg));
        for (double& v : p.c) v = uniform(rng, -1.0, 1.0);
        return p;
    }
    double eval(const Vec2& v) const
    {
        double r = 0.0;
        int idx = 0;
        for (int d = 0; d <= deg; ++d)
            for (int a = d; a >= 0; --a)
                r += c[idx++] * std::pow(v.x(), a) * std::pow(v.y(), d - a);
        return r;
    }
    Vec2 grad(const Vec2& v) const
    {
        Vec2 g(0, 0);
        int idx = 0;
        for (int d = 0; d <= deg; ++d)
            for (int a = d; a >= 0; --a) {
                int b = d - a;
                if (a > 0) g.x() += c[idx] * a * std::pow(v.x(), a - 1) * std::pow(v.y(), b);
                if (b > 0) g.y() += c[idx] * b * std::pow(v.x(), a) * std::pow(v.y(), b - 1);
                ++idx;
            }
        return g;
    }
};

struct PolyField {
    Poly2 u0, u1;
    Vec2 eval(const Vec2& x) const { return {u0.eval(x), u1.eval(x)}; }
    Mat2 grad(const Vec2& x) const
    {
        Mat2 g;
        g.row(0) = u0.grad(x).transpose();
        g.row(1) = u1.grad(x).transpose();
        return g;
    }
    double div(const Vec2& x) const { return u0.grad(x).x() + u1.grad(x).y(); }
};

// Local DOF vector of Q_h u on one cell (interior + this cell's trace slots).
VectorXd local_projection(const MeshContext& ctx, int cell_id, const LocalOperators& ops,
                          const PolyField& f)
{
    const Cell& cell = ctx.mesh->cells[cell_id];
    auto fn = [&f](const Vec2& x) { return f.eval(x); };
    VectorXd dofs = VectorXd::Zero(ops.ndof);
    dofs.head(2 * ctx.nk()) = project_Q0(ctx.cells[cell_id], fn);
    for (size_t j = 0; j < cell.edges.size(); ++j) {
        VectorXd qb = project_Qb(ctx.edges[cell.edges[j]], fn);
        dofs.segment(ops.edge_offset[j], qb.size()) = qb;
    }
    return dofs;
}

struct SuiteState {
    std::vector<CheckResult> results;
    void add(const std::string& name, double worst, double tol, const std::string& detail = "")
    {
        results.push_back({name, worst < tol, worst, tol, detail});
    }
};

void check_commutation_straight(SuiteState& st, unsigned long long seed)
{
    double worst = 0.0;
    int count = 0;
    for (MeshKind kind : {MeshKind::tri, MeshKind::quad}) {
        InterfaceMesh mesh = build_background_mesh({-1, -1, 1, 1}, 0, kind);
        for (int k = 1; k <= 3; ++k) {
            std::mt19937_64 rng(seed + 7 * k + (kind == MeshKind::quad ? 1000 : 0));
            MeshContext ctx = build_context(mesh, SchemeOptions{k});
            for (int trial = 0; trial < 17; ++trial, ++count) {
                PolyField f{Poly2::random(k + 1, rng), Poly2::random(k + 1, rng)};
                for (size_t c = 0; c < ctx.cells.size(); ++c) {
                    LocalOperators ops = build_local_operators(ctx, int(c));
                    VectorXd qh = local_projection(ctx, int(c), ops, f);
                    VectorXd wg = ops.grad * qh;
                    VectorXd pg = project_tensor(ctx.cells[c],
                                                 [&f](const Vec2& x) { return f.grad(x); });
                    worst = std::max(worst, (wg - pg).cwiseAbs().maxCoeff());
                    VectorXd wd = ops.div * qh;
                    VectorXd pd = project_scalar(ctx.cells[c],
                                                 [&f](const Vec2& x) { return f.div(x); },
                                                 k - 1);
                    worst = std::max(worst, (wd - pd).cwiseAbs().maxCoeff());
                }
            }
        }
    }
    st.add("commutation-straight-cells", worst, 1e-11,
           std::to_string(count) + " random polynomial inputs");
}

void check_commutation_curved(SuiteState& st, unsigned long long seed)
{
    ManufacturedProblem prob = make_problem(1);
    InterfaceMesh mesh = build_problem_mesh(prob, 1, MeshKind::tri);
    double worst = 0.0;
    int count = 0;
    for (int k = 1; k <= 3 && count < 20; ++k) {
        std::mt19937_64 rng(seed + 13 * k);
        MeshContext ctx = build_context(mesh, SchemeOptions{k});
        const int ns = ctx.ns();
        for (int trial = 0; trial < 7 && count < 20; ++trial, ++count) {
            PolyField f{Poly2::random(k + 1, rng), Poly2::random(k + 1, rng)};
            for (size_t c = 0; c < ctx.cells.size(); ++c) {
                const Cell& cell = ctx.mesh->cells[c];
                if (!cell.curved) continue;
                LocalOperators ops = build_local_operators(ctx, int(c));
                VectorXd qh = local_projection(ctx, int(c), ops, f);
                VectorXd dg =
                    ops.grad * qh -
                    project_tensor(ctx.cells[c], [&f](const Vec2& x) { return f.grad(x); });
                VectorXd dd = ops.div * qh -
                              project_scalar(ctx.cells[c],
                                             [&f](const Vec2& x) { return f.div(x); }, k - 1);
                // defect moments (lhs of the curved-cell identities)
                const MatrixXd Ms = ctx.cells[c].mass.topLeftCorner(ns, ns);
                VectorXd mg(4 * ns), md = Ms * dd;
                for (int b = 0; b < 4; ++b) mg.segment(b * ns, ns) = Ms * dg.segment(b * ns, ns);

                // rhs: <Q_b u - u, tau n> on the interface edge, for the full
                // moment vector (tau ranging over the tensor/scalar basis)
                VectorXd rg = VectorXd::Zero(4 * ns), rd = VectorXd::Zero(ns);
                for (size_t j = 0; j < cell.edges.size(); ++j) {
                    const Edge& e = ctx.mesh->edges[cell.edges[j]];
                    if (e.tag != EdgeTag::interface) continue;
                    const EdgeContext& ec = ctx.edges[e.id];
                    VectorXd qb = project_Qb(ec, [&f](const Vec2& x) { return f.eval(x); });
                    const int nb = ec.basis.size();
                    const double nsign = ctx.cells[c].trace[j].nsign;
                    for (size_t q = 0; q < ec.quad.points.size(); ++q) {
                        Vec2 n = nsign * ec.quad.normal[q];
                        auto le = ec.eval.row(q);
                        Vec2 diff(le.dot(qb.head(nb)) - f.u0.eval(ec.quad.points[q]),
                                  le.dot(qb.tail(nb)) - f.u1.eval(ec.quad.points[q]));
                        auto sig = ctx.cells[c].trace[j].eval.row(q).head(ns);
                        double w = ec.quad.weights[q];
                        for (int m = 0; m < ns; ++m) {
                            rg[0 * ns + m] += w * diff.x() * n.x() * sig[m];
                            rg[1 * ns + m] += w * diff.x() * n.y() * sig[m];
                            rg[2 * ns + m] += w * diff.y() * n.x() * sig[m];
                            rg[3 * ns + m] += w * diff.y() * n.y() * sig[m];
                            rd[m] += w * diff.dot(n) * sig[m];
                        }
                    }
                }
                worst = std::max(worst, (mg - rg).cwiseAbs().maxCoeff());
                worst = std::max(worst, (md - rd).cwiseAbs().maxCoeff());
            }
        }
    }
    st.add("commutation-curved-correction", worst, 1e-10,
           std::to_string(count) + " random inputs on interface cells");
}

void check_divergence_theorem(SuiteState& st, unsigned long long seed)
{
    std::mt19937_64 rng(seed + 99);
    double worst = 0.0;
    auto run = [&](const InterfaceMesh& mesh, int k) {
        MeshContext ctx = build_context(mesh, SchemeOptions{k});
        for (size_t c = 0; c < ctx.cells.size(); ++c) {
            const CellContext& cc = ctx.cells[c];
            const Cell& cell = ctx.mesh->cells[c];
            for (int trial = 0; trial < 5; ++trial) {
                PolyField f{Poly2::random(k, rng), Poly2::random(k, rng)};
                double vol = 0.0;
                for (size_t q = 0; q < cc.quad.points.size(); ++q)
                    vol += cc.quad.weights[q] * f.div(cc.quad.points[q]);
                double flux = 0.0;
                for (size_t j = 0; j < cell.edges.size(); ++j) {
                    const EdgeContext& ec = ctx.edges[cell.edges[j]];
                    const double nsign = cc.trace[j].nsign;
                    for (size_t q = 0; q < ec.quad.points.size(); ++q)
                        flux += ec.quad.weights[q] *
                                f.eval(ec.quad.points[q]).dot(nsign * ec.quad.normal[q]);
                }
                worst = std::max(worst, std::abs(flux - vol) / std::max(1.0, std::abs(vol)));
            }
        }
    };
    ManufacturedProblem p1 = make_problem(1);
    ManufacturedProblem p3 = make_problem(3);
    run(build_problem_mesh(p1, 1, MeshKind::tri), 2);
    run(build_problem_mesh(p1, 1, MeshKind::quad), 3);
    run(build_problem_mesh(p3, 1, MeshKind::tri), 2);
    run(build_problem_mesh(p3, 2, MeshKind::quad), 1);
    st.add("divergence-theorem", worst, 1e-10, "all cells of four fitted meshes");
}

void check_patch(SuiteState& st)
{
    double worst = 0.0;
    std::string detail;
    for (int k = 1; k <= 3; ++k) {
        PatchResult r = patch_test(k);
        worst = std::max({worst, r.energy, r.l2u, r.l2p});
        detail += (k > 1 ? " " : "") + std::to_string(r.energy);
    }
    st.add("patch-test-k1-k3", worst, 1e-9, "energy errors " + detail);
}

void check_error_equation(SuiteState& st, unsigned long long seed)
{
    ManufacturedProblem prob = make_problem(1);
    ProblemData data = prob.data();
    InterfaceMesh mesh = build_problem_mesh(prob, 1, MeshKind::tri);
    // elevated quadrature: the identity is tested against itself, not against
    // the default data-rule error
    MeshContext ctx = build_context(mesh, SchemeOptions{2, 12});
    SaddlePointSystem sys = assemble(ctx, data);
    WGSolution sol = solve(sys);

    VectorXd e = project_exact_velocity(ctx, sys.dofs, prob) - sol.u;
    VectorXd eps = project_exact_pressure(ctx, sys.dofs, prob) - sol.p;
    VectorXd qhu = project_exact_velocity(ctx, sys.dofs, prob);

    std::mt19937_64 rng(seed + 4242);
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        VectorXd y(sys.n_free);
        for (int i = 0; i < sys.n_free; ++i) y[i] = uniform(rng, -1.0, 1.0);
        VectorXd v = sys.R * y; // homogeneous member of the test space
        double lhs = e.dot(sys.A_full * v) + eps.dot(sys.B_full * v);
        double rhs = ell1(ctx, sys.dofs, prob, v) - ell2(ctx, sys.dofs, prob, v) +
                     ell3(ctx, sys.dofs, prob, v) + stabilizer_form(ctx, data, qhu, v);
        double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-3});
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    // the divergence-side error equation: b(e_h, q) = -ell4(u, q); the
    // mean-zero multiplier absorbs the compatibility defect of the discrete
    // data, so its contribution is moved back to the left side
    for (int trial = 0; trial < 3; ++trial) {
        VectorXd q(sys.dofs.n_p);
        for (int i = 0; i < sys.dofs.n_p; ++i) q[i] = uniform(rng, -1.0, 1.0);
        double lhs = q.dot(sys.B_full * e) - sol.lambda * sys.gauge.dot(q);
        double rhs = -ell4(ctx, sys.dofs, prob, q);
        double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-3});
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    st.add("error-equation-consistency", worst, 1e-9, "3 random test functions, both equations");
}

void check_norm_positivity(SuiteState& st)
{
    double min_ritz = std::numeric_limits<double>::max();
    auto run = [&](const InterfaceMesh& mesh, int k) {
        MeshContext ctx = build_context(mesh, SchemeOptions{k});
        ProblemData data; // homogeneous: only the operator matters here
        SaddlePointSystem sys = assemble(ctx, data);
        SpMat A_red = SpMat(sys.R.transpose()) * sys.A_full * sys.R;
        Eigen::SimplicialLDLT<SpMat> ldlt(A_red);
        if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0) {
            min_ritz = -1.0;
            return;
        }
        // a few inverse-power steps to expose the smallest Ritz value
        VectorXd x = VectorXd::Ones(sys.n_free).normalized();
        double lam = 0.0;
        for (int it = 0; it < 30; ++it) {
            x = ldlt.solve(x);
            x.normalize();
            lam = x.dot(A_red * x);
        }
        min_ritz = std::min(min_ritz, lam);
    };
    ManufacturedProblem p1 = make_problem(1);
    ManufacturedProblem p3 = make_problem(3);
    for (int k = 1; k <= 3; ++k) run(build_problem_mesh(p1, 1, MeshKind::tri), k);
    run(build_problem_mesh(p1, 1, MeshKind::quad), 2);
    run(build_problem_mesh(p3, 1, MeshKind::tri), 2);
    st.results.push_back({"norm-positivity", min_ritz > 0.0, min_ritz, 0.0,
                          "min Ritz value of constrained A_s"});
}

} // namespace

std::vector<CheckResult> run_property_suite(unsigned long long seed, Exec exec)
{
    (void)exec;
    SuiteState st;
    check_commutation_straight(st, seed);
    check_commutation_curved(st, seed);
    check_divergence_theorem(st, seed);
    check_patch(st);
    check_error_equation(st, seed);
    check_norm_positivity(st);
    return st.results;
}

} // namespace wg
