#include "wg/basis.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wg {

VectorXd CellBasis::eval(const Vec2& p) const
{
    const double X = (p.x() - center.x()) / scale;
    const double Y = (p.y() - center.y()) / scale;
    VectorXd v(size());
    int idx = 0;
    for (int d = 0; d <= degree; ++d)
        for (int a = d; a >= 0; --a) {
            double m = 1.0;
            for (int i = 0; i < a; ++i) m *= X;
            for (int i = 0; i < d - a; ++i) m *= Y;
            v[idx++] = m;
        }
    return v;
}

void CellBasis::eval_grad(const Vec2& p, VectorXd& gx, VectorXd& gy) const
{
    const double X = (p.x() - center.x()) / scale;
    const double Y = (p.y() - center.y()) / scale;
    gx.resize(size());
    gy.resize(size());
    int idx = 0;
    auto pw = [](double b, int e) {
        double m = 1.0;
        for (int i = 0; i < e; ++i) m *= b;
        return m;
    };
    for (int d = 0; d <= degree; ++d)
        for (int a = d; a >= 0; --a) {
            int b = d - a;
            gx[idx] = a > 0 ? a * pw(X, a - 1) * pw(Y, b) / scale : 0.0;
            gy[idx] = b > 0 ? b * pw(X, a) * pw(Y, b - 1) / scale : 0.0;
            ++idx;
        }
}

VectorXd EdgeBasis::eval(double s) const
{
    VectorXd v(size());
    double u = 2.0 * s - 1.0;
    v[0] = 1.0;
    if (degree >= 1) v[1] = u;
    for (int n = 2; n <= degree; ++n)
        v[n] = ((2.0 * n - 1.0) * u * v[n - 1] - (n - 1.0) * v[n - 2]) / n;
    return v;
}

namespace {

Eigen::LDLT<MatrixXd> checked_ldlt(const MatrixXd& m, const char* what)
{
    Eigen::LDLT<MatrixXd> ldlt(m);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw SingularMass(what);
    return ldlt;
}

void build_edge_context(const InterfaceMesh& mesh, const SchemeOptions& opts,
                        EdgeContext& ec, int eid)
{
    const Edge& e = mesh.edges[eid];
    ec.edge_id = eid;
    ec.basis.degree = (e.tag == EdgeTag::interface) ? opts.k : opts.k - 1;
    ec.quad = edge_quadrature(mesh, e, opts.exactness());
    const int nq = int(ec.quad.points.size());
    ec.eval.resize(nq, ec.basis.size());
    for (int q = 0; q < nq; ++q) ec.eval.row(q) = ec.basis.eval(ec.quad.sparam[q]);
    ec.mass = ec.eval.transpose() *
              Eigen::Map<const VectorXd>(ec.quad.weights.data(), nq).asDiagonal() * ec.eval;
    ec.mass_ldlt = checked_ldlt(ec.mass, "edge mass matrix");
}

void build_cell_context(const InterfaceMesh& mesh, const SchemeOptions& opts,
                        const std::vector<EdgeContext>& edges, CellContext& cc, int cid)
{
    const Cell& cell = mesh.cells[cid];
    cc.cell_id = cid;
    cc.basis = CellBasis{opts.k, cell.center, cell.diameter};

    CellMap map = build_cell_map(mesh, cell, opts.exactness());
    cc.quad = cell_quadrature(map, opts.exactness());
    const int nq = int(cc.quad.points.size());
    const int nk = cc.basis.size();

    cc.eval.resize(nq, nk);
    cc.dx.resize(nq, nk);
    cc.dy.resize(nq, nk);
    VectorXd gx, gy;
    for (int q = 0; q < nq; ++q) {
        cc.eval.row(q) = cc.basis.eval(cc.quad.points[q]);
        cc.basis.eval_grad(cc.quad.points[q], gx, gy);
        cc.dx.row(q) = gx;
        cc.dy.row(q) = gy;
    }
    auto W = Eigen::Map<const VectorXd>(cc.quad.weights.data(), nq).asDiagonal();
    cc.mass = cc.eval.transpose() * W * cc.eval;
    cc.mass_ldlt = checked_ldlt(cc.mass, "cell mass matrix");
    const int ns = pk_dim(opts.k - 1);
    cc.mass_s_ldlt = checked_ldlt(cc.mass.topLeftCorner(ns, ns), "cell P_{k-1} mass matrix");

    cc.trace.resize(cell.edges.size());
    for (size_t i = 0; i < cell.edges.size(); ++i) {
        const EdgeContext& ec = edges[cell.edges[i]];
        const int nqe = int(ec.quad.points.size());
        cc.trace[i].eval.resize(nqe, nk);
        for (int q = 0; q < nqe; ++q)
            cc.trace[i].eval.row(q) = cc.basis.eval(ec.quad.points[q]);
        cc.trace[i].nsign = mesh.edge_forward(cell, int(i)) ? 1.0 : -1.0;
    }
}

} // namespace

MeshContext build_context(const InterfaceMesh& mesh, const SchemeOptions& opts, Exec exec)
{
    if (opts.k < 1) throw std::invalid_argument("polynomial degree k must be >= 1");
    MeshContext ctx;
    ctx.mesh = &mesh;
    ctx.opts = opts;
    ctx.edges.resize(mesh.edges.size());
    ctx.cells.resize(mesh.cells.size());

    const int ne = int(mesh.edges.size());
    const int nc = int(mesh.cells.size());
    if (exec == Exec::parallel) {
        std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 32)
        for (int i = 0; i < ne; ++i) {
            try {
                build_edge_context(mesh, opts, ctx.edges[i], i);
            } catch (...) {
#pragma omp critical
                if (!error) error = std::current_exception();
            }
        }
        if (error) std::rethrow_exception(error);
#pragma omp parallel for schedule(dynamic, 16)
        for (int i = 0; i < nc; ++i) {
            try {
                build_cell_context(mesh, opts, ctx.edges, ctx.cells[i], i);
            } catch (...) {
#pragma omp critical
                if (!error) error = std::current_exception();
            }
        }
        if (error) std::rethrow_exception(error);
    } else {
        for (int i = 0; i < ne; ++i) build_edge_context(mesh, opts, ctx.edges[i], i);
        for (int i = 0; i < nc; ++i)
            build_cell_context(mesh, opts, ctx.edges, ctx.cells[i], i);
    }
    return ctx;
}

VectorXd project_Q0(const CellContext& cc, const std::function<Vec2(const Vec2&)>& f)
{
    const int nq = int(cc.quad.points.size());
    const int nk = cc.basis.size();
    MatrixXd fv(nq, 2);
    for (int q = 0; q < nq; ++q) fv.row(q) = f(cc.quad.points[q]).transpose();
    auto W = Eigen::Map<const VectorXd>(cc.quad.weights.data(), nq).asDiagonal();
    MatrixXd moments = cc.eval.transpose() * W * fv; // nk x 2
    VectorXd out(2 * nk);
    out.head(nk) = cc.mass_ldlt.solve(moments.col(0));
    out.tail(nk) = cc.mass_ldlt.solve(moments.col(1));
    return out;
}

VectorXd project_scalar(const CellContext& cc, const std::function<double(const Vec2&)>& f,
                        int degree)
{
    const int nq = int(cc.quad.points.size());
    const int n = pk_dim(degree);
    VectorXd moments = VectorXd::Zero(n);
    for (int q = 0; q < nq; ++q)
        moments += cc.quad.weights[q] * f(cc.quad.points[q]) *
                   cc.eval.row(q).head(n).transpose();
    if (degree == cc.basis.degree) return cc.mass_ldlt.solve(moments);
    if (degree == cc.basis.degree - 1) return cc.mass_s_ldlt.solve(moments);
    return checked_ldlt(cc.mass.topLeftCorner(n, n), "projection mass").solve(moments);
}

VectorXd project_tensor(const CellContext& cc, const std::function<Mat2(const Vec2&)>& G)
{
    const int nq = int(cc.quad.points.size());
    const int ns = pk_dim(cc.basis.degree - 1);
    MatrixXd moments = MatrixXd::Zero(ns, 4);
    for (int q = 0; q < nq; ++q) {
        Mat2 g = G(cc.quad.points[q]);
        VectorXd phi = cc.quad.weights[q] * cc.eval.row(q).head(ns).transpose();
        moments.col(0) += g(0, 0) * phi;
        moments.col(1) += g(0, 1) * phi;
        moments.col(2) += g(1, 0) * phi;
        moments.col(3) += g(1, 1) * phi;
    }
    VectorXd out(4 * ns);
    for (int c = 0; c < 4; ++c) out.segment(c * ns, ns) = cc.mass_s_ldlt.solve(moments.col(c));
    return out;
}

VectorXd project_Qb(const EdgeContext& ec, const std::function<Vec2(const Vec2&)>& f)
{
    const int nq = int(ec.quad.points.size());
    const int nb = ec.basis.size();
    MatrixXd fv(nq, 2);
    for (int q = 0; q < nq; ++q) fv.row(q) = f(ec.quad.points[q]).transpose();
    auto W = Eigen::Map<const VectorXd>(ec.quad.weights.data(), nq).asDiagonal();
    MatrixXd moments = ec.eval.transpose() * W * fv;
    VectorXd out(2 * nb);
    out.head(nb) = ec.mass_ldlt.solve(moments.col(0));
    out.tail(nb) = ec.mass_ldlt.solve(moments.col(1));
    return out;
}

double mass_condition(const CellContext& cc)
{
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(cc.mass);
    return es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
}

} // namespace wg
