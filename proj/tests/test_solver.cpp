#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "wg/problems.hpp"
#include "wg/solver.hpp"
#include "wg/verify.hpp"

#include <cmath>

using namespace wg;

namespace {

ProblemData zero_data()
{
    ProblemData d;
    d.f1 = d.f2 = [](const Vec2&) { return Vec2(0, 0); };
    return d;
}

} // namespace

TEST_CASE("zero data yields the zero solution")
{
    InterfaceMesh mesh = build_background_mesh({-1, -1, 1, 1}, 0, MeshKind::tri);
    MeshContext ctx = build_context(mesh, SchemeOptions{1});
    SaddlePointSystem sys = assemble(ctx, zero_data());
    WGSolution sol = solve(sys);
    CHECK(sol.u.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(sol.p.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("small solve matches a dense full-pivot LU oracle")
{
    InterfaceMesh mesh = build_background_mesh({0, 0, 1, 1}, 0, MeshKind::tri);
    MeshContext ctx = build_context(mesh, SchemeOptions{1});
    ProblemData d = zero_data();
    d.f1 = d.f2 = [](const Vec2& x) { return Vec2(1.0 + x.y(), x.x()); };
    d.g = [](const Vec2& x) { return Vec2(x.y(), x.x()); };
    SaddlePointSystem sys = assemble(ctx, d);
    WGSolution sol = solve(sys);

    MatrixXd K = MatrixXd(sys.K);
    VectorXd z = Eigen::FullPivLU<MatrixXd>(K).solve(sys.rhs);
    CHECK((z.head(sys.n_free) - sol.y).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((z.segment(sys.n_free, sys.dofs.n_p) - sol.p).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("solution satisfies the jump relation and the pressure gauge")
{
    ManufacturedProblem prob = make_problem(1);
    InterfaceMesh mesh = build_problem_mesh(prob, 1, MeshKind::tri);
    MeshContext ctx = build_context(mesh, SchemeOptions{2});
    SaddlePointSystem sys = assemble(ctx, prob.data());
    WGSolution sol = solve(sys);

    for (const Edge& e : mesh.edges) {
        if (e.tag != EdgeTag::interface) continue;
        VectorXd qphi = project_Qb(ctx.edges[e.id], prob.data().phi);
        for (int i = 0; i < 2 * sys.dofs.edge_nb[e.id]; ++i) {
            double jump = sol.u[sys.dofs.edge_u1[e.id] + i] -
                          sol.u[sys.dofs.edge_u2[e.id] + i];
            CHECK(std::abs(jump - qphi[i]) < 1e-12 * std::max(1.0, qphi.cwiseAbs().maxCoeff()));
        }
    }
    CHECK(std::abs(sys.gauge.dot(sol.p)) < 1e-10 * std::max(1.0, sol.p.norm()));
    CHECK(sol.residuals.kkt < 1e-10);
    CHECK(sol.residuals.divergence < 1e-10);
}

TEST_CASE("solving is deterministic and the scheme is linear in the data")
{
    ManufacturedProblem prob = make_problem(1);
    InterfaceMesh mesh = build_problem_mesh(prob, 1, MeshKind::quad);
    MeshContext ctx = build_context(mesh, SchemeOptions{1});
    SaddlePointSystem sys = assemble(ctx, prob.data());
    WGSolution s1 = solve(sys);
    WGSolution s2 = solve(sys);
    CHECK((s1.u - s2.u).cwiseAbs().maxCoeff() == 0.0);
    CHECK((s1.p - s2.p).cwiseAbs().maxCoeff() == 0.0);

    // scale all data by s: the solution scales by s
    const double s = -2.5;
    ProblemData d = prob.data();
    ProblemData ds;
    ds.A1 = d.A1;
    ds.A2 = d.A2;
    ds.f1 = [&d, s](const Vec2& x) { return Vec2(s * d.f1(x)); };
    ds.f2 = [&d, s](const Vec2& x) { return Vec2(s * d.f2(x)); };
    ds.g = [&d, s](const Vec2& x) { return Vec2(s * d.g(x)); };
    ds.phi = [&d, s](const Vec2& x) { return Vec2(s * d.phi(x)); };
    ds.psi = [&d, s](const Vec2& x, const Vec2& n) { return Vec2(s * d.psi(x, n)); };
    SaddlePointSystem sys2 = assemble(ctx, ds);
    WGSolution sol2 = solve(sys2);
    CHECK((sol2.u - s * s1.u).cwiseAbs().maxCoeff() <
          1e-11 * std::max(1.0, s1.u.cwiseAbs().maxCoeff()));
}

TEST_CASE("residual report reacts linearly to perturbations")
{
    InterfaceMesh mesh = build_background_mesh({-1, -1, 1, 1}, 0, MeshKind::quad);
    MeshContext ctx = build_context(mesh, SchemeOptions{1});
    ProblemData d = zero_data();
    d.f1 = d.f2 = [](const Vec2&) { return Vec2(1, 0); };
    SaddlePointSystem sys = assemble(ctx, d);
    WGSolution sol = solve(sys);
    CHECK(sol.residuals.kkt < 1e-12);

    WGSolution bad = sol;
    std::mt19937_64 rng(2);
    VectorXd dir(sol.y.size());
    for (int i = 0; i < dir.size(); ++i) dir[i] = oracle::uniform(rng, -1, 1);
    double r1, r2;
    bad.y = sol.y + 1e-6 * dir;
    bad.u = sys.expand(bad.y);
    r1 = residual_report(sys, bad).kkt;
    bad.y = sol.y + 2e-6 * dir;
    bad.u = sys.expand(bad.y);
    r2 = residual_report(sys, bad).kkt;
    CHECK(r2 == doctest::Approx(2.0 * r1).epsilon(1e-6));
}

TEST_CASE("a gaugeless system is reported singular")
{
    InterfaceMesh mesh = build_background_mesh({-1, -1, 1, 1}, 0, MeshKind::tri);
    MeshContext ctx = build_context(mesh, SchemeOptions{1});
    SaddlePointSystem sys = assemble(ctx, zero_data());
    sys.gauge.setZero(); // constant pressure becomes a null vector
    CHECK_THROWS_AS(solve(sys), SingularSystem);
}
