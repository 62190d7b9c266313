#include "wg/solver.hpp"

namespace wg {

KKTSolver::KKTSolver(const SaddlePointSystem& sys) : sys_(&sys)
{
    const int nf = sys.n_free;
    m_ = nf + sys.dofs.n_p;
    r_ = nf; // constant coefficient of the first pressure block

    SpMat Mhat = sys.K.topLeftCorner(m_, m_);
    SpMat anchor(m_, m_);
    anchor.insert(r_, r_) = 1.0;
    Mhat = Mhat + anchor;

    lu_.analyzePattern(Mhat);
    lu_.factorize(Mhat);
    if (lu_.info() != Eigen::Success)
        throw SingularSystem(
            "KKT factorization failed (disconnected mesh or empty free DOF set?)");

    VectorXd er = VectorXd::Zero(m_);
    er[r_] = 1.0;
    VectorXd ghat = VectorXd::Zero(m_);
    ghat.segment(nf, sys.dofs.n_p) = sys.gauge;
    u1_ = lu_.solve(er);
    u2_ = lu_.solve(ghat);
    a11_ = u1_[r_];
    a12_ = u2_[r_];
    b11_ = ghat.dot(u1_);
    b12_ = ghat.dot(u2_);
}

VectorXd KKTSolver::solve(const VectorXd& rhs) const
{
    // M z + g lambda = b, g'z = c, factored through Mhat = M + e_r e_r':
    //   z = u0 + mu u1 - lambda u2 with mu = e_r' z
    VectorXd u0 = lu_.solve(rhs.head(m_));
    const double c = rhs[m_];
    const double a10 = u0[r_];
    const double b10 = sys_->gauge.dot(u0.segment(sys_->n_free, sys_->dofs.n_p));

    Mat2 S;
    S << 1.0 - a11_, a12_, b11_, -b12_;
    double det = S.determinant();
    if (!(std::abs(det) > 1e-300)) throw SingularSystem("gauge bordering is singular");
    Vec2 mulam = S.inverse() * Vec2(a10, c - b10);

    VectorXd z(m_ + 1);
    z.head(m_) = u0 + mulam[0] * u1_ - mulam[1] * u2_;
    z[m_] = mulam[1];
    return z;
}

ResidualReport residual_report(const SaddlePointSystem& sys, const WGSolution& sol)
{
    const int nf = sys.n_free;
    const int np = sys.dofs.n_p;
    VectorXd z(nf + np + 1);
    z.head(nf) = sol.y;
    z.segment(nf, np) = sol.p;
    z[nf + np] = sol.lambda;
    VectorXd r = sys.K * z - sys.rhs;

    ResidualReport rep;
    rep.momentum = r.head(nf).norm() / std::max(1.0, sys.rhs.head(nf).norm());
    rep.divergence = r.segment(nf, np).norm() / std::max(1.0, sol.u.norm());
    rep.gauge = std::abs(sys.gauge.dot(sol.p)) / std::max(1.0, sol.p.norm());
    rep.kkt = r.norm() / std::max(1.0, sys.rhs.norm());
    return rep;
}

WGSolution solve(const SaddlePointSystem& sys)
{
    KKTSolver solver(sys);
    VectorXd z = solver.solve(sys.rhs);

    const int nf = sys.n_free;
    const int np = sys.dofs.n_p;
    WGSolution sol;
    sol.y = z.head(nf);
    sol.p = z.segment(nf, np);
    sol.lambda = z[nf + np];
    sol.u = sys.expand(sol.y);
    sol.residuals = residual_report(sys, sol);
    if (sol.residuals.kkt > 1e-8)
        throw SingularSystem("solver residual " + std::to_string(sol.residuals.kkt) +
                             " is too large (near-singular system)");
    return sol;
}

} // namespace wg
