// solver.hpp -- direct sparse solve of the constrained saddle-point system and
// recovery of the WG solution fields.
//
// The mean-zero gauge row is dense, and a dense row inside a sparse LU causes
// catastrophic fill (row pivoting drags it in early).  The factorization
// therefore works on the gauge-free matrix plus a sparse rank-one anchor on
// one pressure DOF, and the exact multiplier solution is recovered by
// bordering; residuals are still reported against the full KKT system.
#pragma once

#include "wg/assembly.hpp"

#include <Eigen/SparseLU>

namespace wg {

class KKTSolver {
public:
    explicit KKTSolver(const SaddlePointSystem& sys);
    // rhs and result are full vectors [velocity; pressure; multiplier]
    VectorXd solve(const VectorXd& rhs) const;

private:
    const SaddlePointSystem* sys_;
    Eigen::SparseLU<SpMat> lu_;
    VectorXd u1_, u2_; // anchored solves against e_r and the gauge vector
    double a11_ = 0, a12_ = 0, b11_ = 0, b12_ = 0;
    int r_ = 0, m_ = 0;
};

struct ResidualReport {
    double momentum = 0.0;   // |A u + B' p - F| / max(1, |F|) on free DOFs
    double divergence = 0.0; // |B u + w lambda - G| / max(1, |u|)
    double gauge = 0.0;      // |w' p| / max(1, |p|)
    double kkt = 0.0;        // |K z - rhs| / max(1, |rhs|)
};

struct WGSolution {
    VectorXd u;      // all velocity DOFs, both interface slots populated
    VectorXd p;      // pressure coefficients, mean-zero
    double lambda = 0.0;
    VectorXd y;      // free velocity DOFs (internal representation)
    ResidualReport residuals;
};

WGSolution solve(const SaddlePointSystem& sys);

ResidualReport residual_report(const SaddlePointSystem& sys, const WGSolution& sol);

} // namespace wg
