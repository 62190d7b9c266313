// assembly.hpp -- global saddle-point assembly for the WG scheme:
//   a_s(u,v) + b(v,p) = (f, v_0) + <psi, v_b>_Gamma
//   b(u,q)            = 0
// with u_b = Q_b g on the outer boundary and u_{1b} - u_{2b} = Q_b phi across
// the interface.  Boundary traces are eliminated to the right-hand side, the
// side-2 interface traces are eliminated by the affine substitution
// u_{2b} = u_{1b} - Q_b phi, and the pressure mean is pinned by one Lagrange
// multiplier row, which keeps the reduced system symmetric.
#pragma once

#include "wg/weak_ops.hpp"

#include <Eigen/Sparse>

namespace wg {

using SpMat = Eigen::SparseMatrix<double>;

struct ProblemData {
    Mat2 A1 = Mat2::Identity();
    Mat2 A2 = Mat2::Identity();
    std::function<Vec2(const Vec2&)> f1, f2;
    std::function<Vec2(const Vec2&)> g;   // boundary velocity
    std::function<Vec2(const Vec2&)> phi; // velocity jump u1 - u2 on the interface
    // traction jump (A1 grad u1 - p1 I) n1 + (A2 grad u2 - p2 I) n2; receives
    // the point and the side-1 outward normal
    std::function<Vec2(const Vec2&, const Vec2&)> psi;

    const Mat2& A(Subdomain s) const { return s == Subdomain::omega1 ? A1 : A2; }
    const std::function<Vec2(const Vec2&)>& f(Subdomain s) const
    {
        return s == Subdomain::omega1 ? f1 : f2;
    }
    // verifies k1 |a|^2 <= a'Aa <= k2 |a|^2 with k1 > 0 on sampled directions
    void validate_coefficients() const;
};

struct DofMap {
    int k = 1;
    int n_u = 0, n_p = 0;
    std::vector<int> cell_u0; // interior velocity block per cell (2*nk wide)
    std::vector<int> edge_u1; // slot-1 trace block per edge (2*nb wide)
    std::vector<int> edge_u2; // slot-2 block on interface edges, else -1
    std::vector<int> cell_p;  // pressure block per cell (ns wide)
    std::vector<int> edge_nb; // trace dimension per component, per edge
};

DofMap build_dof_map(const InterfaceMesh& mesh, int k);

struct LocalForms {
    MatrixXd A; // ndof^2, realizes (A grad_w v, grad_w w)_T
    MatrixXd S; // ndof^2, stabilizer
    MatrixXd B; // ns x ndof, realizes -(div_w v, q)_T
    VectorXd F; // ndof, (f, v_0)_T
    LocalOperators ops;
};

LocalForms local_forms(const MeshContext& ctx, int cell_id, const ProblemData& data);

// Global column indices of a cell's local DOFs (interior block, then one
// trace block per cell edge, taking the slot matching the cell's side).
std::vector<int> cell_global_dofs(const MeshContext& ctx, const DofMap& dofs, int cell_id);

struct SaddlePointSystem {
    DofMap dofs;
    // unconstrained operators over all velocity DOFs (both interface slots)
    SpMat A_full; // N_u x N_u, symmetric PSD
    SpMat B_full; // N_p x N_u
    VectorXd F_full;
    VectorXd gauge; // integral of each pressure basis function
    SpMat M_p;      // pressure mass matrix

    // affine reduction x = R y + x_fix onto free DOFs
    SpMat R;
    VectorXd x_fix;
    std::vector<int> free_index; // full dof -> free dof, -1 if constrained
    int n_free = 0;

    // reduced KKT system [[A, B', 0], [B, 0, w], [0, w', 0]]
    SpMat K;
    VectorXd rhs;

    int total_dim() const { return n_free + dofs.n_p + 1; }
    VectorXd expand(const VectorXd& y) const { return R * y + x_fix; }
};

SaddlePointSystem assemble(const MeshContext& ctx, const ProblemData& data,
                           Exec exec = Exec::serial);

// Coordinate-format dump of the reduced KKT matrix (row col value per line,
// 17 significant digits), for external verification.
void dump_matrix(const SpMat& m, const std::string& path);

} // namespace wg
