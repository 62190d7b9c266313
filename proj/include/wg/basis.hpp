// basis.hpp -- scaled monomial cell bases, Legendre edge bases, per-cell and
// per-edge assembly contexts, and the L2 projections.
//
// Cell bases are polynomials in physical coordinates, centered at the cell
// anchor and scaled by the diameter; this keeps mass-matrix conditioning
// uniform under refinement.  Edge bases are Legendre polynomials in the
// normalized arc-length parameter, shared by both trace slots of an
// interface edge.
#pragma once

#include "wg/refmap.hpp"

#include <Eigen/Dense>
#include <functional>

namespace wg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline int pk_dim(int k) { return (k + 1) * (k + 2) / 2; }

// Monomials ((x-xc)/h)^a ((y-yc)/h)^b ordered by total degree, so the first
// pk_dim(k-1) entries span P_{k-1}.
struct CellBasis {
    int degree = 1;
    Vec2 center{0, 0};
    double scale = 1.0;

    int size() const { return pk_dim(degree); }
    VectorXd eval(const Vec2& x) const;
    void eval_grad(const Vec2& x, VectorXd& gx, VectorXd& gy) const;
};

// Legendre polynomials P_0..P_degree evaluated at 2s-1, s in [0,1].
struct EdgeBasis {
    int degree = 0;
    int size() const { return degree + 1; }
    VectorXd eval(double s) const;
};

enum class Exec { serial, parallel };

struct SchemeOptions {
    int k = 1;
    int quad_exactness = 0; // 0: default 2k+2
    int exactness() const { return quad_exactness > 0 ? quad_exactness : 2 * k + 2; }
};

struct EdgeContext {
    int edge_id = -1;
    EdgeBasis basis; // degree k-1 on straight-tagged edges, k on interface edges
    EdgeQuadrature quad;
    MatrixXd eval; // nq x size
    MatrixXd mass; // size^2, arc-length measure, one scalar component
    Eigen::LDLT<MatrixXd> mass_ldlt;
};

struct CellContext {
    int cell_id = -1;
    CellBasis basis; // degree k
    QuadratureRule quad;
    MatrixXd eval;   // nq x nk
    MatrixXd dx, dy; // nq x nk
    MatrixXd mass;   // nk x nk
    Eigen::LDLT<MatrixXd> mass_ldlt;   // P_k block
    Eigen::LDLT<MatrixXd> mass_s_ldlt; // leading P_{k-1} block

    struct Trace {
        MatrixXd eval; // nq_e x nk: cell basis at the edge quadrature points
        double nsign;  // +1 when the cell-outward normal equals the edge normal
    };
    std::vector<Trace> trace; // one per cell edge slot
};

struct MeshContext {
    const InterfaceMesh* mesh = nullptr;
    SchemeOptions opts;
    std::vector<EdgeContext> edges;
    std::vector<CellContext> cells;

    int k() const { return opts.k; }
    int nk() const { return pk_dim(opts.k); }
    int ns() const { return pk_dim(opts.k - 1); }
};

MeshContext build_context(const InterfaceMesh& mesh, const SchemeOptions& opts,
                          Exec exec = Exec::serial);

// ---- projections -------------------------------------------------------

// Interior L2 projection onto [P_k(T)]^2; coefficients [comp0 | comp1].
VectorXd project_Q0(const CellContext& cc, const std::function<Vec2(const Vec2&)>& f);

// Scalar L2 projection onto P_k(T) or (degree = k-1) the leading block.
VectorXd project_scalar(const CellContext& cc, const std::function<double(const Vec2&)>& f,
                        int degree);

// Tensor projection onto [P_{k-1}(T)]^{2x2}; blocks ordered (0,0),(0,1),(1,0),(1,1).
VectorXd project_tensor(const CellContext& cc, const std::function<Mat2(const Vec2&)>& G);

// Edge L2 projection in arc-length measure; coefficients [comp0 | comp1].
VectorXd project_Qb(const EdgeContext& ec, const std::function<Vec2(const Vec2&)>& f);

// Mass-matrix condition number (spectral), for diagnostics.
double mass_condition(const CellContext& cc);

} // namespace wg
