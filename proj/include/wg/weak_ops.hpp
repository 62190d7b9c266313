// weak_ops.hpp -- the discrete weak gradient and weak divergence on one cell,
// realized as matrices from the cell's local DOFs to polynomial coefficients.
//
// Local DOF layout for a cell: [interior: comp0 nk, comp1 nk] followed, per
// cell edge slot, by [comp0 (deg+1), comp1 (deg+1)] trace coefficients.
#pragma once

#include "wg/basis.hpp"

namespace wg {

struct LocalOperators {
    int ndof = 0;
    std::vector<int> edge_offset; // local offset of each cell edge slot

    // Weak gradient: (4*ns) x ndof, tensor components blocked in the order
    // (0,0), (0,1), (1,0), (1,1); coefficients in the cell's P_{k-1} basis.
    MatrixXd grad;
    // Weak divergence coefficients in P_{k-1}: ns x ndof.
    MatrixXd div;
    // Moments (nabla_w . v, sigma_m)_T without the mass solve: ns x ndof.
    // The pressure coupling B_loc is -div_moment.
    MatrixXd div_moment;
};

LocalOperators build_local_operators(const MeshContext& ctx, int cell_id);

// Apply the weak-gradient matrix to a local DOF vector.
inline VectorXd weak_gradient(const LocalOperators& ops, const VectorXd& dofs)
{
    return ops.grad * dofs;
}
inline VectorXd weak_divergence(const LocalOperators& ops, const VectorXd& dofs)
{
    return ops.div * dofs;
}

} // namespace wg
