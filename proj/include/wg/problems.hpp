// problems.hpp -- the manufactured two-phase test problems.  Exact fields are
// closed-form per subdomain; all scheme data (f, g, phi, psi) is derived from
// them, never hand-entered, and the coded derivatives are cross-checked
// against central finite differences.
#pragma once

#include "wg/assembly.hpp"

namespace wg {

struct ExactField {
    std::function<Vec2(const Vec2&)> u;
    std::function<Mat2(const Vec2&)> grad_u; // (i,j) = du_i/dx_j
    std::function<Vec2(const Vec2&)> lap_u;
    std::function<double(const Vec2&)> p;
    std::function<Vec2(const Vec2&)> grad_p;
};

struct ManufacturedProblem {
    int id = 0;
    Rect domain{-1.0, -1.0, 1.0, 1.0};
    std::shared_ptr<const InterfaceCurve> curve;
    Mat2 A1 = Mat2::Identity(), A2 = Mat2::Identity();
    ExactField omega1, omega2;

    // The chord-approximated comparison mesh carries the interface data of
    // the true curved problem, transplanted onto the chords (values and
    // normals taken at the projected curve point).  That O(h^2) mismatch is
    // the geometric error the straight-mesh comparison measures.
    bool chord_interface_data = false;

    const ExactField& field(Subdomain s) const
    {
        return s == Subdomain::omega1 ? omega1 : omega2;
    }
    const Mat2& A(Subdomain s) const { return s == Subdomain::omega1 ? A1 : A2; }

    std::function<Vec2(const Vec2&)> velocity(Subdomain cell_sub) const
    {
        return [this, cell_sub](const Vec2& x) { return field(cell_sub).u(x); };
    }
    std::function<double(const Vec2&)> pressure(Subdomain cell_sub) const
    {
        return [this, cell_sub](const Vec2& x) { return field(cell_sub).p(x); };
    }

    // f_i = -div(A_i grad u_i) + grad p_i, g = u_2 on the outer boundary,
    // phi = u_1 - u_2, psi = (A1 grad u1 - p1 I) n1 + (A2 grad u2 - p2 I) n2.
    ProblemData data() const;
};

// Problems 1-3.  Derivatives are finite-difference checked on construction;
// a mismatch beyond 1e-6 relative raises DerivativeMismatch.
ManufacturedProblem make_problem(int id);

// The finite-difference oracle, also used on construction.
void check_derivatives(const ManufacturedProblem& prob, int npoints = 100,
                       unsigned long long seed = 20240901ull);

} // namespace wg
