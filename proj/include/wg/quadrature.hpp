// quadrature.hpp -- reference-element quadrature rules with positive weights.
//
// Reference elements: unit triangle {(0,0),(1,0),(0,1)}, unit square [0,1]^2,
// unit segment [0,1].  Rules declare an exactness degree m and integrate all
// reference monomials of total degree <= m exactly.
#pragma once

#include <Eigen/Dense>
#include <vector>

namespace wg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Gauss-Legendre rule on [0,1]; n points, exact for degree 2n-1.
struct Gauss1D {
    std::vector<double> x;
    std::vector<double> w;
};

// Nodes computed by Newton iteration on P_n; cached, thread-safe.
const Gauss1D& gauss_legendre(int n);

inline int gauss_points_for(int exactness) { return exactness / 2 + 1; }

// Quadrature on a physical cell or edge.  For cell rules the weights carry the
// area measure, for edge rules the arc-length measure.
struct QuadratureRule {
    std::vector<Vec2> points;
    std::vector<double> weights;
    int declared_exactness = 0;

    double total() const
    {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

struct RefPoint {
    double x, y, w;
};

// Tensor Gauss rule on the unit square, exact for total degree <= m.
std::vector<RefPoint> ref_square_rule(int m);

// Collapsed (Duffy) tensor rule on the unit triangle, exact for total degree <= m,
// all weights positive.  min_points_1d raises the per-direction point count for
// non-polynomial integrands (curved-cell maps).
std::vector<RefPoint> ref_triangle_rule(int m, int min_points_1d = 0);

} // namespace wg
