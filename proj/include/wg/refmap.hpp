// refmap.hpp -- reference-to-physical cell maps and quadrature on cells and
// edges.  Bases downstream are polynomials in physical coordinates; the maps
// exist purely to integrate.  Curved cells use transfinite blending with the
// exact arc parametrization, so there is no geometric error to control.
#pragma once

#include "wg/mesh.hpp"
#include "wg/quadrature.hpp"

#include <array>
#include <vector>

namespace wg {

enum class MapKind { affine_tri, bilinear_quad, transfinite_tri, ruled_lens };

struct SubMap {
    MapKind kind = MapKind::affine_tri;
    std::array<Vec2, 4> corner{}; // P0..P2 for triangles, P0..P3 for quads
    const InterfaceCurve* curve = nullptr;
    double t_from = 0.0, t_to = 0.0; // directed: arc runs corner[0] -> corner[1]

    Vec2 map(double xi, double eta) const;
    Mat2 jacobian(double xi, double eta) const;
    bool triangular() const { return kind != MapKind::bilinear_quad && kind != MapKind::ruled_lens; }
};

// A cell map is a single map for triangles, quads and curved triangles/lenses,
// and a fan of affine + transfinite triangles for curved cells with more
// corners (the quad pipeline keeps cut pieces as whole polygons).
struct CellMap {
    int cell_id = -1;
    std::vector<SubMap> subs;

    bool single() const { return subs.size() == 1; }
    Vec2 map(double xi, double eta) const { return subs.front().map(xi, eta); }
    Mat2 jacobian(double xi, double eta) const { return subs.front().jacobian(xi, eta); }
};

// Builds the map and verifies detJ > 0 on a probe grid of the given exactness.
CellMap build_cell_map(const InterfaceMesh& mesh, const Cell& cell, int probe_exactness = 8);

// Reference rule of declared exactness >= m pushed through the map; weights
// are ref_weight * detJ.  m < 1 is clamped to 1.
QuadratureRule cell_quadrature(const CellMap& map, int m);

// Quadrature on an edge in arc-length measure, with the edge-parameter
// coordinate and the unit normal to the right of the v0->v1 direction of
// travel (the outward normal of the side-1 owner on interface edges).
struct EdgeQuadrature {
    std::vector<Vec2> points;
    std::vector<double> weights;
    std::vector<double> sparam;  // normalized arc length in [0,1]
    std::vector<Vec2> normal;
    double length = 0.0;
    int declared_exactness = 0;
};

EdgeQuadrature edge_quadrature(const InterfaceMesh& mesh, const Edge& edge, int m);

} // namespace wg
