// mesh.hpp -- interface-fitted polygonal meshes on a rectangle.  Cells cut by
// the interface curve become curved cells with exactly one curved edge lying
// on the curve; that edge carries two trace slots (side 1 / side 2).
#pragma once

#include "wg/errors.hpp"
#include "wg/geometry.hpp"

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wg {

enum class Subdomain { omega1 = 1, omega2 = 2 };
enum class EdgeTag { interior, boundary, interface };
enum class MeshKind { tri, quad };

struct Rect {
    double x0, y0, x1, y1;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
};

struct Arc {
    double t0 = 0.0, t1 = 0.0; // unwrapped curve parameters, t0 < t1
};

struct Edge {
    int id = -1;
    int v0 = -1, v1 = -1; // for curved edges v0 = p(t0), v1 = p(t1)
    EdgeTag tag = EdgeTag::interior;
    bool curved = false;
    Arc arc;
    std::array<int, 2> owner{-1, -1}; // on interface edges owner[0] is the side-1 cell
    double length = 0.0;              // arc length for curved edges, else chord
};

struct Cell {
    int id = -1;
    std::vector<int> vertices; // ccw
    std::vector<int> edges;    // edges[i] joins vertices[i] -> vertices[(i+1)%n]
    bool curved = false;
    Subdomain subdomain = Subdomain::omega2;
    double diameter = 0.0;
    double area = 0.0;
    Vec2 center{0.0, 0.0}; // vertex average, basis anchor
};

struct InterfaceMesh {
    Rect domain{-1.0, -1.0, 1.0, 1.0};
    MeshKind mesh_kind = MeshKind::tri;
    int level = 0;
    bool fitted = false;
    std::vector<Vec2> vertices;
    std::vector<Edge> edges;
    std::vector<Cell> cells;
    std::shared_ptr<const InterfaceCurve> curve; // null before fitting

    double h() const
    {
        double m = 0.0;
        for (const Cell& c : cells) m = std::max(m, c.diameter);
        return m;
    }

    // True if cell traverses its i-th edge from edge.v0 to edge.v1.
    bool edge_forward(const Cell& c, int i) const
    {
        return edges[c.edges[i]].v0 == c.vertices[i];
    }
};

// Declared regularity floors for (A1)-(A3); violations raise DegenerateCut
// during fitting and are reported by mesh_statistics.
struct RegularityLimits {
    double area_ratio = 5e-3; // |T| / h_T^2
    double edge_ratio = 2e-2; // h_e / h_T
    double ball_ratio = 5e-3; // inscribed-ball radius / h_T
};

struct MeshStats {
    double h = 0.0;
    double min_diameter = 0.0, max_diameter = 0.0;
    double min_area_ratio = 0.0;
    double min_edge_ratio = 0.0;
    double min_ball_ratio = 0.0;
    bool regularity_pass = true;
    std::vector<int> offending_cells;
};

// Uniform background mesh of the rectangle: (4*2^n)^2 quads, optionally split
// into triangles along the SW-NE diagonal.
InterfaceMesh build_background_mesh(const Rect& domain, int n, MeshKind kind);

struct FitOptions {
    double snap_fraction = 0.2; // snap vertices within snap_fraction*h_e of the curve
    RegularityLimits limits;
    bool check_regularity = true;
};

// Fit the background mesh to the curve: snap near-curve vertices onto it,
// split crossed cells along exact arcs, classify subdomains, and (for the tri
// pipeline) fan-triangulate cut pieces so every cell has at most one curved edge.
InterfaceMesh fit_interface(const InterfaceMesh& background,
                            std::shared_ptr<const InterfaceCurve> curve,
                            const FitOptions& opts = {});

// Replace every interface arc by its chord (geometry only; tags, trace slots
// and subdomains are kept).  Produces the degraded comparison mesh.
InterfaceMesh straighten_interface(const InterfaceMesh& mesh);

MeshStats mesh_statistics(const InterfaceMesh& mesh, const RegularityLimits& limits = {});

// Signed area of a cell via the boundary integral of x dy (arcs by quadrature).
double cell_signed_area(const InterfaceMesh& mesh, const Cell& cell);

// Text mesh format, versioned header "WGMESH 1"; decimal fields carry 17
// significant digits so save/load/save round-trips byte-identically.
void save_mesh(const InterfaceMesh& mesh, const std::string& path);
InterfaceMesh load_mesh(const std::string& path);
std::string mesh_to_string(const InterfaceMesh& mesh);

} // namespace wg
