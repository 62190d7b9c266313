// mesh.cpp -- background meshes and interface fitting.
//
// Fitting pipeline: snap near-curve vertices onto the curve, locate edge
// crossings by bisection, then rebuild cells.  A boundary segment with both
// endpoints on the curve is re-geometrized as the exact arc (this is what the
// snapping is for: it removes sliver cuts where the curve runs almost parallel
// to an edge).  A cell crossed at exactly two points is split along the arc
// into two pieces.  The tri pipeline fan-triangulates pieces with more than
// three corners so every cell keeps at most one curved edge.
#include "wg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace wg {

namespace {

struct Seg {
    bool is_arc = false;
    // directed curve parameters: p(t_from) is the segment's first vertex
    double t_from = 0.0, t_to = 0.0;
};

struct PolyCell {
    std::vector<int> verts;
    std::vector<Seg> segs; // segs[i] joins verts[i] -> verts[(i+1)%n]
    Subdomain sub = Subdomain::omega2;
};

double wrap01(double t)
{
    double r = t - std::floor(t);
    return r >= 1.0 ? r - 1.0 : r;
}

// Directed short arc between two on-curve points.
Seg directed_arc(double t_from, double t_to)
{
    double d = wrap01(t_to - t_from);
    Seg s;
    s.is_arc = true;
    s.t_from = t_from;
    s.t_to = (d <= 0.5) ? t_from + d : t_from - (1.0 - d);
    return s;
}

Vec2 bisect_crossing(const InterfaceCurve& curve, Vec2 a, Vec2 b)
{
    double la = curve.level(a);
    if (la > 0.0) std::swap(a, b);
    for (int it = 0; it < 200; ++it) {
        Vec2 m = 0.5 * (a + b);
        double lm = curve.level(m);
        if (std::abs(lm) <= tol_geom || (b - a).norm() <= tol_geom) return m;
        (lm < 0.0 ? a : b) = m;
    }
    return 0.5 * (a + b);
}

double polygon_diameter(const std::vector<Vec2>& pts)
{
    double d = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            d = std::max(d, (pts[i] - pts[j]).norm());
    return d;
}

// Build the edge table and per-cell metrics from polygon cycles.
void finalize_cells(InterfaceMesh& mesh, const std::vector<PolyCell>& polys)
{
    mesh.edges.clear();
    mesh.cells.clear();
    std::map<std::tuple<int, int, bool>, int> edge_of;

    for (const PolyCell& pc : polys) {
        Cell cell;
        cell.id = int(mesh.cells.size());
        cell.vertices = pc.verts;
        cell.subdomain = pc.sub;
        const int nseg = int(pc.verts.size());
        for (int i = 0; i < nseg; ++i) {
            int a = pc.verts[i];
            int b = pc.verts[(i + 1) % nseg];
            const Seg& sg = pc.segs[i];
            auto key = std::make_tuple(std::min(a, b), std::max(a, b), sg.is_arc);
            auto it = edge_of.find(key);
            int eid;
            if (it == edge_of.end()) {
                Edge e;
                e.id = int(mesh.edges.size());
                if (sg.is_arc) {
                    e.curved = true;
                    if (sg.t_from < sg.t_to) {
                        e.v0 = a;
                        e.v1 = b;
                        e.arc = {sg.t_from, sg.t_to};
                    } else {
                        e.v0 = b;
                        e.v1 = a;
                        e.arc = {sg.t_to, sg.t_from};
                    }
                    double shift = std::floor(e.arc.t0);
                    e.arc.t0 -= shift;
                    e.arc.t1 -= shift;
                } else {
                    e.v0 = a;
                    e.v1 = b;
                }
                eid = e.id;
                edge_of.emplace(key, eid);
                mesh.edges.push_back(e);
            } else {
                eid = it->second;
            }
            Edge& e = mesh.edges[eid];
            if (e.owner[0] == -1)
                e.owner[0] = cell.id;
            else if (e.owner[1] == -1)
                e.owner[1] = cell.id;
            else
                throw DegenerateCut(cell.id, "edge shared by more than two cells");
            cell.edges.push_back(eid);
            if (sg.is_arc) cell.curved = true;
        }
        mesh.cells.push_back(std::move(cell));
    }

    for (Edge& e : mesh.edges) {
        if (e.curved) {
            e.tag = EdgeTag::interface;
            if (e.owner[1] == -1)
                throw DegenerateCut(e.owner[0], "interface edge with a single owner");
            if (mesh.cells[e.owner[0]].subdomain != Subdomain::omega1)
                std::swap(e.owner[0], e.owner[1]);
            if (mesh.cells[e.owner[0]].subdomain != Subdomain::omega1 ||
                mesh.cells[e.owner[1]].subdomain != Subdomain::omega2)
                throw DegenerateCut(e.owner[0], "interface edge not separating the subdomains");
            e.length = arc_length(*mesh.curve, e.arc.t0, e.arc.t1);
        } else {
            e.tag = (e.owner[1] == -1) ? EdgeTag::boundary : EdgeTag::interior;
            e.length = (mesh.vertices[e.v1] - mesh.vertices[e.v0]).norm();
        }
    }

    for (Cell& c : mesh.cells) {
        std::vector<Vec2> pts;
        for (int v : c.vertices) pts.push_back(mesh.vertices[v]);
        Vec2 avg = Vec2::Zero();
        for (const Vec2& p : pts) avg += p;
        avg /= double(pts.size());
        for (int eid : c.edges) {
            const Edge& e = mesh.edges[eid];
            if (!e.curved) continue;
            for (int s = 1; s < 8; ++s)
                pts.push_back(mesh.curve->at(e.arc.t0 + (e.arc.t1 - e.arc.t0) * s / 8.0));
            if (c.vertices.size() == 2) {
                // lens: anchor the basis between chord and arc midpoints
                Vec2 arc_mid = mesh.curve->at(0.5 * (e.arc.t0 + e.arc.t1));
                avg = 0.5 * (avg + arc_mid);
            }
        }
        c.center = avg;
        c.diameter = polygon_diameter(pts);
        c.area = cell_signed_area(mesh, c);
        if (!(c.area > 0.0))
            throw DegenerateCut(c.id, "nonpositive cell area " + std::to_string(c.area));
    }
}

// Emit a cut piece, fan-triangulating when required: the tri pipeline splits
// every piece with more than three corners, and a piece carrying several arc
// segments must be split in any pipeline so each cell keeps a single curved
// edge.  The fan anchor has to see every arc with margin and keep all fan
// triangles positively oriented; when no corner qualifies a single-arc piece
// is kept whole (its quadrature handles the awkward shape), a multi-arc piece
// is a refinement error.
void emit_piece(std::vector<PolyCell>& out, const InterfaceMesh& mesh,
                const InterfaceCurve& cv, MeshKind kind, int parent_id, PolyCell pc)
{
    const int M = int(pc.verts.size());
    int arcs = 0;
    for (const Seg& s : pc.segs) arcs += s.is_arc;
    bool want_fan = (arcs > 1) || (kind == MeshKind::tri && M > 3 && arcs >= 1);
    if (!want_fan || M <= 3) {
        out.push_back(std::move(pc));
        return;
    }

    int best_anchor = -1;
    double best = 0.1; // sine of the minimum acceptable sight angle
    for (int i = 0; i < M; ++i) {
        if (pc.segs[i].is_arc || pc.segs[(i + M - 1) % M].is_arc) continue;
        Vec2 a = mesh.vertices[pc.verts[i]];
        double margin = 1.0;
        for (int j = 0; j < M && margin > best; ++j) {
            if (j == i || (j + 1) % M == i) continue;
            if (pc.segs[j].is_arc) {
                const Seg& s = pc.segs[j];
                for (int k = 0; k <= 24; ++k) {
                    double t = s.t_from + (s.t_to - s.t_from) * k / 24.0;
                    Vec2 d = cv.unit_tangent(t) * (s.t_to > s.t_from ? 1.0 : -1.0);
                    Vec2 r = (a - cv.at(t)).normalized();
                    margin = std::min(margin, d.x() * r.y() - d.y() * r.x());
                }
            } else {
                Vec2 p = mesh.vertices[pc.verts[j]] - a;
                Vec2 q = mesh.vertices[pc.verts[(j + 1) % M]] - a;
                margin = std::min(margin, (p.x() * q.y() - p.y() * q.x()) /
                                              std::max(1e-300, p.norm() * q.norm()));
            }
        }
        if (margin > best) {
            best = margin;
            best_anchor = i;
        }
    }
    if (best_anchor < 0) {
        if (arcs <= 1) {
            out.push_back(std::move(pc));
            return;
        }
        throw DegenerateCut(parent_id,
                            "cannot split a cell with several interface arcs; refine");
    }
    for (int i = 0; i < M; ++i) {
        if (i == best_anchor || (i + 1) % M == best_anchor) continue;
        PolyCell tri;
        tri.verts = {pc.verts[best_anchor], pc.verts[i], pc.verts[(i + 1) % M]};
        tri.segs = {Seg{}, pc.segs[i], Seg{}};
        tri.sub = pc.sub;
        out.push_back(std::move(tri));
    }
}

// Minimum distance from a point to a cell's boundary.
double boundary_distance(const InterfaceMesh& mesh, const Cell& cell, const Vec2& p)
{
    double best = std::numeric_limits<double>::max();
    for (int eid : cell.edges) {
        const Edge& e = mesh.edges[eid];
        if (!e.curved) {
            Vec2 a = mesh.vertices[e.v0], b = mesh.vertices[e.v1];
            Vec2 ab = b - a;
            double u = ab.squaredNorm() > 0.0 ? (p - a).dot(ab) / ab.squaredNorm() : 0.0;
            u = std::clamp(u, 0.0, 1.0);
            best = std::min(best, (p - (a + u * ab)).norm());
        } else {
            for (int s = 0; s <= 32; ++s) {
                double t = e.arc.t0 + (e.arc.t1 - e.arc.t0) * s / 32.0;
                best = std::min(best, (p - mesh.curve->at(t)).norm());
            }
        }
    }
    return best;
}

} // namespace

InterfaceMesh build_background_mesh(const Rect& domain, int n, MeshKind kind)
{
    if (n < 0) throw std::invalid_argument("refinement level must be >= 0");
    if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
        throw std::invalid_argument("degenerate domain");

    const int m = 4 << n; // 4x4 coarse template, each level halves h
    InterfaceMesh mesh;
    mesh.domain = domain;
    mesh.mesh_kind = kind;
    mesh.level = n;

    const double dx = domain.width() / m;
    const double dy = domain.height() / m;
    for (int j = 0; j <= m; ++j)
        for (int i = 0; i <= m; ++i)
            mesh.vertices.emplace_back(domain.x0 + i * dx, domain.y0 + j * dy);
    auto vid = [m](int i, int j) { return j * (m + 1) + i; };

    std::vector<PolyCell> polys;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            int sw = vid(i, j), se = vid(i + 1, j), ne = vid(i + 1, j + 1), nw = vid(i, j + 1);
            if (kind == MeshKind::quad) {
                polys.push_back({{sw, se, ne, nw}, std::vector<Seg>(4), Subdomain::omega2});
            } else {
                // split along the SW-NE diagonal
                polys.push_back({{sw, se, ne}, std::vector<Seg>(3), Subdomain::omega2});
                polys.push_back({{sw, ne, nw}, std::vector<Seg>(3), Subdomain::omega2});
            }
        }

    finalize_cells(mesh, polys);
    return mesh;
}

double cell_signed_area(const InterfaceMesh& mesh, const Cell& cell)
{
    // Green's theorem: area = closed integral of x dy along the ccw boundary.
    double area = 0.0;
    const int n = int(cell.edges.size());
    for (int i = 0; i < n; ++i) {
        const Edge& e = mesh.edges[cell.edges[i]];
        bool fwd = mesh.edge_forward(cell, i);
        if (!e.curved) {
            Vec2 p = mesh.vertices[fwd ? e.v0 : e.v1];
            Vec2 q = mesh.vertices[fwd ? e.v1 : e.v0];
            area += 0.5 * (p.x() + q.x()) * (q.y() - p.y());
        } else {
            const Gauss1D& g = gauss_legendre(16);
            const int panels = 8;
            double dt = (e.arc.t1 - e.arc.t0) / panels;
            double contrib = 0.0;
            for (int p = 0; p < panels; ++p)
                for (size_t q = 0; q < g.x.size(); ++q) {
                    double t = e.arc.t0 + (p + g.x[q]) * dt;
                    contrib +=
                        g.w[q] * dt * mesh.curve->at(t).x() * mesh.curve->velocity(t).y();
                }
            area += fwd ? contrib : -contrib;
        }
    }
    return area;
}

MeshStats mesh_statistics(const InterfaceMesh& mesh, const RegularityLimits& limits)
{
    MeshStats st;
    if (mesh.cells.empty()) return st; // h = 0, vacuous pass

    st.min_diameter = std::numeric_limits<double>::max();
    st.min_area_ratio = std::numeric_limits<double>::max();
    st.min_edge_ratio = std::numeric_limits<double>::max();
    st.min_ball_ratio = std::numeric_limits<double>::max();

    for (const Cell& c : mesh.cells) {
        st.max_diameter = std::max(st.max_diameter, c.diameter);
        st.min_diameter = std::min(st.min_diameter, c.diameter);
        double area_ratio = c.area / (c.diameter * c.diameter);
        double edge_ratio = std::numeric_limits<double>::max();
        for (int eid : c.edges) {
            const Edge& e = mesh.edges[eid];
            double chord = (mesh.vertices[e.v1] - mesh.vertices[e.v0]).norm();
            edge_ratio = std::min(edge_ratio, chord / c.diameter);
        }
        double ball = boundary_distance(mesh, c, c.center);
        for (int v : c.vertices)
            ball = std::max(ball,
                            boundary_distance(mesh, c, 0.5 * (c.center + mesh.vertices[v])));
        double ball_ratio = ball / c.diameter;

        st.min_area_ratio = std::min(st.min_area_ratio, area_ratio);
        st.min_edge_ratio = std::min(st.min_edge_ratio, edge_ratio);
        st.min_ball_ratio = std::min(st.min_ball_ratio, ball_ratio);
        if (area_ratio < limits.area_ratio || edge_ratio < limits.edge_ratio ||
            ball_ratio < limits.ball_ratio)
            st.offending_cells.push_back(c.id);
    }
    st.h = st.max_diameter;
    st.regularity_pass = st.offending_cells.empty();
    return st;
}

InterfaceMesh fit_interface(const InterfaceMesh& background,
                            std::shared_ptr<const InterfaceCurve> curve,
                            const FitOptions& opts)
{
    if (background.fitted) throw std::invalid_argument("mesh already fitted");
    if (!curve) throw std::invalid_argument("null curve");
    const InterfaceCurve& cv = *curve;

    InterfaceMesh mesh;
    mesh.domain = background.domain;
    mesh.mesh_kind = background.mesh_kind;
    mesh.level = background.level;
    mesh.curve = curve;
    mesh.vertices = background.vertices;

    const int nv0 = int(mesh.vertices.size());
    std::vector<char> boundary_vertex(nv0, 0);
    std::vector<double> min_incident(nv0, std::numeric_limits<double>::max());
    for (const Edge& e : background.edges) {
        double len = (mesh.vertices[e.v1] - mesh.vertices[e.v0]).norm();
        min_incident[e.v0] = std::min(min_incident[e.v0], len);
        min_incident[e.v1] = std::min(min_incident[e.v1], len);
        if (e.tag == EdgeTag::boundary) {
            boundary_vertex[e.v0] = boundary_vertex[e.v1] = 1;
            // the curve must stay strictly inside the domain
            Vec2 mid = 0.5 * (mesh.vertices[e.v0] + mesh.vertices[e.v1]);
            if (cv.classify(mesh.vertices[e.v0]) != Side::side2 ||
                cv.classify(mid) != Side::side2)
                throw std::invalid_argument("curve is not strictly inside the domain");
        }
    }

    // snap near-curve vertices onto the curve (shortest direction)
    std::vector<double> vparam(mesh.vertices.size(), 0.0);
    std::vector<Side> side(mesh.vertices.size());
    for (int v = 0; v < nv0; ++v) {
        if (!boundary_vertex[v] &&
            std::abs(cv.level(mesh.vertices[v])) <= opts.snap_fraction * min_incident[v])
            mesh.vertices[v] = cv.project(mesh.vertices[v]);
        side[v] = cv.classify(mesh.vertices[v]);
        if (side[v] == Side::on) vparam[v] = cv.param_near(mesh.vertices[v]);
    }

    // Locate interior crossings of the (possibly snapped) background edges by
    // scanning for sign changes of the level function.  An edge grazing the
    // curve near a snapped vertex is crossed once more; splitting there leaves
    // an on-on sub-edge that is later bent onto the exact arc, which absorbs
    // the sliver between chord and curve.
    std::map<std::pair<int, int>, std::vector<std::pair<double, int>>> split_at;
    const int nsamp = 16;
    for (const Edge& e : background.edges) {
        Vec2 a = mesh.vertices[e.v0], b = mesh.vertices[e.v1];
        double lv[nsamp + 1];
        for (int i = 0; i <= nsamp; ++i) {
            lv[i] = cv.level(a + (double(i) / nsamp) * (b - a));
            if (std::abs(lv[i]) <= tol_geom) lv[i] = 0.0;
        }
        std::vector<std::pair<double, int>> splits;
        int last = -1; // previous strictly-signed sample
        for (int i = 0; i <= nsamp; ++i) {
            if (lv[i] == 0.0) continue;
            if (last >= 0 && (lv[last] > 0.0) != (lv[i] > 0.0)) {
                if (e.tag == EdgeTag::boundary)
                    throw std::invalid_argument("curve crosses the domain boundary");
                Vec2 x = bisect_crossing(cv, a + (double(last) / nsamp) * (b - a),
                                         a + (double(i) / nsamp) * (b - a));
                double t = cv.param_near(x);
                int id = int(mesh.vertices.size());
                mesh.vertices.push_back(cv.at(t));
                side.push_back(Side::on);
                vparam.push_back(t);
                splits.emplace_back(0.5 * (last + i) / nsamp, id);
            }
            last = i;
        }
        if (splits.size() > 2)
            throw CellCutTwice(e.owner[0], "edge crossed more than twice; refine the mesh");
        if (!splits.empty())
            split_at[{std::min(e.v0, e.v1), std::max(e.v0, e.v1)}] =
                (e.v0 < e.v1) ? splits
                              : std::vector<std::pair<double, int>>(splits.rbegin(),
                                                                    splits.rend());
    }

    // rebuild cells
    std::vector<PolyCell> out;
    for (const Cell& bc : background.cells) {
        // node cycle: original corners plus inserted crossing vertices
        std::vector<int> nodes;
        const int n = int(bc.vertices.size());
        for (int i = 0; i < n; ++i) {
            int a = bc.vertices[i], b = bc.vertices[(i + 1) % n];
            nodes.push_back(a);
            auto it = split_at.find({std::min(a, b), std::max(a, b)});
            if (it == split_at.end()) continue;
            if (a < b)
                for (const auto& [u, id] : it->second) nodes.push_back(id);
            else
                for (auto r = it->second.rbegin(); r != it->second.rend(); ++r)
                    nodes.push_back(r->second);
        }
        const int N = int(nodes.size());

        // --- contact analysis -------------------------------------------
        // The curve meets the cell boundary in contact components: isolated
        // on-nodes (transversal passes or touches) and runs of consecutive
        // on-nodes whose joining segments ride along the curve.  Between
        // consecutive contacts (in curve parameter) the curve is either
        // inside this cell (a cut) or in a neighbor.

        // ride detection: an on-on segment is bent onto the arc only when the
        // short arc actually hugs the chord
        std::vector<char> seg_on(N, 0);
        for (int i = 0; i < N; ++i) {
            int a = nodes[i], b = nodes[(i + 1) % N];
            if (side[a] != Side::on || side[b] != Side::on) continue;
            Seg arc = directed_arc(vparam[a], vparam[b]);
            Vec2 pa = mesh.vertices[a], pb = mesh.vertices[b];
            double chord = (pb - pa).norm();
            bool hugs = chord > 0.0;
            for (int s = 1; s < 8 && hugs; ++s) {
                Vec2 x = cv.at(arc.t_from + (arc.t_to - arc.t_from) * s / 8.0);
                Vec2 d = pb - pa;
                double u = std::clamp((x - pa).dot(d) / d.squaredNorm(), 0.0, 1.0);
                hugs = (x - (pa + u * d)).norm() <= chord;
            }
            seg_on[i] = hugs;
        }

        // contact components: cyclic runs of on-nodes joined by ride segments
        std::vector<int> comp(N, -1);
        int ncomp = 0;
        for (int i = 0; i < N; ++i) {
            if (side[nodes[i]] != Side::on || comp[i] >= 0) continue;
            int start = i;
            while (seg_on[(start + N - 1) % N] && comp[(start + N - 1) % N] < 0 &&
                   (start + N - 1) % N != i)
                start = (start + N - 1) % N;
            int c = ncomp++;
            int j = start;
            comp[j] = c;
            while (seg_on[j]) {
                j = (j + 1) % N;
                if (comp[j] >= 0) break;
                comp[j] = c;
            }
        }

        struct Contact {
            double t;
            int node_idx;
            int comp;
        };
        std::vector<Contact> contacts;
        for (int i = 0; i < N; ++i) {
            if (side[nodes[i]] != Side::on) continue;
            bool run_start = !seg_on[(i + N - 1) % N];
            bool run_end = !seg_on[i];
            if (run_start || run_end) contacts.push_back({vparam[nodes[i]], i, comp[i]});
        }

        auto strict_consensus = [&](const std::vector<int>& ids) -> std::optional<Subdomain> {
            std::optional<Subdomain> sub;
            for (int v : ids) {
                if (side[v] == Side::on) continue;
                Subdomain s = (side[v] == Side::side1) ? Subdomain::omega1 : Subdomain::omega2;
                if (sub && *sub != s) return std::nullopt;
                sub = s;
            }
            return sub;
        };
        std::vector<Vec2> npos;
        for (int v : nodes) npos.push_back(mesh.vertices[v]);
        auto inside_cell = [&](const Vec2& p) {
            bool in = false;
            for (int i = 0, j = N - 1; i < N; j = i++) {
                if ((npos[i].y() > p.y()) != (npos[j].y() > p.y()) &&
                    p.x() < (npos[j].x() - npos[i].x()) * (p.y() - npos[i].y()) /
                                    (npos[j].y() - npos[i].y()) +
                                npos[i].x())
                    in = !in;
            }
            return in;
        };

        // interior gaps between consecutive contacts in curve parameter
        struct Gap {
            int from_idx, to_idx; // node cycle positions
            double t_from, t_to;  // unwrapped, t_to > t_from
        };
        std::vector<Gap> cuts;
        if (contacts.size() >= 2) {
            std::sort(contacts.begin(), contacts.end(),
                      [base = contacts[0].t](const Contact& a, const Contact& b) {
                          return wrap01(a.t - base) < wrap01(b.t - base);
                      });
            const int K = int(contacts.size());
            for (int i = 0; i < K; ++i) {
                const Contact& a = contacts[i];
                const Contact& b = contacts[(i + 1) % K];
                if (a.comp == b.comp) continue; // boundary ride, not a gap
                double dt = wrap01(b.t - a.t);
                if (dt == 0.0) continue;
                int votes = 0;
                for (double u : {0.25, 0.5, 0.75})
                    votes += inside_cell(cv.at(a.t + u * dt));
                if (votes == 3)
                    cuts.push_back({a.node_idx, b.node_idx, a.t, a.t + dt});
                else if (votes != 0)
                    throw CellCutTwice(bc.id, "ambiguous cut arc; refine the mesh");
            }
        }
        if (cuts.size() > 1)
            throw CellCutTwice(bc.id, std::to_string(cuts.size() + 1) +
                                          " interface passes through one cell; refine");

        if (cuts.empty()) {
            // uncut, possibly with contacts and ridden segments
            auto sub = strict_consensus(nodes);
            if (!sub) throw CellCutTwice(bc.id, "vertices on both sides without a valid cut");
            Vec2 centroid = Vec2::Zero();
            for (int v : nodes) centroid += mesh.vertices[v];
            centroid /= double(N);
            Side cs = cv.classify(centroid);
            if (cs != Side::on) {
                Subdomain csub = (cs == Side::side1) ? Subdomain::omega1 : Subdomain::omega2;
                if (csub != *sub)
                    throw CellCutTwice(bc.id,
                                       "unresolved interface feature inside a cell; refine");
            }
            PolyCell pc;
            pc.verts = nodes;
            pc.segs.resize(N);
            for (int i = 0; i < N; ++i)
                if (seg_on[i])
                    pc.segs[i] = directed_arc(vparam[nodes[i]], vparam[nodes[(i + 1) % N]]);
            pc.sub = *sub;
            emit_piece(out, mesh, cv, background.mesh_kind, bc.id, std::move(pc));
            continue;
        }

        // split along the interior arc between the two contact nodes
        const Gap& g = cuts.front();
        auto build_piece = [&](int from, int to, double tf, double tt) -> PolyCell {
            PolyCell pc;
            for (int i = from;; i = (i + 1) % N) {
                pc.verts.push_back(nodes[i]);
                if (seg_on[i]) {
                    pc.segs.push_back(directed_arc(vparam[nodes[i]], vparam[nodes[(i + 1) % N]]));
                } else {
                    pc.segs.push_back(Seg{});
                }
                if (i == to) break;
            }
            Seg closing;
            closing.is_arc = true;
            closing.t_from = tf;
            closing.t_to = tt;
            pc.segs.back() = closing;
            std::vector<int> chain(pc.verts.begin() + 1, pc.verts.end() - 1);
            auto sub = strict_consensus(chain);
            if (!chain.empty() && !sub) {
                // only ride nodes between the cut ends still identifies a side
                bool all_on = true;
                for (int v : chain) all_on &= (side[v] == Side::on);
                if (!all_on) throw CellCutTwice(bc.id, "mixed sides along one cut piece");
            }
            if (!sub) {
                // sliver piece: classify by a point between chord and arc
                Vec2 chord_mid =
                    0.5 * (mesh.vertices[nodes[from]] + mesh.vertices[nodes[to]]);
                Vec2 arc_mid = cv.at(0.5 * (tf + tt));
                Side s = cv.classify(0.5 * (chord_mid + arc_mid));
                if (s == Side::on) throw DegenerateCut(bc.id, "degenerate lens piece");
                sub = (s == Side::side1) ? Subdomain::omega1 : Subdomain::omega2;
            }
            pc.sub = *sub;
            return pc;
        };
        // piece A runs with the cut arc traversed backward, piece B forward
        PolyCell pa = build_piece(g.from_idx, g.to_idx, g.t_to, g.t_from);
        PolyCell pb = build_piece(g.to_idx, g.from_idx, g.t_from, g.t_to);
        if (pa.sub == pb.sub) throw CellCutTwice(bc.id, "cut pieces on the same side");
        emit_piece(out, mesh, cv, background.mesh_kind, bc.id, std::move(pa));
        emit_piece(out, mesh, cv, background.mesh_kind, bc.id, std::move(pb));
    }

    finalize_cells(mesh, out);
    mesh.fitted = true;

    bool any_interface = false;
    for (const Edge& e : mesh.edges) any_interface |= (e.tag == EdgeTag::interface);
    if (!any_interface)
        throw CellCutTwice(0, "curve does not intersect any cell boundary; refine the mesh");

    if (opts.check_regularity) {
        MeshStats st = mesh_statistics(mesh, opts.limits);
        if (!st.regularity_pass)
            throw DegenerateCut(st.offending_cells.front(),
                                "regularity limits violated by " +
                                    std::to_string(st.offending_cells.size()) + " cells");
    }
    return mesh;
}

InterfaceMesh straighten_interface(const InterfaceMesh& mesh)
{
    InterfaceMesh out = mesh;
    for (Edge& e : out.edges)
        if (e.curved) {
            e.curved = false;
            e.length = (out.vertices[e.v1] - out.vertices[e.v0]).norm();
        }
    out.curve.reset();
    for (Cell& c : out.cells) {
        c.curved = false;
        std::vector<Vec2> pts;
        for (int v : c.vertices) pts.push_back(out.vertices[v]);
        c.diameter = polygon_diameter(pts);
        c.area = cell_signed_area(out, c);
        if (!(c.area > 0.0)) throw DegenerateCut(c.id, "chord approximation inverted a cell");
    }
    return out;
}

} // namespace wg
