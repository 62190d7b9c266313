#include "wg/refmap.hpp"

#include <cmath>

namespace wg {

namespace {

// Curved-geometry rules need margin over the declared polynomial exactness:
// the integrands carry non-polynomial jacobian and arc-speed factors whose
// quadrature error has to stay below the k=3 discretization error.
inline int curved_cell_min_points(int m) { return std::min(24, 2 * m + 6); }
inline int curved_edge_min_points(int m) { return std::min(48, 4 * m); }

// Arc reparametrized to s in [0,1], running corner[0] -> corner[1].
inline Vec2 arc_point(const SubMap& m, double s)
{
    return m.curve->at(m.t_from + s * (m.t_to - m.t_from));
}
inline Vec2 arc_velocity(const SubMap& m, double s)
{
    return (m.t_to - m.t_from) * m.curve->velocity(m.t_from + s * (m.t_to - m.t_from));
}

} // namespace

Vec2 SubMap::map(double xi, double eta) const
{
    switch (kind) {
    case MapKind::affine_tri:
        return corner[0] + xi * (corner[1] - corner[0]) + eta * (corner[2] - corner[0]);
    case MapKind::bilinear_quad:
        return (1 - xi) * (1 - eta) * corner[0] + xi * (1 - eta) * corner[1] +
               xi * eta * corner[2] + (1 - xi) * eta * corner[3];
    case MapKind::transfinite_tri: {
        // affine part plus a blended deviation of the arc from its chord;
        // the curved edge is the reference edge eta = 0
        Vec2 lin = corner[0] * (1 - xi - eta) + corner[1] * xi + corner[2] * eta;
        if (eta >= 1.0) return lin;
        double sigma = xi / (1 - eta);
        Vec2 dev = arc_point(*this, sigma) -
                   (corner[0] + sigma * (corner[1] - corner[0]));
        return lin + (1 - eta) * dev;
    }
    case MapKind::ruled_lens: {
        Vec2 chord = corner[0] + xi * (corner[1] - corner[0]);
        return (1 - eta) * chord + eta * arc_point(*this, xi);
    }
    }
    return Vec2::Zero();
}

Mat2 SubMap::jacobian(double xi, double eta) const
{
    Mat2 J;
    switch (kind) {
    case MapKind::affine_tri:
        J.col(0) = corner[1] - corner[0];
        J.col(1) = corner[2] - corner[0];
        break;
    case MapKind::bilinear_quad:
        J.col(0) = (1 - eta) * (corner[1] - corner[0]) + eta * (corner[2] - corner[3]);
        J.col(1) = (1 - xi) * (corner[3] - corner[0]) + xi * (corner[2] - corner[1]);
        break;
    case MapKind::transfinite_tri: {
        double sigma = xi / (1 - eta);
        Vec2 chord_dir = corner[1] - corner[0];
        Vec2 dev = arc_point(*this, sigma) - (corner[0] + sigma * chord_dir);
        Vec2 ddev = arc_velocity(*this, sigma) - chord_dir;
        J.col(0) = chord_dir + ddev;
        J.col(1) = (corner[2] - corner[0]) - dev + sigma * ddev;
        break;
    }
    case MapKind::ruled_lens: {
        Vec2 chord_dir = corner[1] - corner[0];
        J.col(0) = (1 - eta) * chord_dir + eta * arc_velocity(*this, xi);
        J.col(1) = arc_point(*this, xi) - (corner[0] + xi * chord_dir);
        break;
    }
    }
    return J;
}

namespace {

// Directed arc parameters as seen from a cell traversing edge e at slot i.
std::pair<double, double> directed_params(const InterfaceMesh& mesh, const Cell& cell,
                                          int slot)
{
    const Edge& e = mesh.edges[cell.edges[slot]];
    if (mesh.edge_forward(cell, slot)) return {e.arc.t0, e.arc.t1};
    return {e.arc.t1, e.arc.t0};
}

SubMap transfinite_from(const InterfaceMesh& mesh, const Cell& cell, int arc_slot,
                        Vec2 apex)
{
    SubMap m;
    m.kind = MapKind::transfinite_tri;
    const int n = int(cell.vertices.size());
    m.corner[0] = mesh.vertices[cell.vertices[arc_slot]];
    m.corner[1] = mesh.vertices[cell.vertices[(arc_slot + 1) % n]];
    m.corner[2] = apex;
    m.curve = mesh.curve.get();
    std::tie(m.t_from, m.t_to) = directed_params(mesh, cell, arc_slot);
    return m;
}

std::vector<RefPoint> probe_points(const SubMap& s, int probe_exactness)
{
    std::vector<RefPoint> pts = s.triangular() ? ref_triangle_rule(probe_exactness, 6)
                                               : ref_square_rule(probe_exactness);
    // lattice points reach closer to the reference boundary than Gauss nodes
    for (int i = 1; i < 8; ++i)
        for (int j = 1; j < 8; ++j) {
            double x = i / 8.0, y = j / 8.0;
            if (s.triangular()) y *= 1.0 - x;
            pts.push_back({x, y, 0.0});
        }
    return pts;
}

bool submap_positive(const SubMap& s, int probe_exactness, RefPoint* bad = nullptr)
{
    for (const RefPoint& p : probe_points(s, probe_exactness))
        if (!(s.jacobian(p.x, p.y).determinant() > 0.0)) {
            if (bad) *bad = p;
            return false;
        }
    return true;
}

// Distorted cut pieces can fold a single blended map even though the region
// itself is fine.  Bisecting the arc shrinks the blend deviation quadratically,
// so a few splits restore a positive Jacobian whenever the arc is star-shaped
// from the apex.
bool push_transfinite_split(std::vector<SubMap>& subs, const SubMap& m, int probe_exactness,
                            int depth = 0)
{
    if (submap_positive(m, probe_exactness)) {
        subs.push_back(m);
        return true;
    }
    if (depth >= 6) return false;
    double tmid = 0.5 * (m.t_from + m.t_to);
    SubMap left = m, right = m;
    left.t_to = tmid;
    left.corner[1] = m.curve->at(tmid);
    right.t_from = tmid;
    right.corner[0] = m.curve->at(tmid);
    size_t mark = subs.size();
    if (push_transfinite_split(subs, left, probe_exactness, depth + 1) &&
        push_transfinite_split(subs, right, probe_exactness, depth + 1))
        return true;
    subs.resize(mark);
    return false;
}

void probe_positive(const CellMap& cm, int probe_exactness)
{
    for (const SubMap& s : cm.subs) {
        RefPoint bad{0, 0, 0};
        if (!submap_positive(s, probe_exactness, &bad))
            throw NonPositiveJacobian(cm.cell_id, bad.x, bad.y);
    }
}

// Ruled strip between the segment B0->B1 and the arc t_from->t_to, with
// orientation auto-correction and recursive splitting.  This is the only
// primitive that stays valid at a tangential cusp (segment and arc sharing an
// endpoint and direction): detJ vanishes at the cusp point itself but is
// positive inside.
bool push_ruled(std::vector<SubMap>& subs, const InterfaceCurve* curve, Vec2 b0, Vec2 b1,
                double tf, double tt, int probe_exactness, int depth = 0)
{
    SubMap m;
    m.kind = MapKind::ruled_lens;
    m.curve = curve;
    m.corner[0] = b0;
    m.corner[1] = b1;
    m.t_from = tf;
    m.t_to = tt;
    if (depth == 0 && m.jacobian(0.5, 0.5).determinant() < 0.0) {
        std::swap(m.corner[0], m.corner[1]);
        std::swap(m.t_from, m.t_to);
        std::swap(b0, b1);
        std::swap(tf, tt);
    }
    if (submap_positive(m, probe_exactness)) {
        subs.push_back(m);
        return true;
    }
    if (depth >= 6) return false;
    Vec2 bm = 0.5 * (b0 + b1);
    double tm = 0.5 * (tf + tt);
    size_t mark = subs.size();
    if (push_ruled(subs, curve, b0, bm, tf, tm, probe_exactness, depth + 1) &&
        push_ruled(subs, curve, bm, b1, tm, tt, probe_exactness, depth + 1))
        return true;
    subs.resize(mark);
    return false;
}

// Cusp-tolerant decomposition of the curved-triangle region (apex w, straight
// sides w-X0 and X1-w, arc X0->X1): split the arc at a point M and cover each
// side by a ruled strip between the adjacent straight side and its sub-arc;
// the strips meet along the interior segment w-M.  The split is placed
// proportionally to the side lengths so neither strip pairs a short segment
// with a long arc.
bool cusp_ruled_region(std::vector<SubMap>& subs, const InterfaceCurve* curve, Vec2 w,
                       Vec2 x0, Vec2 x1, double tf, double tt, int probe_exactness)
{
    double l0 = (w - x0).norm(), l1 = (w - x1).norm();
    double tm = tf + (tt - tf) * (l0 / (l0 + l1));
    size_t mark = subs.size();
    if (push_ruled(subs, curve, x0, w, tf, tm, probe_exactness) &&
        push_ruled(subs, curve, x1, w, tt, tm, probe_exactness))
        return true;
    subs.resize(mark);
    return false;
}

// Fan around an interior point that sees the straight boundary (and ideally
// the arc); a fallback when no boundary corner works as a fan anchor.  The
// arc region is covered by a transfinite fan when the point sees the arc, and
// by cusp-tolerant ruled strips otherwise.
bool star_point_fan(const InterfaceMesh& mesh, const Cell& cell, int arc_slot,
                    int probe_exactness, std::vector<SubMap>& subs)
{
    const int n = int(cell.vertices.size());
    const Edge& ae = mesh.edges[cell.edges[arc_slot]];
    const int samples = 48;

    // signed clearance of q to the ccw boundary; with arcs included it is a
    // star-shapedness margin, without them only the straight part must be seen
    auto clearance = [&](const Vec2& q, bool include_arc) {
        double worst = std::numeric_limits<double>::max();
        for (int i = 0; i < n; ++i) {
            const Edge& e = mesh.edges[cell.edges[i]];
            bool fwd = mesh.edge_forward(cell, i);
            if (!e.curved) {
                Vec2 a = mesh.vertices[fwd ? e.v0 : e.v1];
                Vec2 b = mesh.vertices[fwd ? e.v1 : e.v0];
                Vec2 d = (b - a).normalized();
                worst = std::min(worst, d.x() * (q - a).y() - d.y() * (q - a).x());
            } else if (include_arc) {
                double sgn = fwd ? 1.0 : -1.0;
                for (int s = 0; s <= samples; ++s) {
                    double t = e.arc.t0 + (e.arc.t1 - e.arc.t0) * s / samples;
                    Vec2 d = sgn * mesh.curve->unit_tangent(t);
                    Vec2 r = q - mesh.curve->at(t);
                    worst = std::min(worst, d.x() * r.y() - d.y() * r.x());
                }
            }
        }
        return worst;
    };

    auto search = [&](bool include_arc, Vec2& q_out) {
        Vec2 arc_mid = mesh.curve->at(0.5 * (ae.arc.t0 + ae.arc.t1));
        std::vector<Vec2> seeds{cell.center};
        for (int v : cell.vertices) seeds.push_back(0.5 * (cell.center + mesh.vertices[v]));
        for (double lam : {0.5, 1.0})
            seeds.push_back(cell.center + lam * (cell.center - arc_mid));
        Vec2 q = cell.center;
        double best = -std::numeric_limits<double>::max();
        for (const Vec2& s : seeds) {
            double c = clearance(s, include_arc);
            if (c > best) {
                best = c;
                q = s;
            }
        }
        double step = 0.25 * cell.diameter;
        while (step > 1e-4 * cell.diameter) {
            bool improved = false;
            for (int d = 0; d < 8; ++d) {
                double a = d * M_PI / 4.0;
                Vec2 cand = q + step * Vec2(std::cos(a), std::sin(a));
                double c = clearance(cand, include_arc);
                if (c > best) {
                    best = c;
                    q = cand;
                    improved = true;
                }
            }
            if (!improved) step *= 0.5;
        }
        q_out = q;
        return best > 0.0;
    };

    auto emit = [&](const Vec2& q, bool arc_by_ruled) {
        size_t mark = subs.size();
        for (int i = 0; i < n; ++i) {
            const Edge& e = mesh.edges[cell.edges[i]];
            bool fwd = mesh.edge_forward(cell, i);
            if (!e.curved) {
                SubMap m;
                m.kind = MapKind::affine_tri;
                m.corner[0] = mesh.vertices[fwd ? e.v0 : e.v1];
                m.corner[1] = mesh.vertices[fwd ? e.v1 : e.v0];
                m.corner[2] = q;
                if (!submap_positive(m, probe_exactness)) {
                    subs.resize(mark);
                    return false;
                }
                subs.push_back(m);
            } else {
                SubMap t = transfinite_from(mesh, cell, i, q);
                bool ok = arc_by_ruled
                              ? cusp_ruled_region(subs, t.curve, q, t.corner[0], t.corner[1],
                                                  t.t_from, t.t_to, probe_exactness)
                              : push_transfinite_split(subs, t, probe_exactness);
                if (!ok) {
                    subs.resize(mark);
                    return false;
                }
            }
        }
        return true;
    };

    Vec2 q;
    if (search(true, q) && (emit(q, false) || emit(q, true))) return true;
    if (search(false, q) && (emit(q, true) || emit(q, false))) return true;
    return false;
}

} // namespace

CellMap build_cell_map(const InterfaceMesh& mesh, const Cell& cell, int probe_exactness)
{
    CellMap cm;
    cm.cell_id = cell.id;
    const int n = int(cell.vertices.size());

    int arc_slot = -1;
    for (int i = 0; i < n; ++i)
        if (mesh.edges[cell.edges[i]].curved) {
            if (arc_slot != -1) throw DegenerateCut(cell.id, "cell with two curved edges");
            arc_slot = i;
        }

    if (arc_slot == -1) {
        if (n == 3) {
            SubMap m;
            m.kind = MapKind::affine_tri;
            for (int i = 0; i < 3; ++i) m.corner[i] = mesh.vertices[cell.vertices[i]];
            cm.subs.push_back(m);
        } else if (n == 4) {
            SubMap m;
            m.kind = MapKind::bilinear_quad;
            for (int i = 0; i < 4; ++i) m.corner[i] = mesh.vertices[cell.vertices[i]];
            cm.subs.push_back(m);
        } else {
            // straight polygon (chord-approximated piece): fan of affine triangles
            for (int i = 1; i + 1 < n; ++i) {
                SubMap m;
                m.kind = MapKind::affine_tri;
                m.corner[0] = mesh.vertices[cell.vertices[0]];
                m.corner[1] = mesh.vertices[cell.vertices[i]];
                m.corner[2] = mesh.vertices[cell.vertices[i + 1]];
                cm.subs.push_back(m);
            }
        }
    } else if (n == 2) {
        SubMap m;
        m.kind = MapKind::ruled_lens;
        // lens cycle is [straight a->b, arc b->a]; the ruled map runs the arc a->b
        int straight_slot = 1 - arc_slot;
        m.corner[0] = mesh.vertices[cell.vertices[straight_slot == 0 ? 0 : 1]];
        m.corner[1] = mesh.vertices[cell.vertices[straight_slot == 0 ? 1 : 0]];
        m.curve = mesh.curve.get();
        auto [tf, tt] = directed_params(mesh, cell, arc_slot);
        m.t_from = tt; // reversed: blend top runs corner[0] -> corner[1]
        m.t_to = tf;
        cm.subs.push_back(m);
    } else {
        // curved cell: try a boundary corner as the fan anchor, preferring
        // transversal sight lines to the arc ends; fall back to a fan around
        // an interior star point when every corner anchor folds
        const Edge& ae = mesh.edges[cell.edges[arc_slot]];
        Vec2 arc_mid = mesh.curve->at(0.5 * (ae.arc.t0 + ae.arc.t1));
        int a0 = arc_slot, a1 = (arc_slot + 1) % n;
        int anchor = -1;
        double best = -1.0;
        for (int i = 0; i < n; ++i) {
            if (i == a0 || i == a1) continue;
            Vec2 a = mesh.vertices[cell.vertices[i]];
            double score = 1.0;
            for (double tend : {ae.arc.t0, ae.arc.t1}) {
                Vec2 x = mesh.curve->at(tend);
                Vec2 sight = (x - a).normalized();
                Vec2 tang = mesh.curve->unit_tangent(tend);
                score = std::min(score,
                                 std::abs(sight.x() * tang.y() - sight.y() * tang.x()));
            }
            score += 1e-3 * (a - arc_mid).norm();
            if (score > best) {
                best = score;
                anchor = i;
            }
        }

        Vec2 apex = mesh.vertices[cell.vertices[anchor]];
        auto try_anchor_fan = [&](bool arc_by_ruled_strips) {
            cm.subs.clear();
            bool ok = true;
            for (int i = 0; i < n && ok; ++i) {
                if (i == anchor || (i + 1) % n == anchor) continue;
                if (i == arc_slot) {
                    SubMap t = transfinite_from(mesh, cell, i, apex);
                    ok = arc_by_ruled_strips
                             ? cusp_ruled_region(cm.subs, t.curve, apex, t.corner[0],
                                                 t.corner[1], t.t_from, t.t_to,
                                                 probe_exactness)
                             : push_transfinite_split(cm.subs, t, probe_exactness);
                } else {
                    SubMap m;
                    m.kind = MapKind::affine_tri;
                    m.corner[0] = apex;
                    m.corner[1] = mesh.vertices[cell.vertices[i]];
                    m.corner[2] = mesh.vertices[cell.vertices[(i + 1) % n]];
                    ok = submap_positive(m, probe_exactness);
                    cm.subs.push_back(m);
                }
            }
            return ok;
        };
        if (!try_anchor_fan(false) && !try_anchor_fan(true)) {
            cm.subs.clear();
            if (!star_point_fan(mesh, cell, arc_slot, probe_exactness, cm.subs))
                throw NonPositiveJacobian(cell.id, 0.0, 0.0);
        }
    }

    probe_positive(cm, probe_exactness);
    return cm;
}

QuadratureRule cell_quadrature(const CellMap& map, int m)
{
    if (m < 1) m = 1;
    QuadratureRule rule;
    rule.declared_exactness = m;
    for (const SubMap& s : map.subs) {
        std::vector<RefPoint> ref;
        switch (s.kind) {
        case MapKind::affine_tri: ref = ref_triangle_rule(m); break;
        // physical polynomials pull back through the bilinear map with one
        // extra degree per direction
        case MapKind::bilinear_quad: ref = ref_square_rule(m + 1); break;
        case MapKind::transfinite_tri: {
            // Duffy collapse onto the apex: under (xi, eta) = (u(1-v), v) the
            // blending ratio xi/(1-eta) becomes plain u, so the pulled-back
            // integrand is analytic and the tensor rule converges spectrally.
            int nmin = std::max(gauss_points_for(m + 2), curved_cell_min_points(m));
            const Gauss1D& g = gauss_legendre(nmin);
            for (size_t i = 0; i < g.x.size(); ++i)
                for (size_t j = 0; j < g.x.size(); ++j)
                    ref.push_back({g.x[i] * (1.0 - g.x[j]), g.x[j],
                                   g.w[i] * g.w[j] * (1.0 - g.x[j])});
            break;
        }
        case MapKind::ruled_lens: {
            int nmin = std::max(gauss_points_for(m + 1), curved_cell_min_points(m));
            const Gauss1D& g = gauss_legendre(nmin);
            for (size_t i = 0; i < g.x.size(); ++i)
                for (size_t j = 0; j < g.x.size(); ++j)
                    ref.push_back({g.x[i], g.x[j], g.w[i] * g.w[j]});
            break;
        }
        }
        for (const RefPoint& p : ref) {
            double det = s.jacobian(p.x, p.y).determinant();
            if (!(det > 0.0)) throw NonPositiveJacobian(map.cell_id, p.x, p.y);
            rule.points.push_back(s.map(p.x, p.y));
            rule.weights.push_back(p.w * det);
        }
    }
    return rule;
}

EdgeQuadrature edge_quadrature(const InterfaceMesh& mesh, const Edge& edge, int m)
{
    if (m < 1) m = 1;
    EdgeQuadrature eq;
    eq.declared_exactness = m;
    eq.length = edge.length;

    if (!edge.curved) {
        const Gauss1D& g = gauss_legendre(gauss_points_for(m));
        Vec2 a = mesh.vertices[edge.v0], b = mesh.vertices[edge.v1];
        Vec2 tang = (b - a) / edge.length;
        Vec2 nrm(tang.y(), -tang.x());
        for (size_t i = 0; i < g.x.size(); ++i) {
            eq.points.push_back(a + g.x[i] * (b - a));
            eq.weights.push_back(g.w[i] * edge.length);
            eq.sparam.push_back(g.x[i]);
            eq.normal.push_back(nrm);
        }
    } else {
        const int npts = std::max(gauss_points_for(m), curved_edge_min_points(m));
        const Gauss1D& g = gauss_legendre(npts);
        const InterfaceCurve& cv = *mesh.curve;
        double t0 = edge.arc.t0, dt = edge.arc.t1 - edge.arc.t0;
        for (size_t i = 0; i < g.x.size(); ++i) {
            double t = t0 + g.x[i] * dt;
            Vec2 vel = cv.velocity(t);
            double speed = vel.norm();
            eq.points.push_back(cv.at(t));
            eq.weights.push_back(g.w[i] * dt * speed);
            eq.sparam.push_back(arc_length(cv, t0, t, 2) / edge.length);
            Vec2 tang = vel / speed;
            eq.normal.push_back(Vec2(tang.y(), -tang.x()));
        }
    }
    return eq;
}

} // namespace wg
