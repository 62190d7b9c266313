// mesh_io.cpp -- the WGMESH 1 text format.  Decimal fields are written with 17
// significant digits so that save -> load -> save round-trips byte-identically.
#include "wg/mesh.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wg {

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* tag_name(EdgeTag t)
{
    switch (t) {
    case EdgeTag::interior: return "interior";
    case EdgeTag::boundary: return "boundary";
    case EdgeTag::interface: return "interface";
    }
    return "?";
}

EdgeTag tag_from(const std::string& s)
{
    if (s == "interior") return EdgeTag::interior;
    if (s == "boundary") return EdgeTag::boundary;
    if (s == "interface") return EdgeTag::interface;
    throw std::runtime_error("WGMESH: unknown edge tag '" + s + "'");
}

} // namespace

std::string mesh_to_string(const InterfaceMesh& mesh)
{
    std::ostringstream os;
    os << "WGMESH 1\n";
    os << "vertices " << mesh.vertices.size() << "\n";
    for (size_t i = 0; i < mesh.vertices.size(); ++i)
        os << i << " " << fmt(mesh.vertices[i].x()) << " " << fmt(mesh.vertices[i].y())
           << "\n";
    os << "edges " << mesh.edges.size() << "\n";
    for (const Edge& e : mesh.edges) {
        os << e.id << " " << e.v0 << " " << e.v1 << " " << tag_name(e.tag);
        if (e.curved) os << " 0 " << fmt(e.arc.t0) << " " << fmt(e.arc.t1);
        os << "\n";
    }
    os << "cells " << mesh.cells.size() << "\n";
    for (const Cell& c : mesh.cells) {
        os << c.id << " " << int(c.subdomain) << " " << c.edges.size();
        for (int e : c.edges) os << " " << e;
        os << "\n";
    }
    size_t ncurves = mesh.curve ? 1 : 0;
    os << "curves " << ncurves << "\n";
    if (mesh.curve) {
        os << 0 << " " << mesh.curve->kind();
        auto p = mesh.curve->params();
        os << " " << p.size();
        for (double v : p) os << " " << fmt(v);
        os << "\n";
    }
    return os.str();
}

void save_mesh(const InterfaceMesh& mesh, const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << mesh_to_string(mesh);
}

InterfaceMesh load_mesh(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);

    std::string word;
    int version = 0;
    f >> word >> version;
    if (word != "WGMESH" || version != 1)
        throw std::runtime_error("not a WGMESH 1 file: " + path);

    InterfaceMesh mesh;
    size_t n = 0;

    f >> word >> n;
    if (word != "vertices") throw std::runtime_error("WGMESH: expected vertex table");
    mesh.vertices.resize(n);
    for (size_t i = 0; i < n; ++i) {
        size_t id;
        double x, y;
        f >> id >> x >> y;
        mesh.vertices.at(id) = Vec2(x, y);
    }

    f >> word >> n;
    if (word != "edges") throw std::runtime_error("WGMESH: expected edge table");
    mesh.edges.resize(n);
    f >> std::ws;
    for (size_t i = 0; i < n; ++i) {
        std::string line;
        std::getline(f, line);
        std::istringstream ls(line);
        Edge e;
        std::string tag;
        ls >> e.id >> e.v0 >> e.v1 >> tag;
        e.tag = tag_from(tag);
        int curve_id;
        if (ls >> curve_id >> e.arc.t0 >> e.arc.t1) e.curved = true;
        mesh.edges.at(e.id) = e;
    }

    f >> word >> n;
    if (word != "cells") throw std::runtime_error("WGMESH: expected cell table");
    mesh.cells.resize(n);
    for (size_t i = 0; i < n; ++i) {
        Cell c;
        int sub, ne;
        f >> c.id >> sub >> ne;
        c.subdomain = (sub == 1) ? Subdomain::omega1 : Subdomain::omega2;
        c.edges.resize(ne);
        for (int& e : c.edges) f >> e;
        mesh.cells.at(c.id) = c;
    }

    f >> word >> n;
    if (word != "curves") throw std::runtime_error("WGMESH: expected curve table");
    for (size_t i = 0; i < n; ++i) {
        int id, np;
        std::string kind;
        f >> id >> kind >> np;
        std::vector<double> params(np);
        for (double& v : params) f >> v;
        mesh.curve = make_curve(kind, params);
    }

    // reconstruct vertex cycles, owners and metrics
    for (Cell& c : mesh.cells) {
        const int ne = int(c.edges.size());
        if (ne < 2) throw std::runtime_error("WGMESH: cell with fewer than two edges");
        c.vertices.resize(ne);
        if (ne == 2) {
            c.vertices = {mesh.edges[c.edges[0]].v0, mesh.edges[c.edges[0]].v1};
        } else {
            for (int j = 0; j < ne; ++j) {
                const Edge& a = mesh.edges[c.edges[j]];
                const Edge& b = mesh.edges[c.edges[(j + 1) % ne]];
                int shared = (a.v0 == b.v0 || a.v0 == b.v1) ? a.v0 : a.v1;
                if (shared != b.v0 && shared != b.v1)
                    throw std::runtime_error("WGMESH: broken cell cycle");
                c.vertices[(j + 1) % ne] = shared;
            }
        }
        for (int e : c.edges) c.curved |= mesh.edges[e].curved;
        if (cell_signed_area(mesh, c) < 0.0) {
            std::vector<int> rv{c.vertices[0]}, re;
            for (int j = ne - 1; j >= 1; --j) rv.push_back(c.vertices[j]);
            for (int j = ne - 1; j >= 0; --j) re.push_back(c.edges[j]);
            c.vertices = rv;
            c.edges = re;
        }
    }
    for (Cell& c : mesh.cells)
        for (int eid : c.edges) {
            Edge& e = mesh.edges[eid];
            if (e.owner[0] == -1)
                e.owner[0] = c.id;
            else if (e.owner[1] == -1)
                e.owner[1] = c.id;
            else
                throw std::runtime_error("WGMESH: edge with more than two owners");
        }
    for (Edge& e : mesh.edges) {
        if (e.tag == EdgeTag::interface && e.owner[1] != -1 &&
            mesh.cells[e.owner[0]].subdomain != Subdomain::omega1)
            std::swap(e.owner[0], e.owner[1]);
        e.length = e.curved ? arc_length(*mesh.curve, e.arc.t0, e.arc.t1)
                            : (mesh.vertices[e.v1] - mesh.vertices[e.v0]).norm();
        mesh.fitted |= (e.tag == EdgeTag::interface);
    }
    for (Cell& c : mesh.cells) {
        std::vector<Vec2> pts;
        for (int v : c.vertices) pts.push_back(mesh.vertices[v]);
        Vec2 avg = Vec2::Zero();
        for (const Vec2& p : pts) avg += p;
        avg /= double(pts.size());
        double diam = 0.0;
        for (int eid : c.edges) {
            const Edge& e = mesh.edges[eid];
            if (!e.curved) continue;
            for (int s = 1; s < 8; ++s)
                pts.push_back(mesh.curve->at(e.arc.t0 + (e.arc.t1 - e.arc.t0) * s / 8.0));
            if (c.vertices.size() == 2)
                avg = 0.5 * (avg + mesh.curve->at(0.5 * (e.arc.t0 + e.arc.t1)));
        }
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j)
                diam = std::max(diam, (pts[i] - pts[j]).norm());
        c.center = avg;
        c.diameter = diam;
        c.area = cell_signed_area(mesh, c);
    }
    // domain from the vertex bounding box
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const Vec2& v : mesh.vertices) {
        x0 = std::min(x0, v.x());
        y0 = std::min(y0, v.y());
        x1 = std::max(x1, v.x());
        y1 = std::max(y1, v.y());
    }
    mesh.domain = {x0, y0, x1, y1};
    return mesh;
}

} // namespace wg
