#include "smagfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace smagfem {

const char* to_string(BoundaryTag tag) {
    switch (tag) {
        case BoundaryTag::WALL: return "wall";
        case BoundaryTag::INFLOW: return "inflow";
        case BoundaryTag::OUTFLOW: return "outflow";
        case BoundaryTag::CYLINDER: return "cylinder";
        case BoundaryTag::PERIODIC_X: return "periodic_x";
        case BoundaryTag::PERIODIC_Y: return "periodic_y";
        default: return "none";
    }
}

static BoundaryTag tag_from_string(const std::string& s) {
    if (s == "wall") return BoundaryTag::WALL;
    if (s == "inflow") return BoundaryTag::INFLOW;
    if (s == "outflow") return BoundaryTag::OUTFLOW;
    if (s == "cylinder") return BoundaryTag::CYLINDER;
    if (s == "periodic_x") return BoundaryTag::PERIODIC_X;
    if (s == "periodic_y") return BoundaryTag::PERIODIC_Y;
    throw std::runtime_error("unknown boundary tag '" + s + "'");
}

static double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

double Mesh::triangle_area(int t) const {
    const auto& tri = triangles[t];
    return signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

double Mesh::total_area() const {
    double a = 0.0;
    for (int t = 0; t < (int)triangles.size(); ++t) a += triangle_area(t);
    return a;
}

static double edge_len(const Vec2& a, const Vec2& b) {
    return std::hypot(b.x - a.x, b.y - a.y);
}

static double tri_diameter(const Mesh& m, int t) {
    const auto& tri = m.triangles[t];
    return std::max({edge_len(m.vertices[tri[0]], m.vertices[tri[1]]),
                     edge_len(m.vertices[tri[1]], m.vertices[tri[2]]),
                     edge_len(m.vertices[tri[2]], m.vertices[tri[0]])});
}

double Mesh::h_max() const {
    double h = 0.0;
    for (int t = 0; t < (int)triangles.size(); ++t)
        h = std::max(h, tri_diameter(*this, t));
    return h;
}

double Mesh::quasi_uniformity() const {
    double hmax = 0.0, hmin = 1e300;
    for (int t = 0; t < (int)triangles.size(); ++t) {
        double h = tri_diameter(*this, t);
        hmax = std::max(hmax, h);
        hmin = std::min(hmin, h);
    }
    return hmax / hmin;
}

Vec2 Mesh::face_normal(int f) const {
    const Face& fc = faces[f];
    Vec2 e = vertices[fc.v1] - vertices[fc.v0];
    double len = std::hypot(e.x, e.y);
    return {e.y / len, -e.x / len};
}

// Rebuild the face list from triangle connectivity. Existing boundary tags
// (keyed by vertex pair) are preserved when `old_tags` is supplied.
static void build_faces(Mesh& mesh,
                        const std::map<std::pair<int, int>, BoundaryTag>* old_tags) {
    mesh.faces.clear();
    std::map<std::pair<int, int>, int> edge_to_face;
    for (int t = 0; t < (int)mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) {
            int a = tri[e], b = tri[(e + 1) % 3];
            auto key = std::minmax(a, b);
            auto it = edge_to_face.find(key);
            if (it == edge_to_face.end()) {
                Face f;
                f.v0 = a;
                f.v1 = b;
                f.left = t;
                f.h = edge_len(mesh.vertices[a], mesh.vertices[b]);
                edge_to_face[key] = (int)mesh.faces.size();
                mesh.faces.push_back(f);
            } else {
                Face& f = mesh.faces[it->second];
                if (f.right >= 0)
                    throw std::runtime_error("edge shared by more than 2 triangles");
                f.right = t;
            }
        }
    }
    for (Face& f : mesh.faces) {
        if (f.interior()) continue;
        if (old_tags) {
            auto it = old_tags->find(std::minmax(f.v0, f.v1));
            if (it != old_tags->end()) f.tag = it->second;
        }
        if (f.tag == BoundaryTag::NONE) f.tag = BoundaryTag::WALL;
    }
}

Mesh build_union_jack(int nx, int ny, const Rect& domain) {
    if (nx < 1 || ny < 1) throw std::runtime_error("build_union_jack: nx, ny must be >= 1");
    if (domain.width() <= 0.0 || domain.height() <= 0.0)
        throw std::runtime_error("build_union_jack: degenerate domain");

    Mesh mesh;
    double dx = domain.width() / nx, dy = domain.height() / ny;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            mesh.vertices.push_back({domain.x0 + i * dx, domain.y0 + j * dy});
    int ncorner = (nx + 1) * (ny + 1);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            mesh.vertices.push_back(
                {domain.x0 + (i + 0.5) * dx, domain.y0 + (j + 0.5) * dy});

    auto corner = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            int q = j * nx + i;
            int c = ncorner + q;
            int v00 = corner(i, j), v10 = corner(i + 1, j);
            int v11 = corner(i + 1, j + 1), v01 = corner(i, j + 1);
            mesh.triangles.push_back({v00, v10, c});
            mesh.triangles.push_back({v10, v11, c});
            mesh.triangles.push_back({v11, v01, c});
            mesh.triangles.push_back({v01, v00, c});
            for (int k = 0; k < 4; ++k) mesh.macro_parent.push_back(q);
        }
    mesh.n_macro = nx * ny;
    mesh.periodic_master.resize(mesh.vertices.size());
    for (int v = 0; v < (int)mesh.vertices.size(); ++v) mesh.periodic_master[v] = v;
    build_faces(mesh, nullptr);
    return mesh;
}

Mesh macro_refine(const Mesh& coarse) {
    Mesh mesh;
    mesh.vertices = coarse.vertices;
    std::map<std::pair<int, int>, BoundaryTag> old_tags;
    for (const Face& f : coarse.faces)
        if (!f.interior()) old_tags[std::minmax(f.v0, f.v1)] = f.tag;

    for (int t = 0; t < (int)coarse.triangles.size(); ++t) {
        const auto& tri = coarse.triangles[t];
        if (coarse.triangle_area(t) <= 0.0)
            throw std::runtime_error("macro_refine: non-positive triangle " +
                                     std::to_string(t));
        Vec2 g = (1.0 / 3.0) * (coarse.vertices[tri[0]] + coarse.vertices[tri[1]] +
                                coarse.vertices[tri[2]]);
        int gi = (int)mesh.vertices.size();
        mesh.vertices.push_back(g);
        mesh.triangles.push_back({tri[0], tri[1], gi});
        mesh.triangles.push_back({tri[1], tri[2], gi});
        mesh.triangles.push_back({tri[2], tri[0], gi});
        for (int k = 0; k < 3; ++k) mesh.macro_parent.push_back(t);
    }
    mesh.n_macro = (int)coarse.triangles.size();
    mesh.periodic_master.resize(mesh.vertices.size());
    for (int v = 0; v < (int)mesh.vertices.size(); ++v) mesh.periodic_master[v] = v;
    build_faces(mesh, &old_tags);
    return mesh;
}

Mesh mesh_from_quads(std::vector<Vec2> vertices,
                     const std::vector<std::array<int, 4>>& quads,
                     const std::map<std::pair<int, int>, BoundaryTag>& tags) {
    Mesh mesh;
    mesh.vertices = std::move(vertices);
    for (int q = 0; q < (int)quads.size(); ++q) {
        const auto& qd = quads[q];
        Vec2 a = mesh.vertices[qd[0]], b = mesh.vertices[qd[1]];
        Vec2 c = mesh.vertices[qd[2]], d = mesh.vertices[qd[3]];
        // Intersection of the diagonals a-c and b-d.
        Vec2 ac = c - a, bd = d - b, ab = b - a;
        double det = ac.x * bd.y - ac.y * bd.x;
        if (std::fabs(det) < 1e-300)
            throw std::runtime_error("mesh_from_quads: degenerate quad " + std::to_string(q));
        double s = (ab.x * bd.y - ab.y * bd.x) / det;
        int center = (int)mesh.vertices.size();
        mesh.vertices.push_back(a + s * ac);
        for (int e = 0; e < 4; ++e) {
            int v0 = qd[e], v1 = qd[(e + 1) % 4];
            if (signed_area(mesh.vertices[v0], mesh.vertices[v1],
                            mesh.vertices[center]) <= 0.0)
                throw std::runtime_error("mesh_from_quads: non-convex or misoriented quad " +
                                         std::to_string(q));
            mesh.triangles.push_back({v0, v1, center});
            mesh.macro_parent.push_back(q);
        }
    }
    mesh.n_macro = (int)quads.size();
    mesh.periodic_master.resize(mesh.vertices.size());
    for (int v = 0; v < (int)mesh.vertices.size(); ++v) mesh.periodic_master[v] = v;
    build_faces(mesh, &tags);
    return mesh;
}

Mesh build_periodicity(const Mesh& input, bool dir_x, bool dir_y) {
    Mesh mesh = input;
    if (!dir_x && !dir_y) return mesh;

    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const Vec2& p : mesh.vertices) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    double tol = 1e-9 * std::max(x1 - x0, y1 - y0);

    auto pair_direction = [&](bool along_x) {
        double lo = along_x ? x0 : y0, hi = along_x ? x1 : y1;
        auto coord = [&](int v) { return along_x ? mesh.vertices[v].x : mesh.vertices[v].y; };
        auto other = [&](int v) { return along_x ? mesh.vertices[v].y : mesh.vertices[v].x; };
        std::vector<int> masters, slaves;
        for (int v = 0; v < (int)mesh.vertices.size(); ++v) {
            if (std::fabs(coord(v) - lo) < tol) masters.push_back(v);
            if (std::fabs(coord(v) - hi) < tol) slaves.push_back(v);
        }
        for (int s : slaves) {
            int found = -1;
            for (int m : masters)
                if (std::fabs(other(s) - other(m)) < tol) {
                    found = m;
                    break;
                }
            if (found < 0) {
                std::ostringstream oss;
                oss << "build_periodicity: unmatched boundary vertex at ("
                    << mesh.vertices[s].x << ", " << mesh.vertices[s].y << ")";
                throw std::runtime_error(oss.str());
            }
            mesh.periodic_master[s] = found;
        }

        // Merge the matching boundary face pairs into wrap faces.
        Vec2 period = along_x ? Vec2{x1 - x0, 0.0} : Vec2{0.0, y1 - y0};
        std::vector<Face> merged;
        std::vector<int> slave_faces, master_faces;
        for (int f = 0; f < (int)mesh.faces.size(); ++f) {
            const Face& fc = mesh.faces[f];
            if (fc.interior()) continue;
            bool on_hi = std::fabs(coord(fc.v0) - hi) < tol && std::fabs(coord(fc.v1) - hi) < tol;
            bool on_lo = std::fabs(coord(fc.v0) - lo) < tol && std::fabs(coord(fc.v1) - lo) < tol;
            if (on_hi) slave_faces.push_back(f);
            if (on_lo) master_faces.push_back(f);
        }
        std::vector<bool> drop(mesh.faces.size(), false);
        for (int sf : slave_faces) {
            const Face& s = mesh.faces[sf];
            Vec2 smid = 0.5 * (mesh.vertices[s.v0] + mesh.vertices[s.v1]) - period;
            int match = -1;
            for (int mf : master_faces) {
                const Face& m = mesh.faces[mf];
                Vec2 mmid = 0.5 * (mesh.vertices[m.v0] + mesh.vertices[m.v1]);
                if (std::fabs(mmid.x - smid.x) < tol && std::fabs(mmid.y - smid.y) < tol) {
                    match = mf;
                    break;
                }
            }
            if (match < 0)
                throw std::runtime_error("build_periodicity: unmatched boundary face");
            const Face& m = mesh.faces[match];
            Face w = m;
            w.right = s.left;
            w.shift = period;  // left-side point + shift = right-side point
            w.wrap = true;
            w.tag = along_x ? BoundaryTag::PERIODIC_X : BoundaryTag::PERIODIC_Y;
            merged.push_back(w);
            drop[sf] = drop[match] = true;
        }
        std::vector<Face> kept;
        for (int f = 0; f < (int)mesh.faces.size(); ++f)
            if (!drop[f]) kept.push_back(mesh.faces[f]);
        kept.insert(kept.end(), merged.begin(), merged.end());
        mesh.faces = std::move(kept);
    };

    if (dir_x) pair_direction(true);
    if (dir_y) pair_direction(false);

    // Compress corner chains so every slave points at its final master,
    // which is the lexicographically smallest corner.
    for (int v = 0; v < (int)mesh.periodic_master.size(); ++v) {
        int m = mesh.periodic_master[v];
        while (mesh.periodic_master[m] != m) m = mesh.periodic_master[m];
        mesh.periodic_master[v] = m;
    }
    return mesh;
}

Mesh import_mesh(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> std::istringstream {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos)
                return std::istringstream(line);
        }
        throw std::runtime_error("mesh parse error: unexpected end of input at line " +
                                 std::to_string(lineno));
    };
    auto fail = [&](const std::string& what) {
        throw std::runtime_error("mesh parse error at line " + std::to_string(lineno) +
                                 ": " + what);
    };

    int nv = 0, nt = 0, nb = 0;
    {
        auto ls = next_line();
        if (!(ls >> nv >> nt >> nb) || nv < 3 || nt < 1 || nb < 0)
            fail("expected header 'V T B'");
    }
    Mesh mesh;
    mesh.vertices.resize(nv);
    for (int v = 0; v < nv; ++v) {
        auto ls = next_line();
        if (!(ls >> mesh.vertices[v].x >> mesh.vertices[v].y)) fail("expected 'x y'");
    }
    mesh.triangles.resize(nt);
    for (int t = 0; t < nt; ++t) {
        auto ls = next_line();
        auto& tri = mesh.triangles[t];
        if (!(ls >> tri[0] >> tri[1] >> tri[2])) fail("expected 'i j k'");
        for (int k = 0; k < 3; ++k)
            if (tri[k] < 0 || tri[k] >= nv) fail("vertex index out of range");
        if (signed_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                        mesh.vertices[tri[2]]) <= 0.0)
            fail("inverted or degenerate triangle " + std::to_string(t));
        mesh.macro_parent.push_back(t);
    }
    mesh.n_macro = nt;

    std::map<std::pair<int, int>, BoundaryTag> tags;
    for (int b = 0; b < nb; ++b) {
        auto ls = next_line();
        int i, j;
        std::string tag;
        if (!(ls >> i >> j >> tag)) fail("expected 'i j tag'");
        if (i < 0 || i >= nv || j < 0 || j >= nv) fail("boundary vertex index out of range");
        tags[std::minmax(i, j)] = tag_from_string(tag);
    }
    mesh.periodic_master.resize(mesh.vertices.size());
    for (int v = 0; v < (int)mesh.vertices.size(); ++v) mesh.periodic_master[v] = v;
    build_faces(mesh, &tags);
    return mesh;
}

std::string export_mesh(const Mesh& mesh) {
    std::ostringstream out;
    out.precision(17);
    int nb = 0;
    for (const Face& f : mesh.faces)
        if (!f.interior()) ++nb;
    out << mesh.vertices.size() << " " << mesh.triangles.size() << " " << nb << "\n";
    for (const Vec2& p : mesh.vertices) out << p.x << " " << p.y << "\n";
    for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
    for (const Face& f : mesh.faces)
        if (!f.interior()) out << f.v0 << " " << f.v1 << " " << to_string(f.tag) << "\n";
    return out.str();
}

void tag_rectangle_boundary(Mesh& mesh, const Rect& domain, BoundaryTag left,
                            BoundaryTag right, BoundaryTag bottom, BoundaryTag top) {
    double tol = 1e-9 * std::max(domain.width(), domain.height());
    for (Face& f : mesh.faces) {
        if (f.interior()) continue;
        const Vec2& a = mesh.vertices[f.v0];
        const Vec2& b = mesh.vertices[f.v1];
        if (std::fabs(a.x - domain.x0) < tol && std::fabs(b.x - domain.x0) < tol)
            f.tag = left;
        else if (std::fabs(a.x - domain.x1) < tol && std::fabs(b.x - domain.x1) < tol)
            f.tag = right;
        else if (std::fabs(a.y - domain.y0) < tol && std::fabs(b.y - domain.y0) < tol)
            f.tag = bottom;
        else if (std::fabs(a.y - domain.y1) < tol && std::fabs(b.y - domain.y1) < tol)
            f.tag = top;
    }
}

}  // namespace smagfem
