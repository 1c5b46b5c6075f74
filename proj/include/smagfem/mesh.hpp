#pragma once

// Triangulations with macro structure: criss-cross (Union Jack) quads for
// structured runs, Alfeld (barycentric) splits for unstructured imports.
// A Mesh is immutable after construction and shareable across threads.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace smagfem {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

enum class BoundaryTag : int8_t {
    NONE = -1,
    WALL = 0,
    INFLOW,
    OUTFLOW,
    CYLINDER,
    PERIODIC_X,
    PERIODIC_Y,
};

const char* to_string(BoundaryTag tag);

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

struct Face {
    int v0 = -1, v1 = -1;       // oriented so (v0,v1) is CCW in `left`
    int left = -1, right = -1;  // right == -1 on the boundary
    BoundaryTag tag = BoundaryTag::NONE;
    double h = 0.0;             // face length
    Vec2 shift{};               // right-side offset for periodic wrap faces
    bool wrap = false;

    bool interior() const { return right >= 0; }
};

struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;  // positively oriented
    std::vector<int> macro_parent;              // per triangle
    int n_macro = 0;
    std::vector<Face> faces;
    std::vector<int> periodic_master;  // per vertex; == own index if unpaired

    double total_area() const;
    double triangle_area(int t) const;
    double h_max() const;
    double quasi_uniformity() const;  // max h_T / min h_T
    bool is_periodic_slave(int v) const { return periodic_master[v] != v; }

    // Outward unit normal of `left` on face f.
    Vec2 face_normal(int f) const;
};

// nx x ny macro quads on `domain`, each split by its diagonals with a
// center vertex. Boundary faces are tagged WALL; retag via
// tag_rectangle_boundary for specific cases.
Mesh build_union_jack(int nx, int ny, const Rect& domain);

// Alfeld split: each input triangle becomes a macro of 3 sub-triangles
// sharing its barycenter.
Mesh macro_refine(const Mesh& coarse);

// Criss-cross split of a general (convex, CCW) quad list: each quad gains a
// center vertex at the intersection of its diagonals and becomes a macro of
// 4 triangles. `tags` labels boundary edges by vertex pair; untagged
// boundary edges default to WALL.
Mesh mesh_from_quads(std::vector<Vec2> vertices,
                     const std::vector<std::array<int, 4>>& quads,
                     const std::map<std::pair<int, int>, BoundaryTag>& tags);

// Pair opposite boundary vertices in the given directions and convert the
// matching boundary faces into wrap faces. Throws if a vertex on a paired
// side has no partner within 1e-9 of the domain size.
enum class PeriodicDir : uint8_t { X = 1, Y = 2 };
Mesh build_periodicity(const Mesh& mesh, bool dir_x, bool dir_y);

// Plain-text format: line 1 "V T B"; V lines "x y"; T lines "i j k";
// B lines "i j tag". Throws std::runtime_error with a line number on
// malformed input or inverted triangles.
Mesh import_mesh(const std::string& text);
std::string export_mesh(const Mesh& mesh);

// Retag boundary faces of an axis-aligned rectangular mesh by side.
void tag_rectangle_boundary(Mesh& mesh, const Rect& domain, BoundaryTag left,
                            BoundaryTag right, BoundaryTag bottom,
                            BoundaryTag top);

}  // namespace smagfem
