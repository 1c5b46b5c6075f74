#pragma once

// Minimal compatible element: continuous piecewise-affine vector velocity
// on the refined mesh paired with one pressure constant per macro cell.
// Periodic slave vertices share their master's DOFs; Dirichlet values are
// imposed strongly, normal-only boundaries constrain u.n and leave the
// tangential part to the Nitsche terms.

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <vector>

#include "smagfem/math_core.hpp"
#include "smagfem/mesh.hpp"

namespace smagfem {

enum class BcMode { STRONG_DIRICHLET, NORMAL_ONLY, NEUMANN, PERIODIC };

using BcValueFn = std::function<Vec2(Vec2, double)>;

struct BcSpec {
    BcMode mode = BcMode::STRONG_DIRICHLET;
    BcValueFn value;  // strong Dirichlet data; unused for other modes
};

enum class FieldSpace { VELOCITY, PRESSURE, ELEMENT_SCALAR };

struct Field {
    FieldSpace space = FieldSpace::VELOCITY;
    Eigen::VectorXd coeffs;
};

struct StrongConstraint {
    int dof;
    int vertex;
    int comp;
    BcValueFn value;  // null means homogeneous
};

struct FESystem {
    const Mesh* mesh = nullptr;
    std::vector<int> vertex_dof;  // x-component DOF of the vertex's master
    int n_velocity = 0;
    int n_pressure = 0;
    bool pressure_pinned = false;
    std::vector<char> constrained;  // per velocity DOF
    std::vector<StrongConstraint> constraints;
    std::map<BoundaryTag, BcMode> face_modes;

    int dof(int vertex, int comp) const {
        return vertex_dof[(*mesh).periodic_master[vertex]] + comp;
    }
    BcMode mode_of(BoundaryTag tag) const;
    bool is_nitsche_face(const Face& f) const {
        return !f.interior() && mode_of(f.tag) == BcMode::NORMAL_ONLY;
    }

    // Set constrained coefficients from the boundary data at time t and
    // mirror nothing else (slaves have no own storage).
    void apply_constraints(Field& u, double t) const;
};

FESystem build_system(const Mesh& mesh, const std::map<BoundaryTag, BcSpec>& bc);

// Vertex-value interpolant; constraints applied afterwards.
Field interpolate(const FESystem& system,
                  const std::function<Vec2(Vec2)>& f, double t = 0.0);

// L2-orthogonal projection onto the constrained velocity space (mass solve
// on free DOFs, boundary values interpolated). Defined in assembly.cpp.
Field l2_project(const FESystem& system, const std::function<Vec2(Vec2)>& f,
                 double t = 0.0);

Field zero_velocity(const FESystem& system);
Field zero_pressure(const FESystem& system);

// P1 evaluation helpers.
Vec2 eval_velocity(const FESystem& system, const Field& u, int tri, Vec2 x);
Tensor2 velocity_gradient(const FESystem& system, const Field& u, int tri);

// Barycentric gradients and area of a triangle (shared by assembly and
// diagnostics).
struct TriGeom {
    Vec2 p[3];
    double area;
    Vec2 grad[3];  // gradient of each barycentric coordinate
};
TriGeom tri_geometry(const Mesh& mesh, int tri);

}  // namespace smagfem
