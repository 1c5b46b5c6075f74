#include "smagfem/spaces.hpp"

#include <cmath>
#include <stdexcept>

namespace smagfem {

BcMode FESystem::mode_of(BoundaryTag tag) const {
    auto it = face_modes.find(tag);
    if (it == face_modes.end()) return BcMode::STRONG_DIRICHLET;
    return it->second;
}

void FESystem::apply_constraints(Field& u, double t) const {
    for (const StrongConstraint& c : constraints) {
        if (!c.value) {
            u.coeffs[c.dof] = 0.0;
            continue;
        }
        Vec2 g = c.value(mesh->vertices[c.vertex], t);
        u.coeffs[c.dof] = c.comp == 0 ? g.x : g.y;
    }
}

FESystem build_system(const Mesh& mesh, const std::map<BoundaryTag, BcSpec>& bc) {
    FESystem sys;
    sys.mesh = &mesh;

    int nv = (int)mesh.vertices.size();
    sys.vertex_dof.assign(nv, -1);
    int next = 0;
    for (int v = 0; v < nv; ++v) {
        if (mesh.periodic_master[v] != v) continue;
        sys.vertex_dof[v] = next;
        next += 2;
    }
    sys.n_velocity = next;
    sys.n_pressure = mesh.n_macro;
    sys.constrained.assign(sys.n_velocity, 0);

    for (const auto& [tag, spec] : bc) sys.face_modes[tag] = spec.mode;

    // Per (vertex, comp): 0 = none, 1 = normal-only, 2 = strong. Strong
    // takes priority at corners shared by differently tagged faces.
    std::vector<std::array<int8_t, 2>> kind(nv, {0, 0});
    std::vector<std::array<BcValueFn, 2>> value(nv);

    bool any_neumann = false;
    for (const Face& f : mesh.faces) {
        if (f.interior()) continue;
        auto it = bc.find(f.tag);
        BcMode mode = it == bc.end() ? BcMode::STRONG_DIRICHLET : it->second.mode;
        if (mode == BcMode::NEUMANN) {
            any_neumann = true;
            continue;
        }
        if (mode == BcMode::PERIODIC)
            throw std::runtime_error(
                "build_system: periodic tag on an unpaired boundary face; run "
                "build_periodicity first");
        if (mode == BcMode::STRONG_DIRICHLET) {
            for (int v : {f.v0, f.v1})
                for (int c = 0; c < 2; ++c) {
                    int m = mesh.periodic_master[v];
                    if (kind[m][c] < 2) {
                        kind[m][c] = 2;
                        value[m][c] = it == bc.end() ? BcValueFn() : it->second.value;
                    }
                }
        } else {  // NORMAL_ONLY: constrain the normal component only
            Vec2 e = mesh.vertices[f.v1] - mesh.vertices[f.v0];
            double len = std::hypot(e.x, e.y);
            int comp;
            if (std::fabs(e.x) < 1e-9 * len)
                comp = 0;  // vertical face, normal along x
            else if (std::fabs(e.y) < 1e-9 * len)
                comp = 1;
            else
                throw std::runtime_error(
                    "build_system: normal_only supported on axis-aligned "
                    "boundaries only");
            for (int v : {f.v0, f.v1}) {
                int m = mesh.periodic_master[v];
                if (kind[m][comp] < 1) kind[m][comp] = 1;
            }
        }
    }

    for (int v = 0; v < nv; ++v) {
        if (mesh.periodic_master[v] != v) continue;
        for (int c = 0; c < 2; ++c) {
            if (kind[v][c] == 0) continue;
            int d = sys.vertex_dof[v] + c;
            sys.constrained[d] = 1;
            sys.constraints.push_back(
                {d, v, c, kind[v][c] == 2 ? value[v][c] : BcValueFn()});
        }
    }

    sys.pressure_pinned = !any_neumann;
    return sys;
}

Field interpolate(const FESystem& system, const std::function<Vec2(Vec2)>& f,
                  double t) {
    Field u;
    u.space = FieldSpace::VELOCITY;
    u.coeffs = Eigen::VectorXd::Zero(system.n_velocity);
    const Mesh& mesh = *system.mesh;
    for (int v = 0; v < (int)mesh.vertices.size(); ++v) {
        if (mesh.periodic_master[v] != v) continue;
        Vec2 g = f(mesh.vertices[v]);
        u.coeffs[system.vertex_dof[v]] = g.x;
        u.coeffs[system.vertex_dof[v] + 1] = g.y;
    }
    system.apply_constraints(u, t);
    return u;
}

Field zero_velocity(const FESystem& system) {
    Field u;
    u.space = FieldSpace::VELOCITY;
    u.coeffs = Eigen::VectorXd::Zero(system.n_velocity);
    return u;
}

Field zero_pressure(const FESystem& system) {
    Field p;
    p.space = FieldSpace::PRESSURE;
    p.coeffs = Eigen::VectorXd::Zero(system.n_pressure);
    return p;
}

TriGeom tri_geometry(const Mesh& mesh, int tri) {
    TriGeom g;
    const auto& t = mesh.triangles[tri];
    for (int k = 0; k < 3; ++k) g.p[k] = mesh.vertices[t[k]];
    double twice =
        (g.p[1].x - g.p[0].x) * (g.p[2].y - g.p[0].y) -
        (g.p[1].y - g.p[0].y) * (g.p[2].x - g.p[0].x);
    g.area = 0.5 * twice;
    // grad lambda_k = rot(opposite edge) / (2 area)
    for (int k = 0; k < 3; ++k) {
        Vec2 a = g.p[(k + 1) % 3], b = g.p[(k + 2) % 3];
        g.grad[k] = {(a.y - b.y) / twice, (b.x - a.x) / twice};
    }
    return g;
}

Vec2 eval_velocity(const FESystem& system, const Field& u, int tri, Vec2 x) {
    TriGeom g = tri_geometry(*system.mesh, tri);
    const auto& t = system.mesh->triangles[tri];
    // lambda_k(x) = grad_k . (x - p_j) for any vertex j != k.
    double l[3];
    for (int k = 0; k < 3; ++k) l[k] = dot(g.grad[k], x - g.p[(k + 1) % 3]);
    Vec2 out{0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
        int d = system.dof(t[k], 0);
        out.x += l[k] * u.coeffs[d];
        out.y += l[k] * u.coeffs[d + 1];
    }
    return out;
}

Tensor2 velocity_gradient(const FESystem& system, const Field& u, int tri) {
    TriGeom g = tri_geometry(*system.mesh, tri);
    const auto& t = system.mesh->triangles[tri];
    Tensor2 grad = Tensor2::zero(2);
    for (int k = 0; k < 3; ++k) {
        int d = system.dof(t[k], 0);
        grad(0, 0) += u.coeffs[d] * g.grad[k].x;
        grad(0, 1) += u.coeffs[d] * g.grad[k].y;
        grad(1, 0) += u.coeffs[d + 1] * g.grad[k].x;
        grad(1, 1) += u.coeffs[d + 1] * g.grad[k].y;
    }
    return grad;
}

}  // namespace smagfem
