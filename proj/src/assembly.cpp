#include "smagfem/assembly.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "smagfem/quadrature.hpp"

namespace smagfem {

using Triplet = Eigen::Triplet<double>;

static int g_threads = 1;

void set_assembly_threads(int n) { g_threads = n < 1 ? 1 : n; }
int assembly_threads() { return g_threads; }

// Chunked element loop: each worker fills its own triplet buffer and the
// buffers are concatenated in chunk order, so the result does not depend
// on the thread count.
template <class Kernel>
static std::vector<Triplet> assemble_elements(int n, const Kernel& kernel) {
    int nt = std::min(g_threads, std::max(1, n));
    if (nt == 1) {
        std::vector<Triplet> out;
        for (int t = 0; t < n; ++t) kernel(t, out);
        return out;
    }
    std::vector<std::vector<Triplet>> buf(nt);
    std::vector<std::thread> workers;
    int chunk = (n + nt - 1) / nt;
    for (int w = 0; w < nt; ++w) {
        int lo = w * chunk, hi = std::min(n, lo + chunk);
        workers.emplace_back([&, w, lo, hi]() {
            for (int t = lo; t < hi; ++t) kernel(t, buf[w]);
        });
    }
    for (auto& th : workers) th.join();
    std::vector<Triplet> out;
    for (auto& b : buf) out.insert(out.end(), b.begin(), b.end());
    return out;
}

static SparseOperator from_triplets(int rows, int cols, std::vector<Triplet>& tri) {
    SparseOperator op(rows, cols);
    op.setFromTriplets(tri.begin(), tri.end());
    return op;
}

SparseOperator assemble_mass(const FESystem& system) {
    const Mesh& mesh = *system.mesh;
    auto rule = tri_rule_deg2();
    auto tri = assemble_elements(
        (int)mesh.triangles.size(), [&](int t, std::vector<Triplet>& out) {
            TriGeom g = tri_geometry(mesh, t);
            const auto& tv = mesh.triangles[t];
            double m[3][3] = {};
            for (const auto& q : rule) {
                double l[3] = {q.b0, q.b1, q.b2};
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b) m[a][b] += q.w * g.area * l[a] * l[b];
            }
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int c = 0; c < 2; ++c)
                        out.emplace_back(system.dof(tv[a], c), system.dof(tv[b], c),
                                         m[a][b]);
        });
    return from_triplets(system.n_velocity, system.n_velocity, tri);
}

static void stiffness_contribution(const FESystem& system, const Mesh& mesh, int t,
                                   double coeff, std::vector<Triplet>& out) {
    TriGeom g = tri_geometry(mesh, t);
    const auto& tv = mesh.triangles[t];
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double v = coeff * g.area * dot(g.grad[a], g.grad[b]);
            for (int c = 0; c < 2; ++c)
                out.emplace_back(system.dof(tv[a], c), system.dof(tv[b], c), v);
        }
}

SparseOperator assemble_viscous(const FESystem& system, double mu) {
    const Mesh& mesh = *system.mesh;
    auto tri = assemble_elements((int)mesh.triangles.size(),
                                 [&](int t, std::vector<Triplet>& out) {
                                     if (mu != 0.0)
                                         stiffness_contribution(system, mesh, t, mu, out);
                                 });
    return from_triplets(system.n_velocity, system.n_velocity, tri);
}

SparseOperator assemble_convection(const FESystem& system, const Field& w) {
    const Mesh& mesh = *system.mesh;
    auto rule = tri_rule_deg4();
    auto tri = assemble_elements(
        (int)mesh.triangles.size(), [&](int t, std::vector<Triplet>& out) {
            TriGeom g = tri_geometry(mesh, t);
            const auto& tv = mesh.triangles[t];
            Vec2 wv[3];
            for (int k = 0; k < 3; ++k) {
                int d = system.dof(tv[k], 0);
                wv[k] = {w.coeffs[d], w.coeffs[d + 1]};
            }
            double m[3][3] = {};  // (w . grad lambda_b) lambda_a
            for (const auto& q : rule) {
                double l[3] = {q.b0, q.b1, q.b2};
                Vec2 wq = l[0] * wv[0] + l[1] * wv[1] + l[2] * wv[2];
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        m[a][b] += q.w * g.area * dot(wq, g.grad[b]) * l[a];
            }
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int c = 0; c < 2; ++c)
                        out.emplace_back(system.dof(tv[a], c), system.dof(tv[b], c),
                                         m[a][b]);
        });
    return from_triplets(system.n_velocity, system.n_velocity, tri);
}

SparseOperator assemble_smagorinsky(const FESystem& system, const Field& w,
                                    double gamma) {
    const Mesh& mesh = *system.mesh;
    auto tri = assemble_elements(
        (int)mesh.triangles.size(), [&](int t, std::vector<Triplet>& out) {
            if (gamma == 0.0) return;
            double nu_t = gamma * std::fabs(mesh.triangle_area(t)) *
                          frobenius_norm(velocity_gradient(system, w, t));
            if (nu_t == 0.0) return;
            stiffness_contribution(system, mesh, t, nu_t, out);
        });
    return from_triplets(system.n_velocity, system.n_velocity, tri);
}

namespace {

// Local description of one interior (possibly wrap) face: participating
// velocity DOFs with the jump of (grad lambda) across the face, plus the
// P1 vertex values needed to evaluate a field on the face.
struct FaceStencil {
    int dofs[2][6];         // per component
    Vec2 grad_jump[6];      // grad lambda (left) - grad lambda (right), per vertex slot
    int n = 0;
    Vec2 n_unit;
    double h;
    // Field evaluation on the left element.
    int left_tri;
};

FaceStencil face_stencil(const FESystem& system, const Face& f) {
    const Mesh& mesh = *system.mesh;
    FaceStencil s;
    s.n_unit = [&] {
        Vec2 e = mesh.vertices[f.v1] - mesh.vertices[f.v0];
        double len = std::hypot(e.x, e.y);
        return Vec2{e.y / len, -e.x / len};
    }();
    s.h = f.h;
    s.left_tri = f.left;

    TriGeom gl = tri_geometry(mesh, f.left);
    TriGeom gr = tri_geometry(mesh, f.right);
    const auto& tl = mesh.triangles[f.left];
    const auto& tr = mesh.triangles[f.right];

    auto slot = [&](int dof_x) {
        for (int k = 0; k < s.n; ++k)
            if (s.dofs[0][k] == dof_x) return k;
        int k = s.n++;
        s.dofs[0][k] = dof_x;
        s.dofs[1][k] = dof_x + 1;
        s.grad_jump[k] = {0.0, 0.0};
        return k;
    };
    for (int k = 0; k < 3; ++k) {
        int sl = slot(system.dof(tl[k], 0));
        s.grad_jump[sl] = s.grad_jump[sl] + gl.grad[k];
    }
    for (int k = 0; k < 3; ++k) {
        int sl = slot(system.dof(tr[k], 0));
        s.grad_jump[sl] = s.grad_jump[sl] - gr.grad[k];
    }
    return s;
}

// Evaluate a P1 velocity field at a point of the left element of a face.
Vec2 eval_on_left(const FESystem& system, const Field& w, int tri, Vec2 x) {
    return eval_velocity(system, w, tri, x);
}

// Streamline-derivative jump penalty with a per-face weight
// weight(mean_face_speed, h_F); shared by s0 and the linear model face term.
template <class WeightFn>
std::vector<Triplet> face_penalty(const FESystem& system, const Field& advect,
                                  const WeightFn& weight) {
    const Mesh& mesh = *system.mesh;
    auto rule = edge_rule_2();
    std::vector<Triplet> out;
    for (int fi = 0; fi < (int)mesh.faces.size(); ++fi) {
        const Face& f = mesh.faces[fi];
        if (!f.interior()) continue;
        FaceStencil st = face_stencil(system, f);
        Vec2 p0 = mesh.vertices[f.v0], p1 = mesh.vertices[f.v1];

        double mean_speed = 0.0;
        double jump[2][6][2];  // [quad][slot][comp]
        int qi = 0;
        for (const auto& q : rule) {
            Vec2 x = (1.0 - q.s) * p0 + q.s * p1;
            Vec2 wq = eval_on_left(system, advect, f.left, x);
            mean_speed += q.w * std::hypot(wq.x, wq.y);
            for (int k = 0; k < st.n; ++k) {
                double streamline = dot(wq, st.grad_jump[k]);
                // (e_c s) x n in 2D: c=0 -> s n_y, c=1 -> -s n_x
                jump[qi][k][0] = streamline * st.n_unit.y;
                jump[qi][k][1] = -streamline * st.n_unit.x;
            }
            ++qi;
        }
        double coeff = weight(mean_speed, st.h) * st.h;  // trailing h: ds integral
        if (coeff == 0.0) continue;
        qi = 0;
        for (const auto& q : rule) {
            for (int a = 0; a < st.n; ++a)
                for (int b = 0; b < st.n; ++b)
                    for (int ca = 0; ca < 2; ++ca)
                        for (int cb = 0; cb < 2; ++cb) {
                            double v = coeff * q.w * jump[qi][a][ca] * jump[qi][b][cb];
                            if (v != 0.0)
                                out.emplace_back(st.dofs[ca][a], st.dofs[cb][b], v);
                        }
            ++qi;
        }
    }
    return out;
}

}  // namespace

SparseOperator assemble_jump_penalty(const FESystem& system, const Field& w,
                                     double gamma0, double U) {
    if (gamma0 > 0.0 && U <= 0.0)
        throw std::runtime_error("assemble_jump_penalty: U must be positive");
    std::vector<Triplet> tri;
    if (gamma0 > 0.0)
        tri = face_penalty(system, w, [&](double mean_speed, double h) {
            return gamma0 * h * h / (mean_speed + U);
        });
    return from_triplets(system.n_velocity, system.n_velocity, tri);
}

std::pair<SparseOperator, SparseOperator> assemble_nitsche(const FESystem& system,
                                                           double mu, double gamma1,
                                                           double U) {
    const Mesh& mesh = *system.mesh;
    auto rule = edge_rule_2();
    std::vector<Triplet> bc_tri, s1_tri;
    for (const Face& f : mesh.faces) {
        if (!system.is_nitsche_face(f)) continue;
        TriGeom g = tri_geometry(mesh, f.left);
        const auto& tv = mesh.triangles[f.left];
        Vec2 p0 = mesh.vertices[f.v0], p1 = mesh.vertices[f.v1];
        Vec2 e = p1 - p0;
        double len = std::hypot(e.x, e.y);
        Vec2 tau{e.x / len, e.y / len};
        Vec2 n{tau.y, -tau.x};

        // lambda of each left-element vertex along the edge.
        auto lambda_at = [&](int k, double s) {
            Vec2 x = (1.0 - s) * p0 + s * p1;
            return dot(g.grad[k], x - g.p[(k + 1) % 3]);
        };
        double tcomp[2] = {tau.x, tau.y};

        for (const auto& q : rule) {
            double w = q.w * len;
            double lam[3], gn[3];
            for (int k = 0; k < 3; ++k) {
                lam[k] = lambda_at(k, q.s);
                gn[k] = dot(g.grad[k], n);
            }
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int ca = 0; ca < 2; ++ca)
                        for (int cb = 0; cb < 2; ++cb) {
                            int ia = system.dof(tv[a], ca);
                            int ib = system.dof(tv[b], cb);
                            double tt = tcomp[ca] * tcomp[cb];
                            if (mu != 0.0) {
                                double v = -mu * w * tt *
                                           (gn[b] * lam[a] + gn[a] * lam[b]);
                                if (v != 0.0) bc_tri.emplace_back(ia, ib, v);
                            }
                            if (gamma1 != 0.0) {
                                double pen = gamma1 * std::max(mu / f.h, U);
                                double v = pen * w * tt * lam[a] * lam[b];
                                if (v != 0.0) s1_tri.emplace_back(ia, ib, v);
                            }
                        }
        }
    }
    return {from_triplets(system.n_velocity, system.n_velocity, bc_tri),
            from_triplets(system.n_velocity, system.n_velocity, s1_tri)};
}

SparseOperator assemble_divergence(const FESystem& system) {
    const Mesh& mesh = *system.mesh;
    std::vector<Triplet> tri;
    for (int t = 0; t < (int)mesh.triangles.size(); ++t) {
        TriGeom g = tri_geometry(mesh, t);
        const auto& tv = mesh.triangles[t];
        int m = mesh.macro_parent[t];
        for (int k = 0; k < 3; ++k) {
            tri.emplace_back(m, system.dof(tv[k], 0), g.area * g.grad[k].x);
            tri.emplace_back(m, system.dof(tv[k], 1), g.area * g.grad[k].y);
        }
    }
    return from_triplets(system.n_pressure, system.n_velocity, tri);
}

Eigen::VectorXd assemble_rhs(const FESystem& system, const ForcingFn& f, double t) {
    const Mesh& mesh = *system.mesh;
    auto rule = tri_rule_deg4();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(system.n_velocity);
    for (int e = 0; e < (int)mesh.triangles.size(); ++e) {
        TriGeom g = tri_geometry(mesh, e);
        const auto& tv = mesh.triangles[e];
        for (const auto& q : rule) {
            double l[3] = {q.b0, q.b1, q.b2};
            Vec2 x = l[0] * g.p[0] + l[1] * g.p[1] + l[2] * g.p[2];
            Vec2 fx = f(x, t);
            for (int k = 0; k < 3; ++k) {
                rhs[system.dof(tv[k], 0)] += q.w * g.area * fx.x * l[k];
                rhs[system.dof(tv[k], 1)] += q.w * g.area * fx.y * l[k];
            }
        }
    }
    // Constrained rows carry the lifted boundary data.
    for (const StrongConstraint& c : system.constraints) {
        if (!c.value) {
            rhs[c.dof] = 0.0;
            continue;
        }
        Vec2 gval = c.value(mesh.vertices[c.vertex], t);
        rhs[c.dof] = c.comp == 0 ? gval.x : gval.y;
    }
    return rhs;
}

SparseOperator assemble_linear_model(const FESystem& system, const Field& beta,
                                     double sigma, const FormParams& params) {
    if (sigma <= 0.0)
        throw std::runtime_error("assemble_linear_model: sigma must be positive");
    const Mesh& mesh = *system.mesh;
    auto rule = tri_rule_deg4();

    auto tri = assemble_elements(
        (int)mesh.triangles.size(), [&](int t, std::vector<Triplet>& out) {
            TriGeom g = tri_geometry(mesh, t);
            const auto& tv = mesh.triangles[t];
            Vec2 bv[3];
            for (int k = 0; k < 3; ++k) {
                int d = system.dof(tv[k], 0);
                bv[k] = {beta.coeffs[d], beta.coeffs[d + 1]};
            }
            double m[3][3] = {};
            for (const auto& q : rule) {
                double l[3] = {q.b0, q.b1, q.b2};
                Vec2 bq = l[0] * bv[0] + l[1] * bv[1] + l[2] * bv[2];
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        m[a][b] += q.w * g.area *
                                   (-dot(bq, g.grad[a]) * l[b]  // -(u, beta.grad v)
                                    + sigma * l[a] * l[b]);
            }
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int c = 0; c < 2; ++c)
                        out.emplace_back(system.dof(tv[a], c), system.dof(tv[b], c),
                                         m[a][b]);
            // Bulk artificial viscosity |T| |grad beta|_F.
            if (params.gamma != 0.0) {
                double nu_t = params.gamma * std::fabs(g.area) *
                              frobenius_norm(velocity_gradient(system, beta, t));
                if (nu_t != 0.0) stiffness_contribution(system, mesh, t, nu_t, out);
            }
        });

    if (params.gamma != 0.0) {
        auto face_tri = face_penalty(system, beta, [&](double mean_speed, double h) {
            return params.gamma * h * h / std::max(mean_speed, 1e-14);
        });
        tri.insert(tri.end(), face_tri.begin(), face_tri.end());
    }
    return from_triplets(system.n_velocity, system.n_velocity, tri);
}

Field l2_project(const FESystem& system, const std::function<Vec2(Vec2)>& f,
                 double t) {
    SparseOperator mass = assemble_mass(system);
    Eigen::VectorXd rhs =
        assemble_rhs(system, [&](Vec2 x, double) { return f(x); }, 0.0);

    Field u = zero_velocity(system);
    system.apply_constraints(u, t);

    // Reduce to free DOFs.
    std::vector<int> free_index(system.n_velocity, -1);
    int nf = 0;
    for (int d = 0; d < system.n_velocity; ++d)
        if (!system.constrained[d]) free_index[d] = nf++;
    std::vector<Triplet> tri;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(nf);
    for (int d = 0; d < system.n_velocity; ++d)
        if (free_index[d] >= 0) b[free_index[d]] = rhs[d];
    for (int k = 0; k < mass.outerSize(); ++k)
        for (SparseOperator::InnerIterator it(mass, k); it; ++it) {
            int i = (int)it.row(), j = (int)it.col();
            if (free_index[i] < 0) continue;
            if (free_index[j] < 0)
                b[free_index[i]] -= it.value() * u.coeffs[j];
            else
                tri.emplace_back(free_index[i], free_index[j], it.value());
        }
    SparseOperator mff(nf, nf);
    mff.setFromTriplets(tri.begin(), tri.end());
    Eigen::SimplicialLDLT<SparseOperator> solver(mff);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("l2_project: mass factorization failed");
    Eigen::VectorXd uf = solver.solve(b);
    double rel = (mff * uf - b).norm() / (1.0 + b.norm());
    if (rel > 1e-10)
        throw std::runtime_error("l2_project: residual " + std::to_string(rel));
    for (int d = 0; d < system.n_velocity; ++d)
        if (free_index[d] >= 0) u.coeffs[d] = uf[free_index[d]];
    return u;
}

}  // namespace smagfem
