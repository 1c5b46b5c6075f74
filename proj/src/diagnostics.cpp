#include "smagfem/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "smagfem/quadrature.hpp"

namespace smagfem {

double kinetic_energy(const FESystem& system, const Field& u) {
    return kinetic_energy(system, assemble_mass(system), u);
}

double kinetic_energy(const FESystem& system, const SparseOperator& mass,
                      const Field& u) {
    (void)system;
    return 0.5 * u.coeffs.dot(mass * u.coeffs);
}

Field vorticity(const FESystem& system, const Field& u) {
    const Mesh& mesh = *system.mesh;
    Field w;
    w.space = FieldSpace::ELEMENT_SCALAR;
    w.coeffs = Eigen::VectorXd::Zero((int)mesh.triangles.size());
    for (int t = 0; t < (int)mesh.triangles.size(); ++t) {
        Tensor2 g = velocity_gradient(system, u, t);
        w.coeffs[t] = g(1, 0) - g(0, 1);
    }
    return w;
}

std::pair<double, double> divergence_norms(const FESystem& system, const Field& u) {
    return divergence_norms(system, assemble_divergence(system), u);
}

std::pair<double, double> divergence_norms(const FESystem& system,
                                           const SparseOperator& div_op,
                                           const Field& u) {
    double weak = (div_op * u.coeffs).norm();
    const Mesh& mesh = *system.mesh;
    double pw = 0.0;
    for (int t = 0; t < (int)mesh.triangles.size(); ++t) {
        Tensor2 g = velocity_gradient(system, u, t);
        double d = g(0, 0) + g(1, 1);
        pw += mesh.triangle_area(t) * d * d;
    }
    return {weak, std::sqrt(pw)};
}

double stab_seminorm(const FESystem& system, const Field& u, const Field& w,
                     const FormParams& params) {
    double energy = 0.0;
    if (params.gamma != 0.0) {
        SparseOperator s = assemble_smagorinsky(system, w, params.gamma);
        energy += u.coeffs.dot(s * u.coeffs);
    }
    if (params.gamma0 != 0.0) {
        SparseOperator s = assemble_jump_penalty(system, w, params.gamma0, params.U);
        energy += u.coeffs.dot(s * u.coeffs);
    }
    if (params.gamma1 != 0.0) {
        auto [bc, s1] = assemble_nitsche(system, params.mu, params.gamma1, params.U);
        energy += u.coeffs.dot(s1 * u.coeffs);
    }
    return std::sqrt(std::max(0.0, energy));
}

double grad_l2_norm(const FESystem& system, const Field& u) {
    const Mesh& mesh = *system.mesh;
    double s = 0.0;
    for (int t = 0; t < (int)mesh.triangles.size(); ++t) {
        Tensor2 g = velocity_gradient(system, u, t);
        s += mesh.triangle_area(t) * frobenius_dot(g, g);
    }
    return std::sqrt(s);
}

std::pair<double, double> error_norms(const FESystem& system, const Field& u_h,
                                      const ExactVelocity& exact,
                                      const ExactGradient& exact_grad, double t) {
    const Mesh& mesh = *system.mesh;
    auto rule = tri_rule_deg4();
    double l2 = 0.0, h1 = 0.0;
    for (int e = 0; e < (int)mesh.triangles.size(); ++e) {
        TriGeom g = tri_geometry(mesh, e);
        const auto& tv = mesh.triangles[e];
        Vec2 uv[3];
        for (int k = 0; k < 3; ++k) {
            int d = system.dof(tv[k], 0);
            uv[k] = {u_h.coeffs[d], u_h.coeffs[d + 1]};
        }
        Tensor2 gh = velocity_gradient(system, u_h, e);
        for (const auto& q : rule) {
            double l[3] = {q.b0, q.b1, q.b2};
            Vec2 x = l[0] * g.p[0] + l[1] * g.p[1] + l[2] * g.p[2];
            Vec2 uh = l[0] * uv[0] + l[1] * uv[1] + l[2] * uv[2];
            Vec2 diff = uh - exact(x, t);
            l2 += q.w * g.area * dot(diff, diff);
            if (exact_grad) {
                Tensor2 gd = gh - exact_grad(x, t);
                h1 += q.w * g.area * frobenius_dot(gd, gd);
            }
        }
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

double convergence_slope(const std::vector<double>& hs,
                         const std::vector<double>& errors) {
    if (hs.size() != errors.size() || hs.size() < 2)
        throw std::runtime_error("convergence_slope: need >= 2 levels");
    for (size_t i = 0; i < hs.size(); ++i) {
        if (hs[i] <= 0.0 || errors[i] <= 0.0)
            throw std::runtime_error("convergence_slope: nonpositive entry");
        if (i > 0 && hs[i] >= hs[i - 1])
            throw std::runtime_error("convergence_slope: hs must decrease");
    }
    int n = (int)hs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        double x = std::log(hs[i]), y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace smagfem
