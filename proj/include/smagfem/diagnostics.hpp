#pragma once

// Monitored quantities: kinetic energy, elementwise vorticity, divergence
// residuals, the stabilization seminorm and error norms / convergence
// slopes for the verification studies.

#include <functional>
#include <vector>

#include "smagfem/assembly.hpp"

namespace smagfem {

enum class RunFlag : int8_t { OK = 0, INSTABILITY = 1 };

struct ReportRow {
    double t = 0.0;
    double energy = 0.0;
    double max_vorticity = 0.0;
    double div_weak = 0.0;
    double div_pointwise = 0.0;
    double stab_seminorm = 0.0;
    RunFlag flag = RunFlag::OK;
};

struct RunReport {
    std::vector<ReportRow> rows;
    bool instability = false;
    double instability_time = 0.0;
    double stab_energy_integral = 0.0;  // int_I s(u,u) dt
    double wall_time_s = 0.0;
};

// 1/2 u^T M u.
double kinetic_energy(const FESystem& system, const Field& u);
double kinetic_energy(const FESystem& system, const SparseOperator& mass,
                      const Field& u);

// Elementwise-constant curl: d(u_y)/dx - d(u_x)/dy.
Field vorticity(const FESystem& system, const Field& u);

// (weak, pointwise): ||B u|| over macro cells and the L2 norm of the
// elementwise-constant divergence.
std::pair<double, double> divergence_norms(const FESystem& system, const Field& u);
std::pair<double, double> divergence_norms(const FESystem& system,
                                           const SparseOperator& div_op,
                                           const Field& u);

// sqrt(u^T (S_smag(w) + S0(w) + S1) u).
double stab_seminorm(const FESystem& system, const Field& u, const Field& w,
                     const FormParams& params);

// H1 seminorm of a discrete velocity field.
double grad_l2_norm(const FESystem& system, const Field& u);

// Degree-4 quadrature (L2, H1-seminorm) errors against an exact field.
using ExactVelocity = std::function<Vec2(Vec2, double)>;
using ExactGradient = std::function<Tensor2(Vec2, double)>;
std::pair<double, double> error_norms(const FESystem& system, const Field& u_h,
                                      const ExactVelocity& exact,
                                      const ExactGradient& exact_grad, double t);

// Least-squares slope of log(error) vs log(h).
double convergence_slope(const std::vector<double>& hs,
                         const std::vector<double>& errors);

}  // namespace smagfem
