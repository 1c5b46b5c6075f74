#pragma once

// Bilinear and linear forms of the stabilized scheme: mass, viscous,
// convection linearized at a given state, elementwise Smagorinsky
// viscosity nu_T = gamma |T| |grad w|_F, the streamline-derivative jump
// penalty s0, the Nitsche tangential terms bc/s1, the macro divergence
// coupling, and the steady linear model operator.
//
// Assembly order is deterministic (fixed triplet ordering); element loops
// may be chunked over threads without changing the result.

#include <Eigen/Sparse>
#include <functional>
#include <utility>

#include "smagfem/spaces.hpp"

namespace smagfem {

using SparseOperator = Eigen::SparseMatrix<double>;
using ForcingFn = std::function<Vec2(Vec2, double)>;

struct FormParams {
    double mu = 0.0;      // kinematic viscosity
    double gamma = 0.0;   // Smagorinsky constant
    double gamma0 = 0.0;  // jump penalty constant
    double gamma1 = 0.0;  // Nitsche penalty constant
    double U = 1.0;       // characteristic velocity
};

// Number of worker threads used by element-loop assembly (default 1).
void set_assembly_threads(int n);
int assembly_threads();

// (u, v): SPD velocity mass matrix.
SparseOperator assemble_mass(const FESystem& system);

// mu (grad u, grad v).
SparseOperator assemble_viscous(const FESystem& system, double mu);

// ((w . grad) u, v), non-skew, linearized at w.
SparseOperator assemble_convection(const FESystem& system, const Field& w);

// sum_T gamma |T| |grad w|_F (grad u, grad v)_T.
SparseOperator assemble_smagorinsky(const FESystem& system, const Field& w,
                                    double gamma);

// s0: gamma0 h_F^2 (mean_F|w| + U)^{-1} ([[(w.grad)u x n]], [[(w.grad)v x n]])_F.
SparseOperator assemble_jump_penalty(const FESystem& system, const Field& w,
                                     double gamma0, double U);

// (bc_sym, s1) on normal-only boundaries:
//   bc_sym = -(mu grad u n, t v) - (mu grad v n, t u)
//   s1     = gamma1 max(mu/h_F, U) (t u, t v).
std::pair<SparseOperator, SparseOperator> assemble_nitsche(const FESystem& system,
                                                           double mu,
                                                           double gamma1,
                                                           double U);

// B: one row per macro cell, entries (1, div u)_macro.
SparseOperator assemble_divergence(const FESystem& system);

// Load vector; constrained rows carry the lifted boundary data at time t.
Eigen::VectorXd assemble_rhs(const FESystem& system, const ForcingFn& f, double t);

// Steady linear model operator:
//   -(u, beta.grad v) + sigma (u, v)
//   + gamma [ (|T| |grad beta|_F grad u, grad v)
//             + (h^2 mean|beta|^{-1} [[(beta.grad)u x n]], [[...v...]])_F ].
SparseOperator assemble_linear_model(const FESystem& system, const Field& beta,
                                     double sigma, const FormParams& params);

}  // namespace smagfem
