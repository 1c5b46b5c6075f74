#pragma once

// Time integration of the linearized scheme: BDF1 startup, BDF2 stepping,
// one saddle-point solve per step via a sparse direct factorization, plus
// the steady solves (Stokes initial state, linear transport model).

#include <functional>
#include <memory>

#include "smagfem/cases.hpp"

namespace smagfem {

struct TimeState {
    double t = 0.0;
    int step_index = 0;
    Field u_prev;      // u^n
    Field u_prevprev;  // u^{n-1} (empty before the first step)
    Field p_prev;
};

// Velocity block, divergence block and right-hand sides of one linearized
// solve. Constrained velocity rows and the pressure pin are imposed when
// the blocks are merged in solve_saddle.
struct SaddleSystem {
    SparseOperator A;
    SparseOperator B;
    Eigen::VectorXd rhs_u;
    Eigen::VectorXd rhs_p;
};

// Direct sparse solve of [A B^T; B 0] with constrained-row identities and
// the pressure pin(s). Throws on factorization failure or relative residual
// above 1e-9.
std::pair<Field, Field> solve_saddle(const FESystem& system,
                                     const SaddleSystem& sys);

// Stateful variant that reuses the previous factorization as long as
// defect-correction iterations against the current matrix reach the
// direct-solver tolerance, refactorizing otherwise. Exact to 1e-9 relative
// residual either way and fully deterministic.
class SaddleSolver {
  public:
    std::pair<Field, Field> solve(const FESystem& system, const SaddleSystem& sys);

  private:
    struct Impl;
    std::shared_ptr<Impl> impl_;  // shared so Stepper can stay copyable
};

// Raised when the energy monitor trips (non-finite coefficients or kinetic
// energy above 1e6x the initial value).
struct InstabilityError : std::runtime_error {
    double t;
    explicit InstabilityError(double time)
        : std::runtime_error("instability detected at t = " + std::to_string(time)),
          t(time) {}
};

// Reusable stepping context: holds the state-independent operators.
class Stepper {
  public:
    Stepper(const FESystem& system, const FormParams& params, ForcingFn forcing,
            Linearization lin);

    // Advance one step of the given order (1 = startup, 2 = BDF2).
    TimeState step(const TimeState& state, double dt, int order) const;

    const SparseOperator& mass() const { return mass_; }
    const SparseOperator& divergence() const { return div_; }

  private:
    const FESystem& system_;
    FormParams params_;
    ForcingFn forcing_;
    Linearization lin_;
    SparseOperator mass_, visc_, div_, bc_, s1_;
    bool has_nitsche_ = false;
    mutable SaddleSolver saddle_;
};

// One-shot variant of Stepper::step for tests and small drivers.
TimeState bdf_step(const FESystem& system, const TimeState& state,
                   const FormParams& params, const ForcingFn& f, double dt,
                   int order, Linearization lin = Linearization::PREVIOUS);

// Stationary Stokes velocity (unit viscosity; the velocity is independent
// of the viscosity value for force-free Dirichlet data).
std::pair<Field, Field> solve_stokes(const FESystem& system);

// Steady linear transport solve: A(beta) u = (f, v).
Field solve_linear_model(const FESystem& system, const CaseSpec& spec,
                         const SimConfig& config);

// Full simulation result. `on_output` (optional) fires at every recorded
// step with the current fields.
struct RunResult {
    RunReport report;
    CaseSpec spec;
    FESystem system;
    Field u;
    Field p;
};
using OutputHook =
    std::function<void(int step, double t, const FESystem&, const Field& u,
                       const Field& p)>;
RunResult run_simulation(const SimConfig& config, const OutputHook& on_output = {});

}  // namespace smagfem
