#include "smagfem/solver.hpp"

#include <Eigen/SparseLU>
#include <Eigen/UmfPackSupport>
#include <chrono>
#include <cmath>
#include <limits>

namespace smagfem {

using Triplet = Eigen::Triplet<double>;

// ---------------------------------------------------------------------------
// Saddle-point solve.
// ---------------------------------------------------------------------------

// Pressure DOFs fixed to zero so that B^T has a trivial null space. For a
// fully enclosed flow the constant mode is always null (macro means of
// div u sum to zero), so DOF 0 is pinned. Criss-cross macro grids under
// full periodicity additionally carry a checkerboard null mode; it is
// detected by 2-coloring the macro adjacency graph and testing the signed
// indicator against B^T, and a macro of the opposite color is pinned.
// Each pinned row is a redundant constraint: a null mode of B^T is exactly
// a vanishing linear combination of the rows of B.
std::vector<int> pinned_pressure_dofs(const FESystem& system,
                                      const SparseOperator& B) {
    std::vector<int> pins;
    if (!system.pressure_pinned) return pins;
    pins.push_back(0);

    const Mesh& mesh = *system.mesh;
    const int np = system.n_pressure;
    std::vector<int8_t> color(np, -1);
    std::vector<std::vector<int>> adj(np);
    for (const Face& f : mesh.faces) {
        if (!f.interior()) continue;
        int a = mesh.macro_parent[f.left], b = mesh.macro_parent[f.right];
        if (a == b) continue;
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    bool bipartite = true;
    std::vector<int> stack;
    for (int s = 0; s < np && bipartite; ++s) {
        if (color[s] >= 0) continue;
        color[s] = 0;
        stack.push_back(s);
        while (!stack.empty() && bipartite) {
            int m = stack.back();
            stack.pop_back();
            for (int o : adj[m]) {
                if (color[o] < 0) {
                    color[o] = (int8_t)(1 - color[m]);
                    stack.push_back(o);
                } else if (color[o] == color[m]) {
                    bipartite = false;
                    break;
                }
            }
        }
    }
    if (!bipartite) return pins;

    // q_m = +/-1 by color; checkerboard is null iff B^T q = 0.
    Eigen::VectorXd q(np);
    for (int m = 0; m < np; ++m) q[m] = color[m] == 0 ? 1.0 : -1.0;
    Eigen::VectorXd btq = B.transpose() * q;
    double scale = 0.0;
    for (int k = 0; k < B.outerSize(); ++k)
        for (SparseOperator::InnerIterator it(B, k); it; ++it)
            scale = std::max(scale, std::fabs(it.value()));
    if (btq.cwiseAbs().maxCoeff() <= 1e-10 * (scale + 1e-300)) {
        for (int m = 0; m < np; ++m)
            if (color[m] != color[0]) {
                pins.push_back(m);
                break;
            }
    }
    return pins;
}

namespace {

// Merged block matrix and right-hand side with all constraints imposed.
struct BlockSystem {
    SparseOperator K;
    Eigen::VectorXd b;
};

BlockSystem build_block_system(const FESystem& system, const SaddleSystem& sys) {
    const int nv = system.n_velocity;
    const int np = system.n_pressure;
    const int n = nv + np;

    std::vector<int> pins = pinned_pressure_dofs(system, sys.B);
    std::vector<char> pinned(np, 0);
    for (int m : pins) pinned[m] = 1;

    std::vector<Triplet> tri;
    tri.reserve(sys.A.nonZeros() + 2 * sys.B.nonZeros() + nv);

    // Velocity rows: identity on constrained DOFs, A elsewhere.
    for (int k = 0; k < sys.A.outerSize(); ++k)
        for (SparseOperator::InnerIterator it(sys.A, k); it; ++it)
            if (!system.constrained[it.row()])
                tri.emplace_back((int)it.row(), (int)it.col(), it.value());
    for (int d = 0; d < nv; ++d)
        if (system.constrained[d]) tri.emplace_back(d, d, 1.0);

    // Divergence rows and the transposed coupling; pinned pressure rows
    // become identities.
    for (int k = 0; k < sys.B.outerSize(); ++k)
        for (SparseOperator::InnerIterator it(sys.B, k); it; ++it) {
            int m = (int)it.row(), j = (int)it.col();
            if (!pinned[m]) tri.emplace_back(nv + m, j, it.value());
            if (!system.constrained[j]) tri.emplace_back(j, nv + m, it.value());
        }
    for (int m : pins) tri.emplace_back(nv + m, nv + m, 1.0);

    SparseOperator K(n, n);
    K.setFromTriplets(tri.begin(), tri.end());

    Eigen::VectorXd b(n);
    b.head(nv) = sys.rhs_u;
    b.tail(np) = sys.rhs_p;
    for (int m : pins) b[nv + m] = 0.0;
    return {std::move(K), std::move(b)};
}

std::pair<Field, Field> split_solution(const FESystem& system,
                                       const Eigen::VectorXd& x) {
    Field u = zero_velocity(system);
    u.coeffs = x.head(system.n_velocity);
    Field p = zero_pressure(system);
    p.coeffs = x.tail(system.n_pressure);
    return {u, p};
}

constexpr double kSaddleTol = 1e-9;

}  // namespace

struct SaddleSolver::Impl {
    Eigen::UmfPackLU<SparseOperator> lu;
    SparseOperator K0;  // factorized matrix; the LU object references it
    bool factorized = false;

    Eigen::VectorXd direct_solve(const BlockSystem& bs) {
        K0 = bs.K;
        lu.compute(K0);
        if (lu.info() != Eigen::Success) {
            factorized = false;
            throw std::runtime_error(
                "solve_saddle: factorization failed (singular system; check the "
                "pressure pin and the rank of the divergence block)");
        }
        factorized = true;
        Eigen::VectorXd x = lu.solve(bs.b);
        double rel = (bs.K * x - bs.b).norm() / (1.0 + bs.b.norm());
        if (!(rel <= kSaddleTol))
            throw std::runtime_error("solve_saddle: relative residual " +
                                     std::to_string(rel) + " exceeds 1e-9");
        return x;
    }

    Eigen::VectorXd solve(const BlockSystem& bs) {
        if (factorized) {
            // Defect correction against the cached factorization; the block
            // matrix drifts slowly between steps, so a handful of sweeps
            // usually reaches the direct-solver tolerance.
            Eigen::VectorXd x = Eigen::VectorXd::Zero(bs.b.size());
            double prev_rel = std::numeric_limits<double>::infinity();
            for (int it = 0; it < 10; ++it) {
                Eigen::VectorXd r = bs.b - bs.K * x;
                double rel = r.norm() / (1.0 + bs.b.norm());
                if (rel <= kSaddleTol) return x;
                if (!(rel < 0.5 * prev_rel)) break;  // stagnating or diverging
                prev_rel = rel;
                x += lu.solve(r);
            }
        }
        return direct_solve(bs);
    }
};

std::pair<Field, Field> SaddleSolver::solve(const FESystem& system,
                                            const SaddleSystem& sys) {
    if (!impl_) impl_ = std::make_shared<Impl>();
    BlockSystem bs = build_block_system(system, sys);
    if (!bs.b.allFinite())
        throw std::runtime_error("solve_saddle: non-finite right-hand side");
    return split_solution(system, impl_->solve(bs));
}

std::pair<Field, Field> solve_saddle(const FESystem& system,
                                     const SaddleSystem& sys) {
    SaddleSolver solver;
    return solver.solve(system, sys);
}

// ---------------------------------------------------------------------------
// Time stepping.
// ---------------------------------------------------------------------------

Stepper::Stepper(const FESystem& system, const FormParams& params,
                 ForcingFn forcing, Linearization lin)
    : system_(system), params_(params), forcing_(std::move(forcing)), lin_(lin) {
    mass_ = assemble_mass(system_);
    visc_ = assemble_viscous(system_, params_.mu);
    div_ = assemble_divergence(system_);
    for (const Face& f : system_.mesh->faces)
        if (system_.is_nitsche_face(f)) has_nitsche_ = true;
    if (has_nitsche_) {
        auto [bc, s1] = assemble_nitsche(system_, params_.mu, params_.gamma1,
                                         params_.U);
        bc_ = bc;
        s1_ = s1;
    }
}

TimeState Stepper::step(const TimeState& state, double dt, int order) const {
    if (dt <= 0.0) throw std::runtime_error("bdf_step: dt must be positive");
    if (order != 1 && order != 2)
        throw std::runtime_error("bdf_step: order must be 1 or 2");
    if (order == 2 && state.u_prevprev.coeffs.size() == 0)
        throw std::runtime_error("bdf_step: BDF2 requires two history levels");

    // Linearization point.
    Field w = state.u_prev;
    if (order == 2 && lin_ == Linearization::EXTRAPOLATED)
        w.coeffs = 2.0 * state.u_prev.coeffs - state.u_prevprev.coeffs;
    if (!w.coeffs.allFinite()) throw InstabilityError(state.t);

    const double alpha0 = order == 1 ? 1.0 : 1.5;
    SparseOperator A = (alpha0 / dt) * mass_ + visc_;
    A = A + assemble_convection(system_, w);
    if (params_.gamma != 0.0)
        A = A + assemble_smagorinsky(system_, w, params_.gamma);
    if (params_.gamma0 != 0.0)
        A = A + assemble_jump_penalty(system_, w, params_.gamma0, params_.U);
    if (has_nitsche_) A = A + bc_ + s1_;

    double t_next = state.t + dt;
    Eigen::VectorXd rhs = forcing_
                              ? assemble_rhs(system_, forcing_, t_next)
                              : assemble_rhs(
                                    system_,
                                    [](Vec2, double) {
                                        return Vec2{0.0, 0.0};
                                    },
                                    t_next);
    Eigen::VectorXd hist =
        order == 1 ? Eigen::VectorXd(mass_ * ((1.0 / dt) * state.u_prev.coeffs))
                   : Eigen::VectorXd(mass_ * ((1.0 / dt) *
                                              (2.0 * state.u_prev.coeffs -
                                               0.5 * state.u_prevprev.coeffs)));
    for (int d = 0; d < system_.n_velocity; ++d)
        if (!system_.constrained[d]) rhs[d] += hist[d];

    SaddleSystem sys;
    sys.A = std::move(A);
    sys.B = div_;
    sys.rhs_u = std::move(rhs);
    sys.rhs_p = Eigen::VectorXd::Zero(system_.n_pressure);
    auto [u, p] = saddle_.solve(system_, sys);

    if (!u.coeffs.allFinite()) throw InstabilityError(t_next);

    TimeState next;
    next.t = t_next;
    next.step_index = state.step_index + 1;
    next.u_prevprev = state.u_prev;
    next.u_prev = std::move(u);
    next.p_prev = std::move(p);
    return next;
}

TimeState bdf_step(const FESystem& system, const TimeState& state,
                   const FormParams& params, const ForcingFn& f, double dt,
                   int order, Linearization lin) {
    return Stepper(system, params, f, lin).step(state, dt, order);
}

// ---------------------------------------------------------------------------
// Steady solves.
// ---------------------------------------------------------------------------

std::pair<Field, Field> solve_stokes(const FESystem& system) {
    SaddleSystem sys;
    sys.A = assemble_viscous(system, 1.0);
    sys.B = assemble_divergence(system);
    sys.rhs_u = assemble_rhs(
        system, [](Vec2, double) { return Vec2{0.0, 0.0}; }, 0.0);
    sys.rhs_p = Eigen::VectorXd::Zero(system.n_pressure);
    return solve_saddle(system, sys);
}

Field solve_linear_model(const FESystem& system, const CaseSpec& spec,
                         const SimConfig& config) {
    if (!spec.beta || !spec.forcing)
        throw std::runtime_error("solve_linear_model: case lacks beta/forcing");
    Field beta_h = interpolate(system, spec.beta);
    FormParams params;
    params.gamma = config.gamma;
    params.U = config.U;
    SparseOperator A = assemble_linear_model(system, beta_h, config.sigma, params);
    Eigen::VectorXd rhs = assemble_rhs(system, spec.forcing, 0.0);

    Eigen::UmfPackLU<SparseOperator> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("solve_linear_model: factorization failed");
    Field u = zero_velocity(system);
    u.coeffs = lu.solve(rhs);
    double rel = (A * u.coeffs - rhs).norm() / (1.0 + rhs.norm());
    if (!(rel <= 1e-9))
        throw std::runtime_error("solve_linear_model: relative residual " +
                                 std::to_string(rel));
    return u;
}

// ---------------------------------------------------------------------------
// Simulation driver.
// ---------------------------------------------------------------------------

static ReportRow make_row(const FESystem& system, const Stepper& stepper,
                          const Field& u, const FormParams& params, double t) {
    ReportRow row;
    row.t = t;
    row.energy = kinetic_energy(system, stepper.mass(), u);
    Field w = vorticity(system, u);
    row.max_vorticity = w.coeffs.size() ? w.coeffs.cwiseAbs().maxCoeff() : 0.0;
    auto [dw, dp] = divergence_norms(system, stepper.divergence(), u);
    row.div_weak = dw;
    row.div_pointwise = dp;
    row.stab_seminorm = stab_seminorm(system, u, u, params);
    return row;
}

RunResult run_simulation(const SimConfig& config, const OutputHook& on_output) {
    auto t_start = std::chrono::steady_clock::now();
    RunResult result;
    result.spec = make_case(config);
    result.system = build_system(*result.spec.mesh, result.spec.bc);
    const FESystem& system = result.system;

    FormParams params;
    params.mu = config.mu;
    params.gamma = config.gamma;
    params.gamma0 = config.gamma0;
    params.gamma1 = config.gamma1;
    params.U = config.U;

    if (config.case_id == CaseId::MMS_LINEAR) {
        // Steady problem: one linear solve, one report row.
        result.u = solve_linear_model(system, result.spec, config);
        result.p = zero_pressure(system);
        Stepper stepper(system, params, result.spec.forcing, config.linearization);
        result.report.rows.push_back(
            make_row(system, stepper, result.u, params, 0.0));
        if (on_output) on_output(0, 0.0, system, result.u, result.p);
        result.report.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                .count();
        return result;
    }

    Stepper stepper(system, params, result.spec.forcing, config.linearization);

    TimeState state;
    if (result.spec.initial) {
        state.u_prev = result.spec.project_initial
                           ? l2_project(system, result.spec.initial)
                           : interpolate(system, result.spec.initial);
        state.p_prev = zero_pressure(system);
    } else {
        auto [u0, p0] = solve_stokes(system);
        state.u_prev = std::move(u0);
        state.p_prev = std::move(p0);
    }

    const double e0 = kinetic_energy(system, stepper.mass(), state.u_prev);
    int n_steps = (int)std::llround(config.t_end / config.dt);

    auto record = [&](const TimeState& s) {
        result.report.rows.push_back(
            make_row(system, stepper, s.u_prev, params, s.t));
        if (on_output) on_output(s.step_index, s.t, system, s.u_prev, s.p_prev);
    };
    record(state);

    double prev_stab = result.report.rows.back().stab_seminorm;
    for (int n = 0; n < n_steps; ++n) {
        int order = state.step_index == 0 ? 1 : 2;
        try {
            state = stepper.step(state, config.dt, order);
        } catch (const InstabilityError& err) {
            result.report.instability = true;
            result.report.instability_time = err.t;
            ReportRow row;
            row.t = err.t;
            row.flag = RunFlag::INSTABILITY;
            result.report.rows.push_back(row);
            break;
        }
        double e = kinetic_energy(system, stepper.mass(), state.u_prev);
        if (!std::isfinite(e) || e > 1e6 * (e0 + 1e-30)) {
            result.report.instability = true;
            result.report.instability_time = state.t;
            ReportRow row = make_row(system, stepper, state.u_prev, params, state.t);
            row.flag = RunFlag::INSTABILITY;
            result.report.rows.push_back(row);
            break;
        }
        bool last = n + 1 == n_steps;
        if ((state.step_index % config.output_every) == 0 || last) {
            record(state);
            double s = result.report.rows.back().stab_seminorm;
            // Trapezoidal accumulation of s(u,u) between recorded steps.
            result.report.stab_energy_integral +=
                0.5 * (prev_stab * prev_stab + s * s) * config.dt *
                config.output_every;
            prev_stab = s;
        }
    }

    result.u = state.u_prev;
    result.p = state.p_prev;
    result.report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return result;
}

}  // namespace smagfem
