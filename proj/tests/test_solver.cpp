#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "smagfem/solver.hpp"

using namespace smagfem;

namespace {

Mesh periodic_square(int n) {
    Rect box{0.0, 0.0, 2 * M_PI, 2 * M_PI};
    Mesh m = build_union_jack(n, n, box);
    tag_rectangle_boundary(m, box, BoundaryTag::PERIODIC_X, BoundaryTag::PERIODIC_X,
                           BoundaryTag::PERIODIC_Y, BoundaryTag::PERIODIC_Y);
    return build_periodicity(m, true, true);
}

Field constant_velocity(const FESystem& sys, Vec2 c) {
    return interpolate(sys, [c](Vec2) { return c; });
}

}  // namespace

TEST_CASE("zero data stays zero under time stepping") {
    Mesh m = periodic_square(4);
    FESystem sys = build_system(m, {});
    FormParams params;
    params.mu = 0.01;
    params.gamma = 0.1;
    TimeState s;
    s.u_prev = zero_velocity(sys);
    for (int k = 0; k < 3; ++k) {
        s = bdf_step(sys, s, params, nullptr, 0.01, k == 0 ? 1 : 2);
        CHECK(s.u_prev.coeffs.norm() == 0.0);
    }
}

TEST_CASE("BDF2 mass-only reduction on constant fields") {
    // Constant states on the torus zero every operator except the mass:
    // the update must reproduce u = (4 u_prev - u_prevprev) / 3.
    Mesh m = periodic_square(3);
    FESystem sys = build_system(m, {});
    FormParams params;  // mu = gamma = 0
    TimeState s;
    s.t = 0.0;
    s.u_prev = constant_velocity(sys, {3.0, -1.5});
    s.u_prevprev = constant_velocity(sys, {1.2, 0.9});
    TimeState next = bdf_step(sys, s, params, nullptr, 0.05, 2);
    Field want = zero_velocity(sys);
    want.coeffs = (4.0 * s.u_prev.coeffs - s.u_prevprev.coeffs) / 3.0;
    CHECK((next.u_prev.coeffs - want.coeffs).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK(next.t == doctest::Approx(0.05));
    CHECK(next.step_index == 1);
}

TEST_CASE("stepping rejects invalid dt and missing history") {
    Mesh m = periodic_square(2);
    FESystem sys = build_system(m, {});
    FormParams params;
    TimeState s;
    s.u_prev = zero_velocity(sys);
    CHECK_THROWS_AS(bdf_step(sys, s, params, nullptr, -1.0, 1), std::runtime_error);
    CHECK_THROWS_AS(bdf_step(sys, s, params, nullptr, 0.01, 2), std::runtime_error);
    CHECK_THROWS_AS(bdf_step(sys, s, params, nullptr, 0.01, 3), std::runtime_error);
}

TEST_CASE("non-finite state raises the instability error") {
    Mesh m = periodic_square(2);
    FESystem sys = build_system(m, {});
    FormParams params;
    TimeState s;
    s.t = 0.7;
    s.u_prev = zero_velocity(sys);
    s.u_prev.coeffs[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(bdf_step(sys, s, params, nullptr, 0.01, 1), InstabilityError);
}

TEST_CASE("saddle solve: zero rhs and consistency") {
    Mesh m = periodic_square(4);
    FESystem sys = build_system(m, {});
    SaddleSystem ss;
    ss.A = assemble_mass(sys) + assemble_viscous(sys, 0.3);
    ss.B = assemble_divergence(sys);
    ss.rhs_u = Eigen::VectorXd::Zero(sys.n_velocity);
    ss.rhs_p = Eigen::VectorXd::Zero(sys.n_pressure);
    auto [u0, p0] = solve_saddle(sys, ss);
    CHECK(u0.coeffs.norm() == 0.0);
    CHECK(p0.coeffs.norm() == 0.0);

    // Manufacture a solution: divergence-free velocity, mean-zero pressure.
    Field uk = interpolate(sys, [](Vec2 x) -> Vec2 {
        return {std::cos(x.y), std::sin(x.x)};
    });
    Field pk = zero_pressure(sys);
    for (int q = 1; q < sys.n_pressure; ++q) pk.coeffs[q] = std::sin(0.1 * q);
    // Zero the pinned components so the manufactured pair satisfies the
    // pinned system (pin set is implementation detail: compare residuals).
    ss.rhs_u = ss.A * uk.coeffs + ss.B.transpose() * pk.coeffs;
    ss.rhs_p = ss.B * uk.coeffs;
    auto [ur, pr] = solve_saddle(sys, ss);
    double unorm = uk.coeffs.lpNorm<Eigen::Infinity>();
    // Velocity is unique; pressure may differ by the pinned null modes.
    CHECK((ur.coeffs - uk.coeffs).lpNorm<Eigen::Infinity>() <= 1e-8 * unorm);
    Eigen::VectorXd res =
        ss.A * ur.coeffs + ss.B.transpose() * pr.coeffs - ss.rhs_u;
    CHECK(res.lpNorm<Eigen::Infinity>() <= 1e-8 * ss.rhs_u.lpNorm<Eigen::Infinity>());
}

TEST_CASE("tiny Stokes flow matches a dense solver oracle") {
    // 2x2 cells, Dirichlet everywhere except a Neumann outflow on the
    // right; the pressure is then fully determined (no pin).
    Mesh m = build_union_jack(2, 2, {0, 0, 1, 1});
    tag_rectangle_boundary(m, {0, 0, 1, 1}, BoundaryTag::WALL,
                           BoundaryTag::OUTFLOW, BoundaryTag::WALL,
                           BoundaryTag::WALL);
    std::map<BoundaryTag, BcSpec> bc;
    bc[BoundaryTag::WALL] = {BcMode::STRONG_DIRICHLET, nullptr};
    bc[BoundaryTag::OUTFLOW] = {BcMode::NEUMANN, nullptr};
    FESystem sys = build_system(m, bc);
    REQUIRE(!sys.pressure_pinned);

    SaddleSystem ss;
    ss.A = assemble_viscous(sys, 1.0);
    ss.B = assemble_divergence(sys);
    ss.rhs_u = assemble_rhs(sys, [](Vec2 x, double) -> Vec2 {
        return {1.0 + x.y, x.x * x.x};
    }, 0.0);
    ss.rhs_p = Eigen::VectorXd::Zero(sys.n_pressure);
    auto [u, p] = solve_saddle(sys, ss);

    // Dense oracle: assemble the same block system over free velocity DOFs
    // and all pressures, solve with a dense LU.
    std::vector<int> fidx(sys.n_velocity, -1);
    int nf = 0;
    for (int d = 0; d < sys.n_velocity; ++d)
        if (!sys.constrained[d]) fidx[d] = nf++;
    int n = nf + sys.n_pressure;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int col = 0; col < ss.A.outerSize(); ++col)
        for (SparseOperator::InnerIterator it(ss.A, col); it; ++it)
            if (fidx[it.row()] >= 0 && fidx[it.col()] >= 0)
                K(fidx[it.row()], fidx[it.col()]) += it.value();
    for (int col = 0; col < ss.B.outerSize(); ++col)
        for (SparseOperator::InnerIterator it(ss.B, col); it; ++it)
            if (fidx[it.col()] >= 0) {
                K(nf + it.row(), fidx[it.col()]) += it.value();
                K(fidx[it.col()], nf + it.row()) += it.value();
            }
    for (int d = 0; d < sys.n_velocity; ++d)
        if (fidx[d] >= 0) rhs[fidx[d]] = ss.rhs_u[d];
    Eigen::VectorXd sol = Eigen::FullPivLU<Eigen::MatrixXd>(K).solve(rhs);
    for (int d = 0; d < sys.n_velocity; ++d)
        if (fidx[d] >= 0)
            CHECK(u.coeffs[d] == doctest::Approx(sol[fidx[d]]).epsilon(1e-9));
    for (int q = 0; q < sys.n_pressure; ++q)
        CHECK(p.coeffs[q] == doctest::Approx(sol[nf + q]).epsilon(1e-9));
}

TEST_CASE("time stepping converges to the steady solve") {
    // Forcing f = (cos y, 0) on the torus: the steady solution is laminar
    // and its self-advection vanishes, so the fixed point of the stepping
    // must satisfy the steady linearized equations.
    Mesh m = periodic_square(8);
    FESystem sys = build_system(m, {});
    FormParams params;
    params.mu = 1.0;
    ForcingFn f = [](Vec2 x, double) -> Vec2 { return {std::cos(x.y), 0.0}; };

    TimeState s;
    s.u_prev = zero_velocity(sys);
    Stepper stepper(sys, params, f, Linearization::PREVIOUS);
    double dt = 0.25;
    for (int k = 0; k < 80; ++k) s = stepper.step(s, dt, k == 0 ? 1 : 2);

    SaddleSystem steady;
    steady.A = assemble_viscous(sys, params.mu) + assemble_convection(sys, s.u_prev);
    steady.B = assemble_divergence(sys);
    steady.rhs_u = assemble_rhs(sys, f, 0.0);
    steady.rhs_p = Eigen::VectorXd::Zero(sys.n_pressure);
    auto [us, ps] = solve_saddle(sys, steady);
    // On the torus the steady operator annihilates constant velocities, so
    // compare the mean-free parts only.
    SparseOperator M = assemble_mass(sys);
    double area = 4 * M_PI * M_PI;
    auto demean = [&](Eigen::VectorXd v) {
        for (int c = 0; c < 2; ++c) {
            Field ones = constant_velocity(sys, c == 0 ? Vec2{1, 0} : Vec2{0, 1});
            double mean = ones.coeffs.dot(M * v) / area;
            v -= mean * ones.coeffs;
        }
        return v;
    };
    Eigen::VectorXd a = demean(s.u_prev.coeffs), b = demean(us.coeffs);
    double scale = b.lpNorm<Eigen::Infinity>();
    CHECK(scale > 0.1);  // the steady state is nontrivial
    CHECK((a - b).lpNorm<Eigen::Infinity>() <= 1e-6 * scale);
}

TEST_CASE("BDF2 is second order in time (Richardson ratios)") {
    SimConfig cfg = default_config(CaseId::MMS_NS);
    cfg.resolution = 16;
    cfg.t_end = 0.25;
    cfg.output_every = 1000000;
    // The extrapolated linearization keeps the one-solve step second order.
    cfg.linearization = Linearization::EXTRAPOLATED;
    auto final_state = [&](double dt) {
        SimConfig c = cfg;
        c.dt = dt;
        return run_simulation(c).u.coeffs;
    };
    Eigen::VectorXd u1 = final_state(0.025);
    Eigen::VectorXd u2 = final_state(0.0125);
    Eigen::VectorXd uref = final_state(0.025 / 8.0);
    double e1 = (u1 - uref).norm();
    double e2 = (u2 - uref).norm();
    double ratio = e1 / e2;  // exactly second order gives (64-1)/(16-1) = 4.2
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.5);
}

TEST_CASE("zero-length simulation reports only the initial state") {
    SimConfig cfg = default_config(CaseId::SHEAR_LAYER);
    cfg.resolution = 8;
    cfg.t_end = 0.0;
    RunResult r = run_simulation(cfg);
    REQUIRE(r.report.rows.size() == 1);
    CHECK(r.report.rows[0].t == 0.0);
    CHECK(r.report.rows[0].energy > 0.0);
    CHECK(!r.report.instability);
}

TEST_CASE("run reports are exactly reproducible") {
    SimConfig cfg = default_config(CaseId::SHEAR_LAYER);
    cfg.resolution = 8;
    cfg.gamma = 0.1;
    cfg.dt = 0.02;
    cfg.t_end = 0.1;
    cfg.output_every = 2;
    RunResult a = run_simulation(cfg);
    RunResult b = run_simulation(cfg);
    REQUIRE(a.report.rows.size() == b.report.rows.size());
    for (size_t k = 0; k < a.report.rows.size(); ++k) {
        CHECK(a.report.rows[k].energy == b.report.rows[k].energy);
        CHECK(a.report.rows[k].max_vorticity == b.report.rows[k].max_vorticity);
        CHECK(a.report.rows[k].div_weak == b.report.rows[k].div_weak);
        CHECK(a.report.rows[k].stab_seminorm == b.report.rows[k].stab_seminorm);
    }
    CHECK((a.u.coeffs - b.u.coeffs).norm() == 0.0);
}

TEST_CASE("weak incompressibility holds on every recorded step") {
    SimConfig cfg = default_config(CaseId::SHEAR_LAYER);
    cfg.resolution = 16;
    cfg.gamma = 0.1;
    cfg.dt = 0.02;
    cfg.t_end = 0.2;
    cfg.output_every = 1;
    RunResult r = run_simulation(cfg);
    for (const ReportRow& row : r.report.rows)
        CHECK(row.div_weak <= 1e-9);
}

TEST_CASE("energy decays for the stabilized inviscid shear layer") {
    SimConfig cfg = default_config(CaseId::SHEAR_LAYER);
    cfg.resolution = 32;
    cfg.mu = 0.0;
    cfg.gamma = 0.1;
    cfg.dt = 0.01;
    cfg.t_end = 1.0;
    cfg.output_every = 10;
    RunResult r = run_simulation(cfg);
    REQUIRE(!r.report.instability);
    for (size_t k = 1; k < r.report.rows.size(); ++k)
        CHECK(r.report.rows[k].energy <=
              r.report.rows[k - 1].energy * (1.0 + 1e-3));
}
