#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "smagfem/cases.hpp"
#include "smagfem/diagnostics.hpp"

using namespace smagfem;

namespace {

// Central finite differences against the analytic case data make the
// manufactured forcings independently checkable.
Vec2 fd_time(const ExactVelocity& u, Vec2 x, double t, double h) {
    return (1.0 / (2.0 * h)) * (u(x, t + h) - u(x, t - h));
}

Tensor2 fd_grad(const ExactVelocity& u, Vec2 x, double t, double h) {
    Vec2 dx = u({x.x + h, x.y}, t) - u({x.x - h, x.y}, t);
    Vec2 dy = u({x.x, x.y + h}, t) - u({x.x, x.y - h}, t);
    Tensor2 g;
    g(0, 0) = dx.x / (2 * h);
    g(0, 1) = dy.x / (2 * h);
    g(1, 0) = dx.y / (2 * h);
    g(1, 1) = dy.y / (2 * h);
    return g;
}

Vec2 fd_laplace(const ExactVelocity& u, Vec2 x, double t, double h) {
    Vec2 c = u(x, t);
    Vec2 s = u({x.x + h, x.y}, t) + u({x.x - h, x.y}, t) +
             u({x.x, x.y + h}, t) + u({x.x, x.y - h}, t);
    return (1.0 / (h * h)) * (s - 4.0 * c);
}

}  // namespace

TEST_CASE("shear layer initial profile values") {
    SimConfig cfg = default_config(CaseId::SHEAR_LAYER);
    cfg.resolution = 8;  // the data functions do not depend on the mesh
    CaseSpec spec = make_case(cfg);
    REQUIRE(spec.initial);

    Vec2 a = spec.initial({0.0, M_PI / 2.0});
    CHECK(a.x == doctest::Approx(0.0));
    CHECK(a.y == doctest::Approx(0.0));

    Vec2 b = spec.initial({M_PI / 2.0, M_PI});
    CHECK(b.x == doctest::Approx(std::tanh((M_PI / 2.0) / (M_PI / 15.0))));
    CHECK(b.y == doctest::Approx(0.05));

    // Antisymmetric across the layer centers.
    Vec2 lo = spec.initial({1.0, M_PI / 2.0 - 0.3});
    Vec2 hi = spec.initial({1.0, M_PI / 2.0 + 0.3});
    CHECK(lo.x == doctest::Approx(-hi.x));
}

TEST_CASE("shear layer defaults") {
    SimConfig c = default_config(CaseId::SHEAR_LAYER);
    CHECK(c.resolution == 100);
    CHECK(c.dt == 0.01);
    CHECK(c.mu == 0.0);
    CHECK(c.gamma == 0.0);
    CHECK(c.t_end == 6.0);
    CaseSpec spec = make_case(c);
    CHECK(spec.project_initial);
    CHECK(!spec.forcing);
}

TEST_CASE("cylinder boundary data and modes") {
    SimConfig cfg = default_config(CaseId::CYLINDER);
    CaseSpec spec = make_case(cfg);

    auto& inflow = spec.bc.at(BoundaryTag::INFLOW);
    CHECK(inflow.mode == BcMode::STRONG_DIRICHLET);
    Vec2 mid = inflow.value({-0.5, 0.0}, 0.0);
    CHECK(mid.x == doctest::Approx(1.5));
    CHECK(mid.y == doctest::Approx(0.0));
    Vec2 top = inflow.value({-0.5, 0.5}, 0.0);
    CHECK(top.x == doctest::Approx(0.0));
    Vec2 bot = inflow.value({-0.5, -0.5}, 0.0);
    CHECK(bot.x == doctest::Approx(0.0));

    CHECK(spec.bc.at(BoundaryTag::CYLINDER).mode == BcMode::STRONG_DIRICHLET);
    CHECK(spec.bc.at(BoundaryTag::OUTFLOW).mode == BcMode::NEUMANN);
    CHECK(spec.bc.at(BoundaryTag::WALL).mode == BcMode::STRONG_DIRICHLET);
    CHECK(!spec.initial);  // starts from a steady Stokes solve

    cfg.tangential_bc = TangentialBcMode::NITSCHE;
    CaseSpec weak = make_case(cfg);
    CHECK(weak.bc.at(BoundaryTag::WALL).mode == BcMode::NORMAL_ONLY);
    CHECK(weak.bc.at(BoundaryTag::CYLINDER).mode == BcMode::STRONG_DIRICHLET);
}

TEST_CASE("manufactured Navier-Stokes solution satisfies its PDE") {
    SimConfig cfg = default_config(CaseId::MMS_NS);
    cfg.resolution = 8;
    cfg.mu = 0.037;
    CaseSpec spec = make_case(cfg);
    REQUIRE(spec.exact);
    REQUIRE(spec.forcing);

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> pos(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> tau(0.0, 2.0);
    const double h = 1e-4;
    for (int k = 0; k < 50; ++k) {
        Vec2 x{pos(rng), pos(rng)};
        double t = tau(rng);
        // Divergence-free: trace of the exact gradient vanishes.
        Tensor2 g = spec.exact_grad(x, t);
        CHECK(std::abs(g(0, 0) + g(1, 1)) <= 1e-14);
        // Residual of u_t + (u.grad)u - mu laplace(u) - f via differences.
        Vec2 u = spec.exact(x, t);
        Tensor2 gu = fd_grad(spec.exact, x, t, h);
        Vec2 conv{u.x * gu(0, 0) + u.y * gu(0, 1),
                  u.x * gu(1, 0) + u.y * gu(1, 1)};
        Vec2 res = fd_time(spec.exact, x, t, h) + conv -
                   cfg.mu * fd_laplace(spec.exact, x, t, h) -
                   spec.forcing(x, t);
        CHECK(std::abs(res.x) <= 1e-6);
        CHECK(std::abs(res.y) <= 1e-6);
    }
}

TEST_CASE("manufactured Navier-Stokes initial amplitude") {
    SimConfig cfg = default_config(CaseId::MMS_NS);
    cfg.resolution = 32;
    CaseSpec spec = make_case(cfg);
    FESystem sys = build_system(*spec.mesh, spec.bc);
    // ||u(.,0)||_L2^2 = int cos^2 y + sin^2 x = 4 pi^2 on the torus.
    auto [l2, h1] = error_norms(sys, zero_velocity(sys), spec.exact,
                                spec.exact_grad, 0.0);
    CHECK(l2 == doctest::Approx(2.0 * M_PI).epsilon(1e-6));
    CHECK(h1 == doctest::Approx(2.0 * M_PI).epsilon(1e-6));
    // The amplitude decays like exp(-t/4).
    Vec2 u0 = spec.exact({0.3, 0.7}, 0.0);
    Vec2 u1 = spec.exact({0.3, 0.7}, 4.0);
    CHECK(u1.x == doctest::Approx(u0.x * std::exp(-1.0)));
}

TEST_CASE("manufactured linear model satisfies its PDE") {
    SimConfig cfg = default_config(CaseId::MMS_LINEAR);
    cfg.resolution = 8;
    CaseSpec spec = make_case(cfg);
    REQUIRE(spec.beta);
    REQUIRE(spec.exact);
    CHECK(cfg.sigma == 4.0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pos(0.0, 2.0 * M_PI);
    const double h = 1e-4;
    double beta_grad_max = 0.0;
    for (int k = 0; k < 50; ++k) {
        Vec2 x{pos(rng), pos(rng)};
        Vec2 b = spec.beta(x);
        // The advecting field is divergence-free.
        auto beta_t = [&spec](Vec2 y, double) { return spec.beta(y); };
        Tensor2 gb = fd_grad(beta_t, x, 0.0, h);
        CHECK(std::abs(gb(0, 0) + gb(1, 1)) <= 1e-7);
        beta_grad_max = std::max({beta_grad_max, std::abs(gb(0, 1)),
                                  std::abs(gb(1, 0))});
        // Residual of (beta.grad)u + sigma u - f.
        Tensor2 gu = fd_grad(spec.exact, x, 0.0, h);
        Vec2 u = spec.exact(x, 0.0);
        Vec2 res{b.x * gu(0, 0) + b.y * gu(0, 1) + cfg.sigma * u.x -
                     spec.forcing(x, 0.0).x,
                 b.x * gu(1, 0) + b.y * gu(1, 1) + cfg.sigma * u.y -
                     spec.forcing(x, 0.0).y};
        CHECK(std::abs(res.x) <= 1e-6);
        CHECK(std::abs(res.y) <= 1e-6);
    }
    // Coercivity: sigma dominates the advecting field's gradient.
    CHECK(cfg.sigma >= beta_grad_max);
}

TEST_CASE("config validation names the offending key") {
    SimConfig c = default_config(CaseId::SHEAR_LAYER);
    c.dt = -1.0;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("dt"),
                         std::runtime_error);
    c = default_config(CaseId::SHEAR_LAYER);
    c.mu = -0.1;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("mu"),
                         std::runtime_error);
    c = default_config(CaseId::MMS_LINEAR);
    c.sigma = 0.0;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("sigma"),
                         std::runtime_error);
    c = default_config(CaseId::CYLINDER);
    c.resolution = 0;
    CHECK_THROWS_WITH_AS(make_case(c), doctest::Contains("resolution"),
                         std::runtime_error);
    c = default_config(CaseId::SHEAR_LAYER);
    c.t_end = 0.0;
    CHECK_NOTHROW(c.validate());  // zero-length runs report the start only
}

TEST_CASE("case names round trip") {
    for (CaseId id : {CaseId::SHEAR_LAYER, CaseId::CYLINDER, CaseId::MMS_NS,
                      CaseId::MMS_LINEAR})
        CHECK(case_from_string(to_string(id)) == id);
    CHECK_THROWS_AS(case_from_string("vortex_street"), std::runtime_error);
}
