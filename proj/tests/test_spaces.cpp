#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "smagfem/assembly.hpp"
#include "smagfem/cases.hpp"
#include "smagfem/diagnostics.hpp"

using namespace smagfem;

namespace {

Mesh periodic_square(int n) {
    Rect box{0.0, 0.0, 2 * M_PI, 2 * M_PI};
    Mesh m = build_union_jack(n, n, box);
    tag_rectangle_boundary(m, box, BoundaryTag::PERIODIC_X, BoundaryTag::PERIODIC_X,
                           BoundaryTag::PERIODIC_Y, BoundaryTag::PERIODIC_Y);
    return build_periodicity(m, true, true);
}

int free_dofs(const FESystem& sys) {
    int n = 0;
    for (char c : sys.constrained)
        if (!c) ++n;
    return n;
}

}  // namespace

TEST_CASE("fully periodic 1x1 union jack DOF counts") {
    Mesh m = periodic_square(1);
    FESystem sys = build_system(m, {});
    int unique = 0;
    for (int v = 0; v < (int)m.vertices.size(); ++v)
        if (!m.is_periodic_slave(v)) ++unique;
    CHECK(sys.n_velocity == 2 * unique);
    CHECK(sys.n_pressure == 1);
    CHECK(sys.pressure_pinned);
    CHECK(free_dofs(sys) == sys.n_velocity);
}

TEST_CASE("all-Dirichlet 1x1 union jack leaves only the center free") {
    Mesh m = build_union_jack(1, 1, {0, 0, 1, 1});
    std::map<BoundaryTag, BcSpec> bc;
    bc[BoundaryTag::WALL] = {BcMode::STRONG_DIRICHLET, nullptr};
    FESystem sys = build_system(m, bc);
    CHECK(sys.n_velocity == 10);
    CHECK(free_dofs(sys) == 2);
    CHECK(sys.pressure_pinned);
}

TEST_CASE("a Neumann boundary unpins the pressure") {
    Mesh m = build_union_jack(2, 2, {0, 0, 1, 1});
    tag_rectangle_boundary(m, {0, 0, 1, 1}, BoundaryTag::INFLOW,
                           BoundaryTag::OUTFLOW, BoundaryTag::WALL,
                           BoundaryTag::WALL);
    std::map<BoundaryTag, BcSpec> bc;
    bc[BoundaryTag::INFLOW] = {BcMode::STRONG_DIRICHLET,
                               [](Vec2 x, double) -> Vec2 {
                                   return {1.5 - 6.0 * x.y * x.y, 0.0};
                               }};
    bc[BoundaryTag::WALL] = {BcMode::STRONG_DIRICHLET, nullptr};
    bc[BoundaryTag::OUTFLOW] = {BcMode::NEUMANN, nullptr};
    FESystem sys = build_system(m, bc);
    CHECK(!sys.pressure_pinned);
    // Outflow-only vertices stay free.
    CHECK(free_dofs(sys) > 2);
}

TEST_CASE("normal-only mode constrains one component on axis-aligned walls") {
    Mesh m = build_union_jack(2, 2, {0, 0, 1, 1});
    std::map<BoundaryTag, BcSpec> bc;
    bc[BoundaryTag::WALL] = {BcMode::NORMAL_ONLY, nullptr};
    FESystem sys = build_system(m, bc);
    // Edge midpoints on a horizontal wall: only the y-component is fixed.
    // Corners get both components (two orthogonal walls meet).
    int constrained = sys.n_velocity - free_dofs(sys);
    // 8 boundary vertices: 4 corners x 2 comps + 4 edge vertices x 1 comp.
    CHECK(constrained == 12);
    for (const Face& f : m.faces)
        if (!f.interior()) CHECK(sys.is_nitsche_face(f));
}

TEST_CASE("interpolation of zero and affine fields") {
    Mesh m = build_union_jack(3, 3, {0, 0, 1, 1});
    FESystem sys = build_system(m, {{BoundaryTag::WALL,
                                     {BcMode::STRONG_DIRICHLET,
                                      [](Vec2 x, double) -> Vec2 {
                                          return {2.0 * x.x - x.y + 0.5, x.x + 3.0 * x.y};
                                      }}}});
    Field z = interpolate(sys, [](Vec2) -> Vec2 { return {0.0, 0.0}; });
    // Boundary carries the (nonzero) strong data; interior coefficients are 0.
    for (int d = 0; d < sys.n_velocity; ++d)
        if (!sys.constrained[d]) CHECK(z.coeffs[d] == 0.0);

    auto affine = [](Vec2 x) -> Vec2 {
        return {2.0 * x.x - x.y + 0.5, x.x + 3.0 * x.y};
    };
    Field u = interpolate(sys, affine);
    for (int t = 0; t < (int)m.triangles.size(); ++t) {
        Vec2 c = (1.0 / 3.0) * (m.vertices[m.triangles[t][0]] +
                                m.vertices[m.triangles[t][1]] +
                                m.vertices[m.triangles[t][2]]);
        Vec2 got = eval_velocity(sys, u, t, c);
        Vec2 want = affine(c);
        CHECK(got.x == doctest::Approx(want.x).epsilon(1e-12));
        CHECK(got.y == doctest::Approx(want.y).epsilon(1e-12));
    }
}

TEST_CASE("projection reproduces members of the space and zero") {
    Mesh m = periodic_square(4);
    FESystem sys = build_system(m, {});
    Field z = l2_project(sys, [](Vec2) -> Vec2 { return {0.0, 0.0}; });
    CHECK(z.coeffs.norm() == doctest::Approx(0.0));

    // An affine target lies in the P1 space: projection == interpolation.
    // (Use a periodic-compatible constant field on the torus.)
    auto constant = [](Vec2) -> Vec2 { return {0.7, -0.3}; };
    Field pi = l2_project(sys, constant);
    Field in = interpolate(sys, constant);
    CHECK((pi.coeffs - in.coeffs).lpNorm<Eigen::Infinity>() ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("projection error decreases at second order") {
    auto f = [](Vec2 x) -> Vec2 { return {std::sin(x.x), 0.0}; };
    auto fe = [&f](Vec2 x, double) { return f(x); };
    auto fg = [](Vec2 x, double) {
        Tensor2 g = Tensor2::zero(2);
        g(0, 0) = std::cos(x.x);
        return g;
    };
    std::vector<double> hs, errs;
    for (int n : {8, 16, 32}) {
        Mesh m = periodic_square(n);
        FESystem sys = build_system(m, {});
        Field u = l2_project(sys, f);
        auto [l2, h1] = error_norms(sys, u, fe, fg, 0.0);
        hs.push_back(2 * M_PI / n);
        errs.push_back(l2);
    }
    double slope = convergence_slope(hs, errs);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("gradient of an interpolated linear field is exact") {
    Mesh m = build_union_jack(2, 2, {0, 0, 1, 1});
    FESystem sys = build_system(m, {{BoundaryTag::WALL, {BcMode::NEUMANN, nullptr}}});
    Field u = interpolate(sys, [](Vec2 x) -> Vec2 { return {x.x, -x.y}; });
    for (int t = 0; t < (int)m.triangles.size(); ++t) {
        Tensor2 g = velocity_gradient(sys, u, t);
        CHECK(g(0, 0) == doctest::Approx(1.0));
        CHECK(g(1, 1) == doctest::Approx(-1.0));
        CHECK(g(0, 1) == doctest::Approx(0.0));
        CHECK(g(1, 0) == doctest::Approx(0.0));
    }
}

TEST_CASE("tri_geometry returns consistent area and barycentric gradients") {
    Mesh m;
    m.vertices = {{0, 0}, {2, 0}, {0, 3}};
    m.triangles = {{0, 1, 2}};
    m.macro_parent = {0};
    m.n_macro = 1;
    m.periodic_master = {0, 1, 2};
    TriGeom g = tri_geometry(m, 0);
    CHECK(g.area == doctest::Approx(3.0));
    // Sum of barycentric gradients is zero.
    CHECK(g.grad[0].x + g.grad[1].x + g.grad[2].x == doctest::Approx(0.0));
    CHECK(g.grad[0].y + g.grad[1].y + g.grad[2].y == doctest::Approx(0.0));
    // lambda_0 drops from 1 at (0,0); its gradient is (-1/2, -1/3).
    CHECK(g.grad[0].x == doctest::Approx(-0.5));
    CHECK(g.grad[0].y == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("time-dependent strong data is applied at the given time") {
    Mesh m = build_union_jack(1, 1, {0, 0, 1, 1});
    std::map<BoundaryTag, BcSpec> bc;
    bc[BoundaryTag::WALL] = {BcMode::STRONG_DIRICHLET,
                             [](Vec2, double t) -> Vec2 { return {t, 2.0 * t}; }};
    FESystem sys = build_system(m, bc);
    Field u = zero_velocity(sys);
    sys.apply_constraints(u, 3.0);
    for (const StrongConstraint& c : sys.constraints)
        CHECK(u.coeffs[c.dof] == doctest::Approx(c.comp == 0 ? 3.0 : 6.0));
}
