#include "smagfem/cases.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace smagfem {

const char* to_string(CaseId id) {
    switch (id) {
        case CaseId::SHEAR_LAYER: return "shear_layer";
        case CaseId::CYLINDER: return "cylinder";
        case CaseId::MMS_NS: return "mms_ns";
        case CaseId::MMS_LINEAR: return "mms_linear";
    }
    return "shear_layer";
}

CaseId case_from_string(const std::string& s) {
    if (s == "shear_layer") return CaseId::SHEAR_LAYER;
    if (s == "cylinder") return CaseId::CYLINDER;
    if (s == "mms_ns") return CaseId::MMS_NS;
    if (s == "mms_linear") return CaseId::MMS_LINEAR;
    throw std::runtime_error("unknown case '" + s + "'");
}

void SimConfig::validate() const {
    auto bad = [](const std::string& key, const std::string& why) {
        throw std::runtime_error("config key '" + key + "': " + why);
    };
    if (resolution < 1) bad("resolution", "must be >= 1");
    if (mu < 0.0) bad("mu", "must be >= 0");
    if (gamma < 0.0) bad("gamma", "must be >= 0");
    if (gamma0 < 0.0) bad("gamma0", "must be >= 0");
    if (gamma1 < 0.0) bad("gamma1", "must be >= 0");
    if (U <= 0.0) bad("U", "must be > 0");
    if (sigma <= 0.0) bad("sigma", "must be > 0");
    if (dt <= 0.0) bad("dt", "must be > 0");
    if (t_end < 0.0) bad("t_end", "must be >= 0");
    if (output_every < 1) bad("output_every", "must be >= 1");
}

SimConfig default_config(CaseId id) {
    SimConfig c;
    c.case_id = id;
    switch (id) {
        case CaseId::SHEAR_LAYER:
            c.resolution = 100;
            c.mu = 0.0;
            c.gamma = 0.0;
            c.dt = 0.01;
            c.t_end = 6.0;
            break;
        case CaseId::CYLINDER:
            c.resolution = 1;
            c.mu = 3e-4;
            c.gamma = 0.0;
            c.dt = 0.01;
            c.t_end = 10.0;
            break;
        case CaseId::MMS_NS:
            c.resolution = 16;
            c.mu = 1e-2;
            c.gamma = 1.0;
            c.dt = 0.01;
            c.t_end = 0.5;
            break;
        case CaseId::MMS_LINEAR:
            c.resolution = 16;
            c.gamma = 1.0;
            c.sigma = 4.0;
            c.t_end = 1.0;  // unused: steady problem
            break;
    }
    return c;
}

static constexpr double kPi = 3.14159265358979323846;

static std::shared_ptr<Mesh> load_mesh_file(const std::string& path, bool periodic);

static std::shared_ptr<Mesh> periodic_square_mesh(const SimConfig& config) {
    if (!config.mesh_file.empty()) return load_mesh_file(config.mesh_file, true);
    int n = config.resolution;
    Rect box{0.0, 0.0, 2.0 * kPi, 2.0 * kPi};
    Mesh m = build_union_jack(n, n, box);
    tag_rectangle_boundary(m, box, BoundaryTag::PERIODIC_X, BoundaryTag::PERIODIC_X,
                           BoundaryTag::PERIODIC_Y, BoundaryTag::PERIODIC_Y);
    return std::make_shared<Mesh>(build_periodicity(m, true, true));
}

static CaseSpec shear_layer_case(const SimConfig& config) {
    CaseSpec spec;
    spec.id = CaseId::SHEAR_LAYER;
    spec.mesh = periodic_square_mesh(config);
    double rho = kPi / 15.0;
    spec.initial = [rho](Vec2 x) -> Vec2 {
        double ux = (x.y <= kPi) ? std::tanh((x.y - kPi / 2.0) / rho)
                                 : std::tanh((3.0 * kPi / 2.0 - x.y) / rho);
        return {ux, 0.05 * std::sin(x.x)};
    };
    spec.project_initial = true;  // keep the discrete start divergence-free
    return spec;
}

static CaseSpec mms_ns_case(const SimConfig& config) {
    CaseSpec spec;
    spec.id = CaseId::MMS_NS;
    spec.mesh = periodic_square_mesh(config);
    spec.exact = [](Vec2 x, double t) -> Vec2 {
        double g = std::exp(-t / 4.0);
        return {g * std::cos(x.y), g * std::sin(x.x)};
    };
    spec.exact_grad = [](Vec2 x, double t) -> Tensor2 {
        double g = std::exp(-t / 4.0);
        Tensor2 J;
        J(0, 0) = 0.0;
        J(0, 1) = -g * std::sin(x.y);
        J(1, 0) = g * std::cos(x.x);
        J(1, 1) = 0.0;
        return J;
    };
    double mu = config.mu;
    spec.forcing = [mu](Vec2 x, double t) -> Vec2 {
        double g = std::exp(-t / 4.0);
        double ux = g * std::cos(x.y), uy = g * std::sin(x.x);
        // u_t + (u.grad)u - mu laplace(u), with laplace(u) = -u here.
        return {-0.25 * ux - g * g * std::sin(x.x) * std::sin(x.y) + mu * ux,
                -0.25 * uy + g * g * std::cos(x.x) * std::cos(x.y) + mu * uy};
    };
    auto ex = spec.exact;
    spec.initial = [ex](Vec2 x) { return ex(x, 0.0); };
    spec.project_initial = true;
    return spec;
}

static CaseSpec mms_linear_case(const SimConfig& config) {
    CaseSpec spec;
    spec.id = CaseId::MMS_LINEAR;
    spec.mesh = periodic_square_mesh(config);
    spec.beta = [](Vec2 x) -> Vec2 { return {std::cos(x.y), std::sin(x.x)}; };
    spec.exact = [](Vec2 x, double) -> Vec2 {
        return {std::cos(x.y + 1.0), std::sin(x.x + 1.0)};
    };
    spec.exact_grad = [](Vec2 x, double) -> Tensor2 {
        Tensor2 J;
        J(0, 0) = 0.0;
        J(0, 1) = -std::sin(x.y + 1.0);
        J(1, 0) = std::cos(x.x + 1.0);
        J(1, 1) = 0.0;
        return J;
    };
    double sigma = config.sigma;
    spec.forcing = [sigma](Vec2 x, double) -> Vec2 {
        // (beta.grad)u + sigma u
        return {-std::sin(x.x) * std::sin(x.y + 1.0) + sigma * std::cos(x.y + 1.0),
                std::cos(x.y) * std::cos(x.x + 1.0) + sigma * std::sin(x.x + 1.0)};
    };
    return spec;
}

static std::shared_ptr<Mesh> load_mesh_file(const std::string& path, bool periodic) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mesh file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    Mesh refined = macro_refine(import_mesh(text.str()));
    if (periodic) refined = build_periodicity(refined, true, true);
    return std::make_shared<Mesh>(refined);
}

static CaseSpec cylinder_case(const SimConfig& config) {
    CaseSpec spec;
    spec.id = CaseId::CYLINDER;
    if (!config.mesh_file.empty()) {
        spec.mesh = load_mesh_file(config.mesh_file, false);
    } else {
        spec.mesh = std::make_shared<Mesh>(build_cylinder_mesh(config.resolution));
    }
    auto inflow = [](Vec2 x, double) -> Vec2 {
        return {1.5 - 6.0 * x.y * x.y, 0.0};
    };
    auto zero = [](Vec2, double) -> Vec2 { return {0.0, 0.0}; };
    // Weak tangential enforcement is available on the straight channel
    // walls; the curved cylinder boundary always uses strong no-slip.
    BcMode wall_mode = config.tangential_bc == TangentialBcMode::NITSCHE
                           ? BcMode::NORMAL_ONLY
                           : BcMode::STRONG_DIRICHLET;
    spec.bc[BoundaryTag::INFLOW] = {BcMode::STRONG_DIRICHLET, inflow};
    spec.bc[BoundaryTag::WALL] = {wall_mode, zero};
    spec.bc[BoundaryTag::CYLINDER] = {BcMode::STRONG_DIRICHLET, zero};
    spec.bc[BoundaryTag::OUTFLOW] = {BcMode::NEUMANN, nullptr};
    // initial left null: run_simulation starts from a steady Stokes solve.
    return spec;
}

CaseSpec make_case(const SimConfig& config) {
    config.validate();
    switch (config.case_id) {
        case CaseId::SHEAR_LAYER: return shear_layer_case(config);
        case CaseId::CYLINDER: return cylinder_case(config);
        case CaseId::MMS_NS: return mms_ns_case(config);
        case CaseId::MMS_LINEAR: return mms_linear_case(config);
    }
    throw std::runtime_error("unknown case id");
}

// ---------------------------------------------------------------------------
// Channel-with-cylinder generator.
//
// Background grid on (-1/2,2)x(-1/2,1/2) with square cells of size
// 1/(16*level); the 1/2 x 1/2 square centered on the origin is replaced by
// a boundary-fitted ring of quads blending the circle of radius 1/10 into
// the square outline, whose outer nodes coincide with grid nodes. Every
// quad becomes a criss-cross macro, matching the structured element pair.
// ---------------------------------------------------------------------------

Mesh build_cylinder_mesh(int level) {
    if (level < 1) throw std::runtime_error("cylinder mesh level must be >= 1");
    const int L = level;
    const double hc = 0.0625 / L;
    const int nx = 40 * L, ny = 16 * L;
    const double x0 = -0.5, y0 = -0.5;
    // Hole cell range [hole_lo, hole_hi) in both directions.
    const int hole_lo = 4 * L, hole_hi = 12 * L;
    const int mid = 8 * L;

    std::vector<Vec2> verts;
    std::vector<std::array<int, 4>> quads;
    std::map<std::pair<int, int>, BoundaryTag> tags;
    auto tag_edge = [&](int a, int b, BoundaryTag t) { tags[std::minmax(a, b)] = t; };

    auto grid_pt = [&](int i, int j) -> Vec2 { return {x0 + i * hc, y0 + j * hc}; };
    auto in_hole_interior = [&](int i, int j) {
        return i > hole_lo && i < hole_hi && j > hole_lo && j < hole_hi;
    };

    // Grid vertices (hole interior excluded). Interior nodes carry a
    // deterministic jitter so the mesh is unstructured rather than
    // symmetric about y = 0; a symmetric grid would lock the antisymmetric
    // wake modes down to round-off level. Boundary nodes and the hole
    // outline (shared with the ring) stay on the lattice.
    std::mt19937 jitter_rng(9157u);
    std::uniform_real_distribution<double> jitter(-0.12 * hc, 0.12 * hc);
    auto on_hole_outline = [&](int i, int j) {
        return i >= hole_lo && i <= hole_hi && j >= hole_lo && j <= hole_hi &&
               !in_hole_interior(i, j);
    };
    std::vector<int> gid((nx + 1) * (ny + 1), -1);
    auto gref = [&](int i, int j) -> int& { return gid[i * (ny + 1) + j]; };
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= ny; ++j) {
            if (in_hole_interior(i, j)) continue;
            Vec2 p = grid_pt(i, j);
            double dx = jitter(jitter_rng), dy = jitter(jitter_rng);
            if (i > 0 && i < nx && j > 0 && j < ny && !on_hole_outline(i, j))
                p = p + Vec2{dx, dy};
            gref(i, j) = (int)verts.size();
            verts.push_back(p);
        }

    // Square perimeter nodes, counterclockwise from (1/4, 0).
    std::vector<std::pair<int, int>> perim;
    for (int j = mid; j < hole_hi; ++j) perim.push_back({hole_hi, j});
    for (int i = hole_hi; i > hole_lo; --i) perim.push_back({i, hole_hi});
    for (int j = hole_hi; j > hole_lo; --j) perim.push_back({hole_lo, j});
    for (int i = hole_lo; i < hole_hi; ++i) perim.push_back({i, hole_lo});
    for (int j = hole_lo; j < mid; ++j) perim.push_back({hole_hi, j});
    const int M = (int)perim.size();  // 32 * level

    // Ring nodes: layer 0 on the circle, layer LR on the square (grid
    // nodes). Radial spacing is graded toward the cylinder to resolve the
    // boundary layer and wake shear.
    const int LR = 6 * L;
    const double radius = 0.1;
    std::vector<int> ring(M * LR, -1);
    for (int m = 0; m < M; ++m) {
        Vec2 s = grid_pt(perim[m].first, perim[m].second);
        double phi = std::atan2(s.y, s.x);
        Vec2 c{radius * std::cos(phi), radius * std::sin(phi)};
        for (int jr = 0; jr < LR; ++jr) {
            double a = std::pow((double)jr / LR, 1.8);
            ring[m * LR + jr] = (int)verts.size();
            verts.push_back({c.x + a * (s.x - c.x), c.y + a * (s.y - c.y)});
        }
    }
    auto ring_node = [&](int m, int jr) -> int {
        m %= M;
        if (jr == LR) return gref(perim[m].first, perim[m].second);
        return ring[m * LR + jr];
    };

    // Background cells (CCW).
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            if (i >= hole_lo && i < hole_hi && j >= hole_lo && j < hole_hi) continue;
            quads.push_back({gref(i, j), gref(i + 1, j), gref(i + 1, j + 1), gref(i, j + 1)});
        }

    // Ring cells (CCW: outward first, then along the outer layer).
    for (int m = 0; m < M; ++m)
        for (int jr = 0; jr < LR; ++jr)
            quads.push_back({ring_node(m, jr), ring_node(m, jr + 1),
                             ring_node(m + 1, jr + 1), ring_node(m + 1, jr)});

    // Boundary edges.
    for (int j = 0; j < ny; ++j) {
        tag_edge(gref(0, j), gref(0, j + 1), BoundaryTag::INFLOW);
        tag_edge(gref(nx, j), gref(nx, j + 1), BoundaryTag::OUTFLOW);
    }
    for (int i = 0; i < nx; ++i) {
        tag_edge(gref(i, 0), gref(i + 1, 0), BoundaryTag::WALL);
        tag_edge(gref(i, ny), gref(i + 1, ny), BoundaryTag::WALL);
    }
    for (int m = 0; m < M; ++m)
        tag_edge(ring_node(m, 0), ring_node(m + 1, 0), BoundaryTag::CYLINDER);

    return mesh_from_quads(std::move(verts), quads, tags);
}

}  // namespace smagfem
