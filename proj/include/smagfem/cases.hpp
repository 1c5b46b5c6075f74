#pragma once

// Built-in problem setups: the doubly periodic shear layer, the channel
// flow past a cylinder, and two manufactured solutions used by the
// convergence studies (one for the full scheme, one for the steady linear
// transport model).

#include <map>
#include <memory>

#include "smagfem/config.hpp"
#include "smagfem/diagnostics.hpp"

namespace smagfem {

struct CaseSpec {
    CaseId id = CaseId::SHEAR_LAYER;
    std::shared_ptr<Mesh> mesh;
    std::map<BoundaryTag, BcSpec> bc;
    std::function<Vec2(Vec2)> initial;  // null: start from a Stokes solve
    bool project_initial = false;       // L2-project instead of interpolate
    ForcingFn forcing;                  // null: zero
    // Manufactured reference solution (null for the benchmark cases).
    ExactVelocity exact;
    ExactGradient exact_grad;
    // Advecting field of the steady linear model (MMS_LINEAR only).
    std::function<Vec2(Vec2)> beta;
};

// Build the mesh, boundary conditions and data for config.case_id at the
// configured resolution. Throws std::runtime_error on invalid settings.
CaseSpec make_case(const SimConfig& config);

// Per-case default parameters (resolution, mu, gamma, dt, t_end, ...).
SimConfig default_config(CaseId id);

// Channel-with-cylinder mesh as criss-cross quad macros: background grid of
// cell size 1/16/level with a boundary-fitted ring of 32*level segments
// around the cylinder.
Mesh build_cylinder_mesh(int level);

}  // namespace smagfem
