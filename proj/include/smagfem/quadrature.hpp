#pragma once

#include <span>

namespace smagfem {

// Barycentric quadrature point on the reference triangle; weights sum to 1
// and are scaled by the element area at use sites.
struct TriQuadPoint {
    double b0, b1, b2, w;
};

// Degree-2 exact (3 edge midpoints): assembly of bilinear forms with P1
// arguments and piecewise-constant coefficients.
std::span<const TriQuadPoint> tri_rule_deg2();

// Degree-4 exact (6-point Dunavant): nonlinear terms and error norms.
std::span<const TriQuadPoint> tri_rule_deg4();

// Gauss point on an edge parametrized by s in (0,1); weights sum to 1.
struct EdgeQuadPoint {
    double s, w;
};

std::span<const EdgeQuadPoint> edge_rule_2();

}  // namespace smagfem
