#include "smagfem/quadrature.hpp"

namespace smagfem {

std::span<const TriQuadPoint> tri_rule_deg2() {
    static const TriQuadPoint pts[3] = {
        {0.5, 0.5, 0.0, 1.0 / 3.0},
        {0.0, 0.5, 0.5, 1.0 / 3.0},
        {0.5, 0.0, 0.5, 1.0 / 3.0},
    };
    return pts;
}

std::span<const TriQuadPoint> tri_rule_deg4() {
    constexpr double a1 = 0.445948490915965;
    constexpr double w1 = 0.223381589678011;
    constexpr double a2 = 0.091576213509771;
    constexpr double w2 = 0.109951743655322;
    static const TriQuadPoint pts[6] = {
        {a1, a1, 1 - 2 * a1, w1},
        {a1, 1 - 2 * a1, a1, w1},
        {1 - 2 * a1, a1, a1, w1},
        {a2, a2, 1 - 2 * a2, w2},
        {a2, 1 - 2 * a2, a2, w2},
        {1 - 2 * a2, a2, a2, w2},
    };
    return pts;
}

std::span<const EdgeQuadPoint> edge_rule_2() {
    constexpr double d = 0.28867513459481287;  // 1/(2 sqrt 3)
    static const EdgeQuadPoint pts[2] = {
        {0.5 - d, 0.5},
        {0.5 + d, 0.5},
    };
    return pts;
}

}  // namespace smagfem
