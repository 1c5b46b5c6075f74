#pragma once

#include <cstdint>
#include <string>

namespace smagfem {

enum class CaseId { SHEAR_LAYER, CYLINDER, MMS_NS, MMS_LINEAR };

enum class Linearization { PREVIOUS, EXTRAPOLATED };
enum class TangentialBcMode { STRONG, NITSCHE };

const char* to_string(CaseId id);
CaseId case_from_string(const std::string& s);

struct SimConfig {
    CaseId case_id = CaseId::SHEAR_LAYER;
    int resolution = 100;   // Union Jack cells per side / generator level
    std::string mesh_file;  // optional import, overrides the built-in recipe
    double mu = 0.0;
    double gamma = 0.0;
    double gamma0 = 0.0;
    double gamma1 = 0.0;
    double U = 1.0;
    double sigma = 4.0;  // linear model reaction coefficient
    double dt = 0.01;
    double t_end = 1.0;
    int output_every = 10;
    Linearization linearization = Linearization::PREVIOUS;
    TangentialBcMode tangential_bc = TangentialBcMode::STRONG;
    std::string out_dir = "out";
    uint64_t seed = 1;

    void validate() const;  // throws std::runtime_error naming the key
};

}  // namespace smagfem
