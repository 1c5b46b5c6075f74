#pragma once

// Output writers: legacy ASCII VTK snapshots and CSV time series. Both are
// byte-stable for identical inputs and written atomically (temp file +
// rename).

#include <string>

#include "smagfem/diagnostics.hpp"

namespace smagfem {

struct VtkFields {
    const FESystem* system = nullptr;  // required when velocity is given
    const Field* velocity = nullptr;   // point vectors
    const Field* vorticity = nullptr;  // element scalars
    const Field* pressure = nullptr;   // macro scalars, repeated per sub-cell
};

void write_vtk(const std::string& path, const Mesh& mesh,
               const VtkFields& fields = {});

// Header `t,energy,max_vorticity,div_weak,div_pointwise,stab_seminorm,flag`
// plus one row per report entry, floats at 17 significant digits.
void write_timeseries(const std::string& path, const RunReport& report);

// Shared atomic text-file write.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace smagfem
