#include "smagfem/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace smagfem {

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "'");
        out << content;
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

static std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_vtk(const std::string& path, const Mesh& mesh, const VtkFields& f) {
    if (f.velocity && !f.system)
        throw std::runtime_error("write_vtk: velocity output needs the FE system");

    std::ostringstream out;
    out << "# vtk DataFile Version 3.0\n"
        << "smagfem snapshot\n"
        << "ASCII\n"
        << "DATASET UNSTRUCTURED_GRID\n";

    const int nv = (int)mesh.vertices.size();
    const int nt = (int)mesh.triangles.size();
    out << "POINTS " << nv << " double\n";
    for (const Vec2& p : mesh.vertices)
        out << fmt(p.x) << " " << fmt(p.y) << " 0\n";

    out << "CELLS " << nt << " " << 4 * nt << "\n";
    for (const auto& t : mesh.triangles)
        out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    out << "CELL_TYPES " << nt << "\n";
    for (int t = 0; t < nt; ++t) out << "5\n";

    if (f.velocity) {
        out << "POINT_DATA " << nv << "\n";
        out << "VECTORS velocity double\n";
        for (int v = 0; v < nv; ++v) {
            int d = f.system->dof(v, 0);
            out << fmt(f.velocity->coeffs[d]) << " " << fmt(f.velocity->coeffs[d + 1])
                << " 0\n";
        }
    }

    bool cell_header = false;
    auto cell_data = [&]() {
        if (!cell_header) {
            out << "CELL_DATA " << nt << "\n";
            cell_header = true;
        }
    };
    if (f.vorticity) {
        cell_data();
        out << "SCALARS vorticity double 1\nLOOKUP_TABLE default\n";
        for (int t = 0; t < nt; ++t) out << fmt(f.vorticity->coeffs[t]) << "\n";
    }
    if (f.pressure) {
        cell_data();
        out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
        for (int t = 0; t < nt; ++t)
            out << fmt(f.pressure->coeffs[mesh.macro_parent[t]]) << "\n";
    }

    write_file_atomic(path, out.str());
}

void write_timeseries(const std::string& path, const RunReport& report) {
    std::ostringstream out;
    out << "t,energy,max_vorticity,div_weak,div_pointwise,stab_seminorm,flag\n";
    for (const ReportRow& r : report.rows) {
        out << fmt(r.t) << "," << fmt(r.energy) << "," << fmt(r.max_vorticity)
            << "," << fmt(r.div_weak) << "," << fmt(r.div_pointwise) << ","
            << fmt(r.stab_seminorm) << ","
            << (r.flag == RunFlag::INSTABILITY ? "INSTABILITY" : "OK") << "\n";
    }
    write_file_atomic(path, out.str());
}

}  // namespace smagfem
