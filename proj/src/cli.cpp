#include "smagfem/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "smagfem/io.hpp"
#include "smagfem/solver.hpp"

namespace smagfem {

// ---------------------------------------------------------------------------
// Config text.
// ---------------------------------------------------------------------------

namespace {

struct KeyValue {
    std::string key, value;
    int line;
};

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<KeyValue> tokenize_config(const std::string& text) {
    std::vector<KeyValue> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string body = trim(line);
        if (body.empty()) continue;
        size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected 'key = value'");
        KeyValue kv{trim(body.substr(0, eq)), trim(body.substr(eq + 1)), lineno};
        if (kv.key.empty() || kv.value.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": empty key or value");
        out.push_back(kv);
    }
    return out;
}

[[noreturn]] void key_error(const KeyValue& kv, const std::string& why) {
    throw std::runtime_error("config key '" + kv.key + "' (line " +
                             std::to_string(kv.line) + "): " + why);
}

double parse_double(const KeyValue& kv) {
    try {
        size_t pos = 0;
        double v = std::stod(kv.value, &pos);
        if (pos != kv.value.size()) throw std::invalid_argument("trailing text");
        return v;
    } catch (const std::exception&) {
        key_error(kv, "not a number: '" + kv.value + "'");
    }
}

long parse_int(const KeyValue& kv) {
    try {
        size_t pos = 0;
        long v = std::stol(kv.value, &pos);
        if (pos != kv.value.size()) throw std::invalid_argument("trailing text");
        return v;
    } catch (const std::exception&) {
        key_error(kv, "not an integer: '" + kv.value + "'");
    }
}

}  // namespace

SimConfig parse_config(const std::string& text) {
    auto kvs = tokenize_config(text);

    CaseId id = CaseId::SHEAR_LAYER;
    for (const auto& kv : kvs)
        if (kv.key == "case") {
            try {
                id = case_from_string(kv.value);
            } catch (const std::exception& e) {
                key_error(kv, e.what());
            }
        }
    SimConfig config = default_config(id);

    for (const auto& kv : kvs) {
        const std::string& k = kv.key;
        if (k == "case") continue;  // handled above
        else if (k == "resolution") config.resolution = (int)parse_int(kv);
        else if (k == "mesh_file") config.mesh_file = kv.value;
        else if (k == "mu") config.mu = parse_double(kv);
        else if (k == "gamma") config.gamma = parse_double(kv);
        else if (k == "gamma0") config.gamma0 = parse_double(kv);
        else if (k == "gamma1") config.gamma1 = parse_double(kv);
        else if (k == "U") config.U = parse_double(kv);
        else if (k == "sigma") config.sigma = parse_double(kv);
        else if (k == "dt") config.dt = parse_double(kv);
        else if (k == "t_end") config.t_end = parse_double(kv);
        else if (k == "output_every") config.output_every = (int)parse_int(kv);
        else if (k == "out_dir") config.out_dir = kv.value;
        else if (k == "seed") config.seed = (uint64_t)parse_int(kv);
        else if (k == "linearization") {
            if (kv.value == "previous") config.linearization = Linearization::PREVIOUS;
            else if (kv.value == "extrapolated")
                config.linearization = Linearization::EXTRAPOLATED;
            else key_error(kv, "expected 'previous' or 'extrapolated'");
        } else if (k == "tangential_bc") {
            if (kv.value == "strong") config.tangential_bc = TangentialBcMode::STRONG;
            else if (kv.value == "nitsche")
                config.tangential_bc = TangentialBcMode::NITSCHE;
            else key_error(kv, "expected 'strong' or 'nitsche'");
        } else {
            key_error(kv, "unknown key");
        }
    }
    try {
        config.validate();
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string(e.what()) + " (in config text)");
    }
    return config;
}

std::string serialize_config(const SimConfig& c) {
    std::ostringstream out;
    out.precision(17);
    out << "case = " << to_string(c.case_id) << "\n"
        << "resolution = " << c.resolution << "\n";
    if (!c.mesh_file.empty()) out << "mesh_file = " << c.mesh_file << "\n";
    out << "mu = " << c.mu << "\n"
        << "gamma = " << c.gamma << "\n"
        << "gamma0 = " << c.gamma0 << "\n"
        << "gamma1 = " << c.gamma1 << "\n"
        << "U = " << c.U << "\n"
        << "sigma = " << c.sigma << "\n"
        << "dt = " << c.dt << "\n"
        << "t_end = " << c.t_end << "\n"
        << "output_every = " << c.output_every << "\n"
        << "linearization = "
        << (c.linearization == Linearization::PREVIOUS ? "previous" : "extrapolated")
        << "\n"
        << "tangential_bc = "
        << (c.tangential_bc == TangentialBcMode::STRONG ? "strong" : "nitsche")
        << "\n"
        << "out_dir = " << c.out_dir << "\n"
        << "seed = " << c.seed << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Convergence study.
// ---------------------------------------------------------------------------

ConvergenceResult run_convergence(const SimConfig& base, int levels,
                                  std::ostream* log) {
    if (base.case_id != CaseId::MMS_LINEAR && base.case_id != CaseId::MMS_NS)
        throw std::runtime_error("convergence study requires a manufactured case");
    if (levels < 2) throw std::runtime_error("convergence study needs >= 2 levels");

    const double two_pi = 2.0 * 3.14159265358979323846;
    ConvergenceResult result;
    if (log) *log << "level  n      h             L2 error       H1 error\n";
    for (int lvl = 0; lvl < levels; ++lvl) {
        int n = 8 << lvl;
        double h = two_pi / n;
        SimConfig cfg = base;
        cfg.resolution = n;
        if (cfg.case_id == CaseId::MMS_NS) {
            cfg.mu = std::min(base.mu, base.U * h);
            int n_steps = std::max(2, (int)std::llround(base.t_end / (0.1 * h)));
            cfg.dt = base.t_end / n_steps;
            cfg.output_every = n_steps;  // record start and end only
        }
        RunResult run = run_simulation(cfg);
        double t_final = cfg.case_id == CaseId::MMS_NS ? base.t_end : 0.0;
        auto [l2, h1] = error_norms(run.system, run.u, run.spec.exact,
                                    run.spec.exact_grad, t_final);
        result.hs.push_back(h);
        result.l2_errors.push_back(l2);
        result.h1_errors.push_back(h1);
        if (log) {
            std::ostringstream row;
            row.precision(6);
            row << lvl << "      " << n << "  " << std::scientific << h << "  "
                << l2 << "  " << h1 << "\n";
            *log << row.str();
        }
    }
    result.l2_slope = convergence_slope(result.hs, result.l2_errors);
    if (log) *log << "L2 slope: " << result.l2_slope << "\n";
    return result;
}

// ---------------------------------------------------------------------------
// Property suites behind `validate`.
// ---------------------------------------------------------------------------

namespace {

int run_validation(std::ostream& out, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-10.0, 10.0);
    auto random_tensor = [&](int d) {
        Tensor2 t = Tensor2::zero(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) t(i, j) = unif(rng);
        return t;
    };

    int failures = 0;
    const int n_pairs = 100000;
    int bad_mono = 0, bad_cont = 0;
    for (int i = 0; i < n_pairs; ++i) {
        int d = (i % 2) ? 3 : 2;
        Tensor2 x = random_tensor(d), z = random_tensor(d);
        double tol = cubic_roundoff_scale(x, z);
        if (monotonicity_residual(x, z) < -tol) ++bad_mono;
        if (continuity_gap(x, z) < -tol) ++bad_cont;
    }
    out << "monotonicity: " << (n_pairs - bad_mono) << "/" << n_pairs << " ok\n";
    out << "continuity:   " << (n_pairs - bad_cont) << "/" << n_pairs << " ok\n";
    failures += bad_mono + bad_cont;

    int bad_curl = 0;
    for (int i = 0; i < 100; ++i) {
        AffineField3 beta, v;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                beta.jac(r, c) = unif(rng);
                v.jac(r, c) = unif(rng);
            }
        beta.value0 = {unif(rng), unif(rng), unif(rng)};
        v.value0 = {unif(rng), unif(rng), unif(rng)};
        if (curl_advection_identity_residual(beta, v) > 1e-12 * 100.0 * 100.0)
            ++bad_curl;
    }
    out << "curl-advection identity: " << (100 - bad_curl) << "/100 ok\n";
    failures += bad_curl;

    out << (failures == 0 ? "validate: PASS\n" : "validate: FAIL\n");
    return failures == 0 ? 0 : 1;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

std::string zero_pad(int v, int width) {
    std::string s = std::to_string(v);
    while ((int)s.size() < width) s.insert(s.begin(), '0');
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Entry point.
// ---------------------------------------------------------------------------

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Stabilized incompressible flow solver on macro elements"};
    app.require_subcommand(1);

    std::string config_path, case_name, out_dir;
    int levels = 4, threads = 1;
    bool deterministic = false;
    app.add_option("--threads", threads, "assembly worker threads");
    app.add_flag("--deterministic", deterministic,
                 "force single-threaded, bit-stable execution");

    auto* cmd_run = app.add_subcommand("run", "run one simulation");
    cmd_run->add_option("--config", config_path, "config file path");
    cmd_run->add_option("--case", case_name, "built-in case id");
    cmd_run->add_option("--out", out_dir, "output directory");

    auto* cmd_conv = app.add_subcommand("converge", "mesh-sequence study");
    cmd_conv->add_option("--config", config_path, "config file path");
    cmd_conv->add_option("--case", case_name, "mms_linear or mms_ns");
    cmd_conv->add_option("--levels", levels, "number of mesh levels");
    cmd_conv->add_option("--out", out_dir, "output directory");

    auto* cmd_val = app.add_subcommand("validate", "run the property suites");
    auto* cmd_info = app.add_subcommand("info", "list the built-in cases");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    set_assembly_threads(deterministic ? 1 : threads);

    try {
        if (cmd_info->parsed()) {
            std::cout << "shear_layer  doubly periodic double shear layer, (0,2pi)^2\n"
                      << "cylinder     channel flow past a circular cylinder\n"
                      << "mms_ns       manufactured solution, evolving scheme\n"
                      << "mms_linear   manufactured solution, steady linear model\n";
            return 0;
        }
        if (cmd_val->parsed()) return run_validation(std::cout, 42);

        SimConfig config;
        if (!config_path.empty()) config = parse_config(read_file(config_path));
        else if (!case_name.empty())
            config = default_config(case_from_string(case_name));
        else if (cmd_run->parsed())
            config = default_config(CaseId::SHEAR_LAYER);
        else
            config = default_config(CaseId::MMS_LINEAR);
        if (!case_name.empty() && config_path.empty())
            config.case_id = case_from_string(case_name);
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (const char* env = std::getenv("SMAGFEM_OUT")) config.out_dir = env;

        if (cmd_conv->parsed()) {
            ConvergenceResult res = run_convergence(config, levels, &std::cout);
            std::ostringstream csv;
            csv << "h,l2_error,h1_error\n";
            char buf[128];
            for (size_t i = 0; i < res.hs.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", res.hs[i],
                              res.l2_errors[i], res.h1_errors[i]);
                csv << buf;
            }
            write_file_atomic(config.out_dir + "/convergence.csv", csv.str());
            return 0;
        }

        // run
        OutputHook hook = [&](int step, double, const FESystem& system,
                              const Field& u, const Field& p) {
            Field w = vorticity(system, u);
            VtkFields fields;
            fields.system = &system;
            fields.velocity = &u;
            fields.vorticity = &w;
            fields.pressure = &p;
            write_vtk(config.out_dir + "/fields_" + zero_pad(step, 6) + ".vtk",
                      *system.mesh, fields);
        };
        RunResult result = run_simulation(config, hook);
        write_timeseries(config.out_dir + "/timeseries.csv", result.report);
        if (result.report.instability) {
            std::cout << "instability detected at t = "
                      << result.report.instability_time << "\n";
            return 1;
        }
        std::cout << "completed " << result.report.rows.size()
                  << " recorded steps, wall time " << result.report.wall_time_s
                  << " s\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace smagfem
