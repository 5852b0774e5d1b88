#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "nbfem/experiments.hpp"
#include "nbfem/postprocess.hpp"

namespace nbfem {

// One run description. Zero/empty members mean "use the preset default".
struct RunConfig {
    std::string preset = "circle";
    int level_min = 2;
    int level_max = 6;
    double gamma = 0.0;           // 0 -> preset default
    std::string mode;             // "exact" | "zero" | "" (preset default)
    int order = 0;                // 0 -> preset default
    int volume_degree = 0;        // 0 -> 2 * order
    int trace_degree = 0;         // 0 -> 2 * order + 2
    double cg_tol = 1e-12;
    std::int64_t cg_max_iter = 0; // 0 -> 50 sqrt(n) + 1000
    std::int64_t cell_cap = 1'000'000'000;
    std::int64_t subdiv_cap = 1'000'000;
    int threads = 0;              // 0 -> NBFEM_THREADS or hardware
    std::string csv_path;
    bool write_vtk = false;
    std::string vtk_path;
};

// Loads a config from a JSON file; unknown keys are rejected.
RunConfig load_config_file(const std::string& path);

// Resolved settings of a run after preset defaults are applied.
struct ResolvedConfig {
    RunConfig raw;
    int dim = 2;
    double gamma = 1.0;
    CoefficientMode mode = CoefficientMode::ExactHessian;
    int order = 1;
    int volume_degree = 2;
    int trace_degree = 4;
    int threads = 1;
};

// Applies preset defaults and checks the whole configuration up front:
// preset name, level range, (dim, order) support, band admissibility at
// every level, quadrature degrees. Throws ConfigError on any violation.
ResolvedConfig validate_config(const RunConfig& config);

struct SingleResult {
    LevelRow row;
    double residual_oracle = 0.0;
};

// Convergence sweep over the configured levels; one row per level. Writes
// the CSV file when requested. Throws NotConverged if any level's solver
// fails, EmptyBand/ResourceLimit/ConfigError as appropriate.
ConvergenceReport run_convergence(const RunConfig& config);

// Solves a single level, optionally writing the VTK dump.
SingleResult run_single(const RunConfig& config, int level);

// Residual of the preset's manufactured data under the finite-difference
// surface Laplacian; small values certify the (u, f) pair.
double validate_preset(const std::string& preset_name, int samples = 1000);

// Measure of the discrete surface at one level (geometry only, no solve).
double discrete_surface_measure_at(const RunConfig& config, int level);

// Surrogate subdivision used at a level: ceil((h0 / h)^(q-1)) with h0 = 0.1.
int surrogate_subdivision(int geometry_order, double h);

} // namespace nbfem
