#include "nbfem/driver.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>

#include <nlohmann/json.hpp>

#include "nbfem/cutgeom.hpp"
#include "nbfem/fem.hpp"
#include "nbfem/linalg.hpp"
#include "nbfem/parallel.hpp"

namespace nbfem {

namespace {

int preset_dim(const std::string& name) {
    if (name == "circle" || name == "circle-p2" || name == "circle-p3") return 2;
    if (name == "sphere" || name == "torus") return 3;
    throw ConfigError("unknown preset '" + name +
                      "' (expected circle|sphere|torus|circle-p2|circle-p3)");
}

Preset<2> make_preset2(const std::string& name) {
    if (name == "circle") return preset_circle();
    if (name == "circle-p2") return preset_circle_highorder(2);
    return preset_circle_highorder(3);
}

Preset<3> make_preset3(const std::string& name) {
    return name == "sphere" ? preset_sphere() : preset_torus();
}

double h_law(int dim, int level) {
    return (dim == 2 ? 0.1 : 0.2) * std::pow(2.0, -level);
}

template <int Dim>
double preset_curvature_bound(const std::string& name) {
    if constexpr (Dim == 2) {
        return make_preset2(name).surface.curvature_bound();
    } else {
        return make_preset3(name).surface.curvature_bound();
    }
}

std::vector<std::pair<std::string, std::string>> config_echo(const ResolvedConfig& rc) {
    char buf[64];
    std::vector<std::pair<std::string, std::string>> echo;
    echo.emplace_back("preset", rc.raw.preset);
    echo.emplace_back("levels",
                      std::to_string(rc.raw.level_min) + ".." + std::to_string(rc.raw.level_max));
    std::snprintf(buf, sizeof buf, "%g", rc.gamma);
    echo.emplace_back("gamma", buf);
    echo.emplace_back("mode", rc.mode == CoefficientMode::ExactHessian ? "exact" : "zero");
    echo.emplace_back("order", std::to_string(rc.order));
    echo.emplace_back("volume_degree", std::to_string(rc.volume_degree));
    echo.emplace_back("trace_degree", std::to_string(rc.trace_degree));
    std::snprintf(buf, sizeof buf, "%g", rc.raw.cg_tol);
    echo.emplace_back("cg_tol", buf);
    echo.emplace_back("threads", std::to_string(rc.threads));
    return echo;
}

} // namespace

int surrogate_subdivision(int geometry_order, double h) {
    if (geometry_order <= 1) return 1;
    const double ratio = 0.1 / h;
    return std::max(1, static_cast<int>(std::llround(std::pow(ratio, geometry_order - 1))));
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid JSON in '" + path + "': " + e.what());
    }
    RunConfig c;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "preset") c.preset = value.get<std::string>();
            else if (key == "level_min") c.level_min = value.get<int>();
            else if (key == "level_max") c.level_max = value.get<int>();
            else if (key == "gamma") c.gamma = value.get<double>();
            else if (key == "mode") c.mode = value.get<std::string>();
            else if (key == "order") c.order = value.get<int>();
            else if (key == "volume_degree") c.volume_degree = value.get<int>();
            else if (key == "trace_degree") c.trace_degree = value.get<int>();
            else if (key == "cg_tol") c.cg_tol = value.get<double>();
            else if (key == "cg_max_iter") c.cg_max_iter = value.get<std::int64_t>();
            else if (key == "cell_cap") c.cell_cap = value.get<std::int64_t>();
            else if (key == "subdiv_cap") c.subdiv_cap = value.get<std::int64_t>();
            else if (key == "threads") c.threads = value.get<int>();
            else if (key == "csv") c.csv_path = value.get<std::string>();
            else if (key == "vtk") c.write_vtk = value.get<bool>();
            else if (key == "vtk_path") c.vtk_path = value.get<std::string>();
            else throw ConfigError("unknown config key '" + key + "'");
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("bad value for config key '" + key + "': " + e.what());
        }
    }
    return c;
}

ResolvedConfig validate_config(const RunConfig& config) {
    ResolvedConfig rc;
    rc.raw = config;
    rc.dim = preset_dim(config.preset);

    if (config.level_min < 0 || config.level_max < config.level_min || config.level_max > 30) {
        throw ConfigError("invalid level range");
    }

    int default_order = 1;
    double default_gamma = 1.0;
    CoefficientMode default_mode = CoefficientMode::ExactHessian;
    double curvature = 1.0;
    if (rc.dim == 2) {
        const auto p = make_preset2(config.preset);
        default_order = p.default_order;
        default_gamma = p.default_gamma;
        default_mode = p.default_mode;
        curvature = p.surface.curvature_bound();
    } else {
        const auto p = make_preset3(config.preset);
        default_order = p.default_order;
        default_gamma = p.default_gamma;
        default_mode = p.default_mode;
        curvature = p.surface.curvature_bound();
    }

    rc.order = config.order > 0 ? config.order : default_order;
    if (rc.order < 1 || rc.order > 3) throw ConfigError("element order must be 1, 2, or 3");
    if (rc.dim == 3 && rc.order != 1) {
        throw ConfigError("element order > 1 is supported in 2D only");
    }

    rc.gamma = config.gamma > 0.0 ? config.gamma : default_gamma;
    rc.mode = config.mode.empty() ? default_mode : parse_coefficient_mode(config.mode);

    rc.volume_degree = config.volume_degree > 0 ? config.volume_degree : 2 * rc.order;
    if (rc.volume_degree < 1 || rc.volume_degree > 6) {
        throw ConfigError("volume quadrature degree must be in [1, 6]");
    }
    rc.trace_degree = config.trace_degree > 0 ? config.trace_degree : 2 * rc.order + 2;
    if (rc.trace_degree < 1 || rc.trace_degree > 9) {
        throw ConfigError("trace quadrature degree must be in [1, 9]");
    }

    if (!(config.cg_tol > 0.0)) throw ConfigError("cg tolerance must be positive");
    rc.threads = config.threads > 0 ? config.threads : default_thread_count();

    // Band admissibility at every level; the coarsest level is the binding one.
    for (int level = config.level_min; level <= config.level_max; ++level) {
        const double d = rc.gamma * h_law(rc.dim, level);
        if (!(d * curvature <= 0.5 * (1.0 + 1e-9))) {
            throw ConfigError("band half-width d=" + std::to_string(d) + " at level " +
                              std::to_string(level) +
                              " violates d * K <= 1/2 for curvature bound K=" +
                              std::to_string(curvature));
        }
    }
    return rc;
}

namespace {

template <int Dim>
LevelRow solve_level(const Preset<Dim>& preset, const ResolvedConfig& rc, int level,
                     bool write_vtk, const std::string& vtk_path) {
    const auto t0 = std::chrono::steady_clock::now();

    const auto mesh = std::make_unique<BackgroundMesh<Dim>>(build_background_mesh<Dim>(level, rc.raw.cell_cap));
    const BandSpec band = BandSpec::make(preset.surface, rc.gamma, mesh->h());
    const Surface<Dim>& surface = preset.surface;
    InterpolatedLevelSet<Dim> phi_h(
        *mesh, [&surface](const Vec<Dim>& x) { return surface.signed_distance(x); }, rc.order);

    const int m = surrogate_subdivision(rc.order, mesh->h());
    if (std::int64_t(m) * m > rc.raw.subdiv_cap) {
        throw ResourceLimit("surrogate subdivision " + std::to_string(m) +
                            "^2 exceeds the cap at level " + std::to_string(level));
    }
    const ActiveMesh<Dim> active = select_active_cells(*mesh, phi_h, band.d, m);
    const FeSpace<Dim> space = build_space(active, rc.order);
    const CutGeometry<Dim> geom(active, rc.volume_degree, rc.trace_degree);

    auto sys = assemble(space, surface, rc.mode, preset.alpha, preset.f, geom, rc.threads);
    auto [solution, stats] =
        cg_solve(sys.matrix, sys.rhs, rc.raw.cg_tol, rc.raw.cg_max_iter, Preconditioner::Jacobi,
                 rc.threads);
    if (!stats.converged) {
        throw NotConverged("conjugate gradients stalled at level " + std::to_string(level) +
                           " (relative residual " + std::to_string(stats.rel_residual) + ")");
    }

    LevelRow row;
    row.level = level;
    row.h = mesh->h();
    row.d = band.d;
    row.dofs = space.ndof();
    row.norms = surface_errors<Dim>(solution, space, geom, surface, preset.u, preset.grad_u,
                                    rc.threads);
    row.norms.h1_band =
        band_h1_error<Dim>(solution, space, geom, surface, preset.u, preset.grad_u, rc.threads);
    row.stats = stats;
    row.surface_measure = discrete_surface_measure(geom, rc.threads);

    if (write_vtk) {
        export_vtk<Dim>(vtk_path.empty() ? (preset.name + "_l" + std::to_string(level) + ".vtk")
                                         : vtk_path,
                        active, space, solution);
    }

    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

template <int Dim>
ConvergenceReport run_convergence_impl(const Preset<Dim>& preset, const ResolvedConfig& rc) {
    ConvergenceReport report;
    report.config = config_echo(rc);
    for (int level = rc.raw.level_min; level <= rc.raw.level_max; ++level) {
        report.rows.push_back(solve_level<Dim>(preset, rc, level, false, ""));
    }
    fill_eoc(report.rows);
    if (!rc.raw.csv_path.empty()) {
        std::ofstream out(rc.raw.csv_path);
        if (!out) throw IoError("cannot open '" + rc.raw.csv_path + "' for writing");
        out << report_csv(report);
    }
    return report;
}

} // namespace

ConvergenceReport run_convergence(const RunConfig& config) {
    const ResolvedConfig rc = validate_config(config);
    if (rc.dim == 2) {
        return run_convergence_impl<2>(make_preset2(config.preset), rc);
    }
    return run_convergence_impl<3>(make_preset3(config.preset), rc);
}

SingleResult run_single(const RunConfig& config, int level) {
    RunConfig scoped = config;
    scoped.level_min = scoped.level_max = level;
    const ResolvedConfig rc = validate_config(scoped);
    SingleResult result;
    if (rc.dim == 2) {
        result.row = solve_level<2>(make_preset2(config.preset), rc, level, config.write_vtk,
                                    config.vtk_path);
    } else {
        result.row = solve_level<3>(make_preset3(config.preset), rc, level, config.write_vtk,
                                    config.vtk_path);
    }
    return result;
}

double validate_preset(const std::string& preset_name, int samples) {
    if (preset_dim(preset_name) == 2) {
        return preset_residual_max<2>(make_preset2(preset_name), samples);
    }
    return preset_residual_max<3>(make_preset3(preset_name), samples);
}

namespace {

template <int Dim>
double measure_impl(const Preset<Dim>& preset, const ResolvedConfig& rc, int level) {
    const auto mesh = std::make_unique<BackgroundMesh<Dim>>(build_background_mesh<Dim>(level, rc.raw.cell_cap));
    const BandSpec band = BandSpec::make(preset.surface, rc.gamma, mesh->h());
    const Surface<Dim>& surface = preset.surface;
    InterpolatedLevelSet<Dim> phi_h(
        *mesh, [&surface](const Vec<Dim>& x) { return surface.signed_distance(x); }, rc.order);
    const int m = surrogate_subdivision(rc.order, mesh->h());
    const ActiveMesh<Dim> active = select_active_cells(*mesh, phi_h, band.d, m);
    const CutGeometry<Dim> geom(active, rc.volume_degree, rc.trace_degree);
    return discrete_surface_measure(geom, rc.threads);
}

} // namespace

double discrete_surface_measure_at(const RunConfig& config, int level) {
    RunConfig scoped = config;
    scoped.level_min = scoped.level_max = level;
    const ResolvedConfig rc = validate_config(scoped);
    if (rc.dim == 2) return measure_impl<2>(make_preset2(config.preset), rc, level);
    return measure_impl<3>(make_preset3(config.preset), rc, level);
}

} // namespace nbfem
