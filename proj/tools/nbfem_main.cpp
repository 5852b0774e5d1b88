#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nbfem/driver.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string levels;
    int level = -1;
    nbfem::RunConfig run;
};

void parse_levels(const std::string& text, nbfem::RunConfig& config) {
    const auto pos = text.find("..");
    try {
        if (pos == std::string::npos) {
            config.level_min = config.level_max = std::stoi(text);
        } else {
            config.level_min = std::stoi(text.substr(0, pos));
            config.level_max = std::stoi(text.substr(pos + 2));
        }
    } catch (const std::exception&) {
        throw nbfem::ConfigError("cannot parse level range '" + text + "' (expected MIN..MAX)");
    }
}

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--config", opt.config_path, "JSON config file; flags override its values");
    cmd->add_option("--preset", opt.run.preset, "circle|sphere|torus|circle-p2|circle-p3");
    cmd->add_option("--gamma", opt.run.gamma, "band factor in d = gamma * h");
    cmd->add_option("--mode", opt.run.mode, "coefficient mode: exact|zero");
    cmd->add_option("--order", opt.run.order, "element order (1..3, 2D only above 1)");
    cmd->add_option("--quad-volume", opt.run.volume_degree, "volume quadrature degree");
    cmd->add_option("--quad-trace", opt.run.trace_degree, "trace quadrature degree");
    cmd->add_option("--cg-tol", opt.run.cg_tol, "relative CG tolerance");
    cmd->add_option("--cg-max-iter", opt.run.cg_max_iter, "CG iteration cap (0 = automatic)");
    cmd->add_option("--cell-cap", opt.run.cell_cap, "background cell count cap");
    cmd->add_option("--threads", opt.run.threads, "worker threads (0 = NBFEM_THREADS/auto)");
}

// Re-applies values the user passed explicitly on top of the config file.
void merge(const CLI::App* cmd, const nbfem::RunConfig& flags, nbfem::RunConfig& out) {
    if (cmd->count("--preset")) out.preset = flags.preset;
    if (cmd->count("--gamma")) out.gamma = flags.gamma;
    if (cmd->count("--mode")) out.mode = flags.mode;
    if (cmd->count("--order")) out.order = flags.order;
    if (cmd->count("--quad-volume")) out.volume_degree = flags.volume_degree;
    if (cmd->count("--quad-trace")) out.trace_degree = flags.trace_degree;
    if (cmd->count("--cg-tol")) out.cg_tol = flags.cg_tol;
    if (cmd->count("--cg-max-iter")) out.cg_max_iter = flags.cg_max_iter;
    if (cmd->count("--cell-cap")) out.cell_cap = flags.cell_cap;
    if (cmd->count("--threads")) out.threads = flags.threads;
}

int dispatch(const CLI::App& app, CliOptions& opt, CLI::App* conv, CLI::App* single,
             CLI::App* validate, const std::string& csv_path, bool vtk, const std::string& vtk_path) {
    nbfem::RunConfig config;
    if (!opt.config_path.empty()) config = nbfem::load_config_file(opt.config_path);

    CLI::App* active_cmd = conv;
    if (app.got_subcommand(single)) active_cmd = single;
    if (app.got_subcommand(validate)) active_cmd = validate;
    merge(active_cmd, opt.run, config);
    if (active_cmd->count("--levels")) parse_levels(opt.levels, config);
    if (active_cmd->count("--csv")) config.csv_path = csv_path;
    if (active_cmd->count("--vtk")) config.write_vtk = vtk;
    if (active_cmd->count("--vtk-path")) {
        config.vtk_path = vtk_path;
        config.write_vtk = true;
    }

    if (app.got_subcommand(validate)) {
        const auto rc = nbfem::validate_config(config);
        const double residual = nbfem::validate_preset(config.preset);
        std::printf("preset=%s residual_oracle=%.3e levels=%d..%d gamma=%g: ok\n",
                    config.preset.c_str(), residual, config.level_min, config.level_max, rc.gamma);
        if (residual > 1e-4) {
            std::fprintf(stderr, "manufactured data residual %.3e is suspiciously large\n",
                         residual);
            return 2;
        }
        return 0;
    }

    if (app.got_subcommand(single)) {
        if (opt.level < 0) {
            if (single->count("--levels")) {
                opt.level = config.level_min;
            } else {
                throw nbfem::ConfigError("single requires --level");
            }
        }
        const auto result = nbfem::run_single(config, opt.level);
        const auto& r = result.row;
        std::printf("level=%d h=%.6g d=%.6g dofs=%lld\n", r.level, r.h, r.d,
                    static_cast<long long>(r.dofs));
        std::printf("l2_gamma=%.6e h1_gamma=%.6e h1_band=%.6e\n", r.norms.l2_gamma,
                    r.norms.h1_gamma, r.norms.h1_band);
        std::printf("cg_iters=%d cg_residual=%.3e seconds=%.3f\n", r.stats.iterations,
                    r.stats.rel_residual, r.seconds);
        return 0;
    }

    const auto report = nbfem::run_convergence(config);
    std::fputs(nbfem::report_markdown(report).c_str(), stdout);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Narrow-band finite element solver for PDEs on implicit surfaces"};
    app.require_subcommand(1);

    CliOptions opt;
    std::string csv_path, vtk_path;
    bool vtk = false;

    CLI::App* conv = app.add_subcommand("convergence", "convergence sweep over levels");
    add_common_flags(conv, opt);
    conv->add_option("--levels", opt.levels, "level range MIN..MAX");
    conv->add_option("--csv", csv_path, "write per-level results to this CSV file");

    CLI::App* single = app.add_subcommand("single", "solve one level");
    add_common_flags(single, opt);
    single->add_option("--level", opt.level, "refinement level");
    single->add_option("--levels", opt.levels, "level range (first level is used)");
    single->add_flag("--vtk", vtk, "write a VTK dump of the solution");
    single->add_option("--vtk-path", vtk_path, "VTK output path");

    CLI::App* validate = app.add_subcommand("validate", "check config and manufactured data");
    add_common_flags(validate, opt);
    validate->add_option("--levels", opt.levels, "level range MIN..MAX");

    CLI11_PARSE(app, argc, argv);

    try {
        return dispatch(app, opt, conv, single, validate, csv_path, vtk, vtk_path);
    } catch (const nbfem::ResourceLimit& e) {
        std::fprintf(stderr, "resource limit: %s\n", e.what());
        return 3;
    } catch (const nbfem::SolverError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 4;
    } catch (const nbfem::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const nbfem::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
