// ghpf: command-line front end for the gamma-harmonic potential field planner.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ghpf/ghpf.hpp"

namespace fs = std::filesystem;
using namespace ghpf;

namespace {

enum Exit : int {
    ok = 0,
    checks_failed = 1,
    map_error = 2,
    not_converged = 3,
    unreachable_or_stall = 4,
    parameter_error = 5,
    outer_not_converged = 6,
};

constexpr const char* out_dir_env = "GHPF_OUT_DIR";

int exit_code_for(ErrorKind k)
{
    switch (k) {
    case ErrorKind::format:
    case ErrorKind::shape:
    case ErrorKind::degenerate_map:
    case ErrorKind::io: return map_error;
    case ErrorKind::unreachable: return unreachable_or_stall;
    case ErrorKind::parameter:
    case ErrorKind::precondition:
    case ErrorKind::geometry_mismatch:
    case ErrorKind::out_of_domain: return parameter_error;
    }
    return parameter_error;
}

/// Raw flag values; only the ones actually given override the config file.
struct Flags {
    std::string config, map, start, target, out_dir;
    double tol = 0, omega = 0, epsilon = 0, k = 0, alpha = 0;
    std::size_t max_iters = 0;
    std::uint64_t seed = 0;
    // drift-plan
    std::string vortex, drift_x, drift_y;
    std::optional<std::uint64_t> noise_drift;
    std::size_t correlation_length = 8;
    bool obstacle_center = false;
    std::size_t obstacle_half = 6;
    // verify
    std::string fixtures = "fixtures";
    // gen-map / gen-drift
    std::string generator, out, format = "pgm", drift_type;
    std::size_t width = 128, height = 128, half = 6, maxval = 255;
    double quantize = 0, strength = 1.0;
    bool cw = false;
};

struct Opts {
    CLI::Option *config = nullptr, *map = nullptr, *start = nullptr, *target = nullptr, *out_dir = nullptr;
    CLI::Option *tol = nullptr, *omega = nullptr, *epsilon = nullptr, *max_iters = nullptr, *seed = nullptr;
    CLI::Option *k = nullptr, *alpha = nullptr;
};

void add_common(CLI::App* app, Flags& f, Opts& o, bool with_drift_params)
{
    o.config = app->add_option("--config", f.config, "JSON run config; flags override its values");
    o.map = app->add_option("--map", f.map, "probability map (.pgm or .csv)");
    o.start = app->add_option("--start", f.start, "start point x,y");
    o.target = app->add_option("--target", f.target, "target point x,y");
    o.tol = app->add_option("--tol", f.tol, "solver tolerance (relative residual)");
    o.omega = app->add_option("--omega", f.omega, "SOR relaxation factor");
    o.epsilon = app->add_option("--epsilon", f.epsilon, "probability floor");
    o.max_iters = app->add_option("--max-iters", f.max_iters, "solver iteration cap");
    o.seed = app->add_option("--seed", f.seed, "seed for random trial points");
    o.out_dir = app->add_option("--out-dir", f.out_dir, std::string("output directory (default $") + out_dir_env + ")");
    if (with_drift_params) {
        o.k = app->add_option("--k", f.k, "drift cost ceiling K");
        o.alpha = app->add_option("--alpha", f.alpha, "outer-loop mixing factor");
    }
}

RunConfig resolve_config(const Flags& f, const Opts& o)
{
    RunConfig c;
    if (o.config && o.config->count()) c = load_run_config(f.config);
    if (o.map && o.map->count()) c.map = MapSource{.path = f.map};
    if (o.start && o.start->count()) c.start = parse_point(f.start);
    if (o.target && o.target->count()) c.target = parse_point(f.target);
    if (o.tol && o.tol->count()) c.solver.tol = f.tol;
    if (o.omega && o.omega->count()) c.solver.omega = f.omega;
    if (o.epsilon && o.epsilon->count()) c.solver.epsilon_floor = f.epsilon;
    if (o.max_iters && o.max_iters->count()) c.solver.max_iters = f.max_iters;
    if (o.seed && o.seed->count()) c.seed = f.seed;
    if (o.k && o.k->count()) c.drift.k = f.k;
    if (o.alpha && o.alpha->count()) c.drift.alpha = f.alpha;
    if (o.out_dir && o.out_dir->count()) c.out_dir = f.out_dir;
    if (c.out_dir.empty()) {
        const char* env = std::getenv(out_dir_env);
        c.out_dir = env && *env ? env : "ghpf_out";
    }
    c.solver.validate();
    c.path.validate();
    return c;
}

void save_config(const RunConfig& c, const fs::path& dir)
{
    RunConfig copy = c;
    copy.out_dir.clear(); // replaying into another directory must not change the body
    write_json(dir / "config.json", to_json(copy));
}

int cmd_plan(const RunConfig& c)
{
    const auto p = build_map(c.map, c.base_dir);
    const auto ep = c.endpoints();
    const auto [v, rep] = sor_solve(p, ep, c.solver);
    const fs::path dir = c.out_dir;
    save_csv(dir / "potential.csv", v.values());
    save_pgm(dir / "potential.pgm", v.values(), 65535);
    write_text(dir / "policy.csv", policy_csv(v));
    save_config(c, dir);

    Json summary{{"schema_version", schema_version}, {"command", "plan"}, {"solver", to_json(rep)}};
    if (!rep.converged) {
        write_json(dir / "summary.json", summary);
        std::cerr << "solver did not converge: residual " << rep.final_residual << " after " << rep.iterations
                  << " iterations\n";
        return not_converged;
    }
    const auto t = integrate_streamline(v, p, ep.start, ep.target, c.path);
    write_text(dir / "trajectory.csv", trajectory_csv(t));
    summary["path"] = {{"status", to_string(t.status)},
                       {"samples", t.size()},
                       {"length", t.length()},
                       {"risk", path_risk(t, c.solver.epsilon_floor)}};
    write_json(dir / "summary.json", summary);
    std::cerr << "solve: " << rep.iterations << " iterations, " << rep.wall_time << " s; path " << to_string(t.status)
              << ", length " << t.length() << "\n";
    if (!t.reached()) {
        std::cerr << "trajectory did not reach the target (" << to_string(t.status) << ")\n";
        return unreachable_or_stall;
    }
    return ok;
}

int cmd_compare(const RunConfig& c)
{
    const auto p = build_map(c.map, c.base_dir);
    const auto ep = c.endpoints();
    const auto oracle = dijkstra_min_risk(p, ep); // unreachable surfaces before any solve
    const auto [v, rep] = sor_solve(p, ep, c.solver);
    if (!rep.converged) {
        std::cerr << "solver did not converge: residual " << rep.final_residual << "\n";
        return not_converged;
    }
    const auto t = integrate_streamline(v, p, ep.start, ep.target, c.path);
    const auto cmp = compare_paths(t, oracle, p, c.solver.epsilon_floor);
    const fs::path dir = c.out_dir;
    write_text(dir / "trajectory.csv", trajectory_csv(t));
    write_text(dir / "oracle_path.csv", oracle_csv(oracle));
    save_config(c, dir);
    write_json(dir / "comparison.json", Json{{"schema_version", schema_version},
                                             {"command", "compare"},
                                             {"solver", to_json(rep)},
                                             {"path_status", to_string(t.status)},
                                             {"comparison", to_json(cmp)}});
    std::cerr << "risk ratio " << cmp.ratio << " (ghpf " << cmp.ghpf_risk << ", oracle " << cmp.oracle_risk << ")\n";
    return t.reached() ? ok : unreachable_or_stall;
}

int cmd_drift_plan(RunConfig c, const Flags& f)
{
    if (!f.vortex.empty()) {
        if (f.vortex != "ccw" && f.vortex != "cw") fail(ErrorKind::parameter, "--vortex takes ccw or cw");
        c.drift_source = DriftSource{.type = "vortex", .ccw = f.vortex == "ccw"};
    }
    if (f.noise_drift) {
        c.drift_source = DriftSource{.type = "noise"};
        c.drift_source.seed = *f.noise_drift;
        c.drift_source.correlation_length = f.correlation_length;
    }
    if (!f.drift_x.empty()) {
        c.drift_source = DriftSource{.type = "files"};
        c.drift_source.x_path = f.drift_x;
        c.drift_source.y_path = f.drift_y;
    }
    if (f.obstacle_center) {
        const std::size_t w = c.map.empty() ? 64 : c.map.width, h = c.map.empty() ? 64 : c.map.height;
        if (!c.map.path.empty()) fail(ErrorKind::parameter, "--obstacle center needs a generated map, not a file");
        c.map = MapSource{.generator = "block", .width = w, .height = h, .half = f.obstacle_half};
    }
    if (c.map.empty()) c.map = MapSource{.generator = "empty", .width = 64, .height = 64};
    c.drift.validate();

    const auto obstacles = build_map(c.map, c.base_dir);
    const auto psi = build_drift(c.drift_source, obstacles.geometry(), c.base_dir);
    const auto ep = c.endpoints();
    const auto sol = solve_drift_bvp(psi, obstacles, ep, c.drift, c.solver);
    const auto t = integrate_streamline(sol.potential, sol.effective_p, ep.start, ep.target, c.path);
    const auto diff = heading_drift_differential(t, psi);

    const fs::path dir = c.out_dir;
    save_csv(dir / "effective_p.csv", sol.effective_p.values());
    save_csv(dir / "potential.csv", sol.potential.values());
    write_text(dir / "policy.csv", policy_csv(sol.potential));
    write_text(dir / "trajectory.csv", trajectory_csv(t, diff));
    write_json(dir / "outer_trace.json", to_json(sol.trace));
    save_config(c, dir);
    const bool neutral = psi.all_zero();
    write_json(dir / "summary.json",
               Json{{"schema_version", schema_version},
                    {"command", "drift-plan"},
                    {"outer_converged", sol.outer_converged},
                    {"outer_iterations", sol.trace.size()},
                    {"neutral_reduction", neutral},
                    {"solver", to_json(sol.report)},
                    {"path",
                     {{"status", to_string(t.status)},
                      {"length", t.length()},
                      {"harvest_fraction", harvesting_fraction(diff)},
                      {"utility", heading_utility(t, psi, c.drift.k)}}}});
    std::cerr << "outer loop: " << sol.trace.size() << " iterations, "
              << (sol.outer_converged ? "converged" : "NOT converged") << "; path " << to_string(t.status)
              << ", harvesting fraction " << harvesting_fraction(diff) << (neutral ? " (zero drift)" : "") << "\n";
    if (!sol.report.converged) return not_converged;
    if (!sol.outer_converged) return outer_not_converged;
    return t.reached() ? ok : unreachable_or_stall;
}

int cmd_verify(const Flags& f, const Opts& o)
{
    std::vector<Fixture> fixtures;
    try {
        fixtures = load_fixture_dir(f.fixtures);
    } catch (const Error& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return map_error;
    }
    SolverOverrides ov;
    if (o.config && o.config->count()) {
        // Only solver settings of a config apply; each fixture carries its own map.
        const auto c = load_run_config(f.config);
        ov.omega = c.solver.omega;
        ov.tol = c.solver.tol;
        ov.epsilon = c.solver.epsilon_floor;
        if (c.solver.max_iters) ov.max_iters = c.solver.max_iters;
    }
    if (o.tol->count()) ov.tol = f.tol;
    if (o.omega->count()) ov.omega = f.omega;
    if (o.epsilon->count()) ov.epsilon = f.epsilon;
    if (o.max_iters->count()) ov.max_iters = f.max_iters;
    std::string out_dir = f.out_dir;
    if (!o.out_dir->count()) {
        const char* env = std::getenv(out_dir_env);
        out_dir = env && *env ? env : "ghpf_out";
    }

    const auto rep = run_verify(fixtures, ov);
    write_json(fs::path(out_dir) / "verify_report.json", rep.to_json());
    write_text(fs::path(out_dir) / "verify_report.txt", rep.text());
    std::cout << rep.text();
    return rep.passed() ? ok : checks_failed;
}

int cmd_gen_map(const Flags& f)
{
    if (f.generator.empty()) fail(ErrorKind::parameter, "gen-map needs --type");
    MapSource m{.generator = f.generator, .width = f.width, .height = f.height, .seed = f.seed, .half = f.half};
    if (f.quantize > 0.0) m.quantize = f.quantize;
    const auto p = build_map(m);
    fs::path out = f.out;
    if (out.empty()) {
        const char* env = std::getenv(out_dir_env);
        const fs::path dir = !f.out_dir.empty() ? fs::path(f.out_dir) : fs::path(env && *env ? env : "ghpf_out");
        out = dir / (f.generator + "." + f.format);
    }
    if (map_format_from_path(out) == MapFormat::pgm) save_pgm(out, p.values(), f.maxval);
    else save_probability_csv(out, p);
    std::cerr << "wrote " << out.string() << "\n";
    return ok;
}

int cmd_gen_drift(const Flags& f)
{
    const GridGeometry g{f.width, f.height, 1.0};
    VectorFieldGrid psi;
    if (f.drift_type == "vortex") psi = vortex_field(g, {0.5 * g.extent_x(), 0.5 * g.extent_y()}, f.strength, !f.cw);
    else if (f.drift_type == "noise") psi = correlated_noise_field(g, f.seed, f.correlation_length);
    else fail(ErrorKind::parameter, "gen-drift --type takes vortex or noise");
    const char* env = std::getenv(out_dir_env);
    const fs::path dir = !f.out_dir.empty() ? fs::path(f.out_dir) : fs::path(env && *env ? env : "ghpf_out");
    save_drift_csv(dir / (f.drift_type + "_x.csv"), dir / (f.drift_type + "_y.csv"), psi, DriftLayout::split);
    std::cerr << "wrote " << (dir / (f.drift_type + "_x.csv")).string() << " and _y.csv\n";
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Gamma-harmonic potential field planner"};
    app.require_subcommand(1);
    Flags f;
    Opts plan_o, drift_o, cmp_o, ver_o;

    auto* plan = app.add_subcommand("plan", "solve a map and trace the path from start to target");
    add_common(plan, f, plan_o, false);

    auto* drift = app.add_subcommand("drift-plan", "drift-aware plan with the outer fixed-point loop");
    add_common(drift, f, drift_o, true);
    drift->add_option("--vortex", f.vortex, "vortex drift, ccw or cw");
    drift->add_option("--noise-drift", f.noise_drift, "correlated noise drift with this seed");
    drift->add_option("--correlation-length", f.correlation_length, "noise correlation length in cells");
    drift->add_option("--drift-x", f.drift_x, "drift x-component CSV (or interleaved file)");
    drift->add_option("--drift-y", f.drift_y, "drift y-component CSV");
    drift->add_flag("--obstacle-center", f.obstacle_center, "add a square obstacle in the middle");
    drift->add_option("--obstacle-half", f.obstacle_half, "half side of the central obstacle in cells");

    auto* cmp = app.add_subcommand("compare", "compare the traced path with the minimum-risk grid path");
    add_common(cmp, f, cmp_o, false);

    auto* ver = app.add_subcommand("verify", "run the invariant suite over a fixture directory");
    add_common(ver, f, ver_o, false);
    ver->add_option("--fixtures", f.fixtures, "fixture directory")->capture_default_str();

    auto* gm = app.add_subcommand("gen-map", "write a generated probability map");
    gm->add_option("--type", f.generator, "empty, u_obstacle, multimodal, white_noise or block")->required();
    gm->add_option("--width", f.width)->capture_default_str();
    gm->add_option("--height", f.height)->capture_default_str();
    gm->add_option("--seed", f.seed);
    gm->add_option("--half", f.half, "block half side")->capture_default_str();
    gm->add_option("--quantize", f.quantize, "binary threshold in (0, 1)");
    gm->add_option("--format", f.format, "pgm or csv when --out is not given")->capture_default_str();
    gm->add_option("--maxval", f.maxval, "PGM maxval")->capture_default_str();
    gm->add_option("--out", f.out, "output file");
    gm->add_option("--out-dir", f.out_dir, "output directory");

    auto* gd = app.add_subcommand("gen-drift", "write a generated drift field as two CSV files");
    gd->add_option("--type", f.drift_type, "vortex or noise")->required();
    gd->add_option("--width", f.width)->capture_default_str();
    gd->add_option("--height", f.height)->capture_default_str();
    gd->add_option("--seed", f.seed);
    gd->add_option("--correlation-length", f.correlation_length)->capture_default_str();
    gd->add_option("--strength", f.strength)->capture_default_str();
    gd->add_flag("--cw", f.cw, "clockwise vortex");
    gd->add_option("--out-dir", f.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : parameter_error;
    }

    try {
        if (*plan) return cmd_plan(resolve_config(f, plan_o));
        if (*drift) return cmd_drift_plan(resolve_config(f, drift_o), f);
        if (*cmp) return cmd_compare(resolve_config(f, cmp_o));
        if (*ver) return cmd_verify(f, ver_o);
        if (*gm) return cmd_gen_map(f);
        if (*gd) return cmd_gen_drift(f);
    } catch (const Error& e) {
        std::cerr << to_string(e.kind()) << " error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return parameter_error;
    }
    return ok;
}
