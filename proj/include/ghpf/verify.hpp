#ifndef GHPF_VERIFY_HPP
#define GHPF_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "config.hpp"
#include "critical_points.hpp"
#include "drift.hpp"
#include "oracle.hpp"
#include "policy.hpp"
#include "report.hpp"
#include "solver.hpp"

namespace ghpf {

struct FixtureChecks {
    std::optional<double> risk_ratio_bound = 1.5;
    std::optional<double> risk_ratio_regression; ///< pinned from a verified run
    std::optional<double> high_risk_fraction_max;
    std::optional<double> harvest_min;
    std::size_t seeds = 100;
    std::size_t perturbations = 100;
    double perturbation_amplitude = 1e-3;
};

struct Fixture {
    std::string name;
    std::string kind = "plan"; ///< plan | drift
    RunConfig config;
    FixtureChecks checks;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct FixtureResult {
    std::string name;
    std::string kind;
    std::vector<CheckResult> checks;
    Json metrics = Json::object();
    std::string error; ///< set when the fixture could not be run at all

    [[nodiscard]] bool passed() const noexcept
    {
        return error.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
    }
};

/// Solver settings forced onto every fixture (command-line overrides).
struct SolverOverrides {
    std::optional<double> omega, tol, epsilon;
    std::optional<std::size_t> max_iters;

    void apply(SolverConfig& s) const
    {
        if (omega) s.omega = *omega;
        if (tol) s.tol = *tol;
        if (epsilon) s.epsilon_floor = *epsilon;
        if (max_iters) s.max_iters = *max_iters;
    }
};

inline FixtureChecks fixture_checks_from(const Json& j)
{
    detail::reject_unknown(j,
                           {"risk_ratio_bound", "risk_ratio_regression", "high_risk_fraction_max", "harvest_min",
                            "seeds", "perturbations", "perturbation_amplitude"},
                           "checks");
    FixtureChecks c;
    auto opt = [&](const char* key, std::optional<double>& out) {
        if (!j.contains(key)) return;
        out = j.at(key).is_null() ? std::nullopt : std::optional<double>(j.at(key).get<double>());
    };
    opt("risk_ratio_bound", c.risk_ratio_bound);
    opt("risk_ratio_regression", c.risk_ratio_regression);
    opt("high_risk_fraction_max", c.high_risk_fraction_max);
    opt("harvest_min", c.harvest_min);
    detail::read(j, "seeds", c.seeds);
    detail::read(j, "perturbations", c.perturbations);
    detail::read(j, "perturbation_amplitude", c.perturbation_amplitude);
    return c;
}

inline Fixture load_fixture(const std::filesystem::path& path)
{
    const Json j = parse_json_file(path);
    Fixture f;
    f.config = run_config_from(j);
    f.config.base_dir = path.parent_path();
    f.name = j.value("name", path.stem().string());
    f.kind = j.value("kind", std::string("plan"));
    if (f.kind != "plan" && f.kind != "drift") fail(ErrorKind::parameter, path.string() + ": kind must be plan or drift");
    if (j.contains("checks")) f.checks = fixture_checks_from(j.at("checks"));
    return f;
}

/// All *.json fixtures in dir, in file-name order. A missing or empty
/// directory is an io error.
inline std::vector<Fixture> load_fixture_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) fail(ErrorKind::io, "fixture directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    if (files.empty()) fail(ErrorKind::io, "no fixtures (*.json) in " + dir.string());
    std::sort(files.begin(), files.end());
    std::vector<Fixture> out;
    for (const auto& f : files) out.push_back(load_fixture(f));
    return out;
}

/// Uniform random points strictly inside the domain and in admissible cells.
inline std::vector<Vec2> random_admissible_points(const ProbabilityGrid& p, std::size_t count, std::uint64_t seed)
{
    const auto& g = p.geometry();
    std::mt19937_64 rng(seed);
    std::vector<Vec2> out;
    while (out.size() < count) {
        const Vec2 q{uniform_open_closed(rng) * g.extent_x(), uniform_open_closed(rng) * g.extent_y()};
        if (!(q.x < g.extent_x() && q.y < g.extent_y())) continue;
        if (p.is_zero(g.cell_of(q))) continue;
        out.push_back(q);
    }
    return out;
}

/// Share of arc length whose cell risk 1 / max(P, floor) exceeds the
/// 95th-percentile (nearest rank) cell risk of the map.
inline double high_risk_fraction(const Trajectory& t, const ProbabilityGrid& p, double floor,
                                 double percentile = 0.95)
{
    std::vector<double> risk(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) risk[k] = 1.0 / std::max(p[k], floor);
    std::sort(risk.begin(), risk.end());
    const auto rank = static_cast<std::size_t>(std::ceil(percentile * static_cast<double>(risk.size())));
    const double threshold = risk[std::clamp<std::size_t>(rank, 1, risk.size()) - 1];
    double hi = 0.0, total = 0.0;
    for (const auto& s : t.samples) {
        total += s.ds;
        if (1.0 / std::max(s.p, floor) > threshold) hi += s.ds;
    }
    return total > 0.0 ? hi / total : 0.0;
}

/// Number of trials, out of `trials`, where a random pin-preserving
/// perturbation of the given amplitude raised the discrete energy.
inline std::size_t dirichlet_trials_passed(const ProbabilityGrid& p, const PotentialGrid& v, std::size_t trials,
                                           double amplitude, std::uint64_t seed)
{
    const double e0 = dirichlet_energy(p, v);
    std::mt19937_64 rng(seed);
    std::size_t passed = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        PotentialGrid w = v;
        auto& raw = w.raw();
        for (std::size_t k = 0; k < raw.size(); ++k)
            if (!w.is_pinned(k)) raw[k] += amplitude * uniform_symmetric(rng);
        if (dirichlet_energy(p, w) > e0) ++passed;
    }
    return passed;
}

namespace detail {

inline std::string fmt(double v)
{
    std::string s;
    append_number(s, v);
    return s;
}

inline void check(FixtureResult& r, std::string name, bool ok, std::string detail)
{
    r.checks.push_back({std::move(name), ok, std::move(detail)});
}

inline FixtureResult run_plan_fixture(const Fixture& fx, const SolverConfig& scfg)
{
    FixtureResult r{fx.name, fx.kind, {}, Json::object(), {}};
    const auto& cfg = fx.config;
    const ProbabilityGrid p = build_map(cfg.map, cfg.base_dir);
    const Endpoints ep = cfg.endpoints();
    const auto [v, rep] = sor_solve(p, ep, scfg);
    r.metrics["solver"] = to_json(rep);
    check(r, "solver_converged", rep.converged, "residual " + fmt(rep.final_residual) + " after " +
                                                    std::to_string(rep.iterations) + " iterations");

    const std::size_t extrema = count_strict_extrema(v, scfg.tol);
    r.metrics["strict_extrema"] = extrema;
    check(r, "maximum_principle", extrema == 0, std::to_string(extrema) + " free cells are strict local extrema");

    const FluxField flux(v, p);
    const auto seeds = random_admissible_points(p, fx.checks.seeds, cfg.seed);
    std::size_t reached = 0, zero_samples = 0, total_samples = 0;
    for (const auto& s : seeds) {
        const auto t = integrate_streamline(flux, p, s, ep.target, v.floor(), cfg.path);
        reached += t.reached() ? 1 : 0;
        total_samples += t.size();
        for (const auto& x : t.samples) zero_samples += x.p == 0.0 ? 1 : 0;
    }
    r.metrics["seeds"] = {{"count", seeds.size()},
                          {"reached", reached},
                          {"samples", total_samples},
                          {"zero_cell_samples", zero_samples}};
    check(r, "avoidance", zero_samples == 0,
          std::to_string(zero_samples) + " of " + std::to_string(total_samples) + " samples in zero cells");
    check(r, "convergence", reached == seeds.size(),
          std::to_string(reached) + " of " + std::to_string(seeds.size()) + " seeds reached the target");

    const auto cps = detect_critical_points(v, p);
    r.metrics["critical_points"] = to_json(cps);
    const auto ext = cps.count(CriticalKind::extremum), deg = cps.count(CriticalKind::degenerate);
    check(r, "morse", ext == 0 && deg == 0,
          std::to_string(cps.count(CriticalKind::saddle)) + " saddles, " + std::to_string(deg) + " degenerate, " +
              std::to_string(ext) + " extrema");

    const auto dp = dirichlet_trials_passed(p, v, fx.checks.perturbations, fx.checks.perturbation_amplitude,
                                            cfg.seed + 1);
    r.metrics["dirichlet_trials_passed"] = dp;
    check(r, "dirichlet", dp == fx.checks.perturbations,
          std::to_string(dp) + " of " + std::to_string(fx.checks.perturbations) + " perturbations raised the energy");

    const auto path = integrate_streamline(flux, p, ep.start, ep.target, v.floor(), cfg.path);
    r.metrics["path_status"] = to_string(path.status);
    check(r, "start_path_reached", path.reached(), std::string("start path ended ") + to_string(path.status));
    const auto oracle = dijkstra_min_risk(p, ep);
    const auto cmp = compare_paths(path, oracle, p, v.floor());
    r.metrics["comparison"] = to_json(cmp);
    if (fx.checks.risk_ratio_bound) {
        check(r, "risk_ratio", path.reached() && cmp.ratio <= *fx.checks.risk_ratio_bound,
              "ratio " + fmt(cmp.ratio) + " vs bound " + fmt(*fx.checks.risk_ratio_bound));
    }
    if (fx.checks.risk_ratio_regression) {
        check(r, "risk_ratio_regression", path.reached() && cmp.ratio <= *fx.checks.risk_ratio_regression,
              "ratio " + fmt(cmp.ratio) + " vs pinned " + fmt(*fx.checks.risk_ratio_regression));
    }
    if (fx.checks.high_risk_fraction_max) {
        const double f = high_risk_fraction(path, p, v.floor());
        r.metrics["high_risk_fraction"] = f;
        check(r, "high_risk_fraction", path.reached() && f < *fx.checks.high_risk_fraction_max,
              "fraction " + fmt(f) + " vs limit " + fmt(*fx.checks.high_risk_fraction_max));
    }
    return r;
}

inline FixtureResult run_drift_fixture(const Fixture& fx, const SolverConfig& scfg)
{
    FixtureResult r{fx.name, fx.kind, {}, Json::object(), {}};
    const auto& cfg = fx.config;
    const ProbabilityGrid obstacles = build_map(cfg.map, cfg.base_dir);
    const auto psi = build_drift(cfg.drift_source, obstacles.geometry(), cfg.base_dir);
    const Endpoints ep = cfg.endpoints();
    const auto sol = solve_drift_bvp(psi, obstacles, ep, cfg.drift, scfg);
    r.metrics["outer_iterations"] = sol.trace.size();
    r.metrics["outer_converged"] = sol.outer_converged;
    r.metrics["final_max_p_change"] = sol.trace.empty() ? 0.0 : sol.trace.back().max_change;
    r.metrics["solver"] = to_json(sol.report);
    check(r, "inner_solver_converged", sol.report.converged, "last inner residual " + fmt(sol.report.final_residual));

    const auto path = integrate_streamline(sol.potential, sol.effective_p, ep.start, ep.target, cfg.path);
    std::size_t in_obstacle = 0;
    for (const auto& s : path.samples) in_obstacle += obstacles.sample(s.position) == 0.0 ? 1 : 0;
    const auto diff = heading_drift_differential(path, psi);
    const double harvest = harvesting_fraction(diff);
    const double u_path = heading_utility(path, psi, cfg.drift.k);
    const double u_line = heading_utility(straight_path(obstacles, ep.start, ep.target, cfg.path.step_size *
                                                                                           obstacles.geometry().spacing),
                                          psi, cfg.drift.k);
    r.metrics["path"] = {{"status", to_string(path.status)},
                         {"length", path.length()},
                         {"obstacle_samples", in_obstacle},
                         {"harvest_fraction", harvest},
                         {"utility", u_path},
                         {"straight_line_utility", u_line}};
    check(r, "path_reached", path.reached(), std::string("path ended ") + to_string(path.status));
    check(r, "obstacle_avoidance", in_obstacle == 0, std::to_string(in_obstacle) + " samples inside obstacles");
    if (fx.checks.harvest_min) {
        check(r, "harvesting", path.reached() && harvest >= *fx.checks.harvest_min,
              "fraction " + fmt(harvest) + " vs floor " + fmt(*fx.checks.harvest_min));
    }
    return r;
}

} // namespace detail

inline FixtureResult run_fixture(const Fixture& fx, const SolverOverrides& overrides = {})
{
    SolverConfig scfg = fx.config.solver;
    overrides.apply(scfg);
    try {
        return fx.kind == "drift" ? detail::run_drift_fixture(fx, scfg) : detail::run_plan_fixture(fx, scfg);
    } catch (const Error& e) {
        FixtureResult r{fx.name, fx.kind, {}, Json::object(), std::string(to_string(e.kind())) + ": " + e.what()};
        return r;
    }
}

struct VerifyReport {
    std::vector<FixtureResult> fixtures;

    [[nodiscard]] bool passed() const noexcept
    {
        return std::all_of(fixtures.begin(), fixtures.end(), [](const auto& f) { return f.passed(); });
    }

    [[nodiscard]] Json to_json() const
    {
        Json fx = Json::array();
        for (const auto& f : fixtures) {
            Json checks = Json::array();
            for (const auto& c : f.checks) checks.push_back({{"check", c.name}, {"passed", c.passed}, {"detail", c.detail}});
            Json item{{"name", f.name}, {"kind", f.kind}, {"passed", f.passed()}, {"checks", checks}, {"metrics", f.metrics}};
            if (!f.error.empty()) item["error"] = f.error;
            fx.push_back(item);
        }
        return {{"schema_version", schema_version}, {"passed", passed()}, {"fixtures", fx}};
    }

    [[nodiscard]] std::string text() const
    {
        std::string out;
        std::size_t total = 0, ok = 0;
        for (const auto& f : fixtures) {
            if (!f.error.empty()) {
                out += "FAIL  " + f.name + "  (not run) " + f.error + "\n";
                ++total;
            }
            for (const auto& c : f.checks) {
                out += std::string(c.passed ? "PASS  " : "FAIL  ") + f.name + "  " + c.name + "  " + c.detail + "\n";
                ++total;
                ok += c.passed ? 1 : 0;
            }
        }
        out += std::to_string(ok) + "/" + std::to_string(total) + " checks passed\n";
        return out;
    }
};

/// Runs every fixture concurrently and reports in the given order.
inline VerifyReport run_verify(const std::vector<Fixture>& fixtures, const SolverOverrides& overrides = {})
{
    std::vector<std::future<FixtureResult>> jobs;
    jobs.reserve(fixtures.size());
    for (const auto& f : fixtures)
        jobs.push_back(std::async(std::launch::async, [&f, &overrides] { return run_fixture(f, overrides); }));
    VerifyReport rep;
    for (auto& j : jobs) rep.fixtures.push_back(j.get());
    return rep;
}

} // namespace ghpf

#endif // GHPF_VERIFY_HPP
