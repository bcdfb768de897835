// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 1
// if any criterion fails. Fixture metrics come from the same runner the CLI
// verify command uses, so the numbers here match verify_report.json.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>

#include "support.hpp"

using namespace ghpf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!detail.empty()) detail += "; ";
        detail += what;
        passed = passed && ok;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

const CheckResult* find_check(const FixtureResult& r, const std::string& name)
{
    for (const auto& c : r.checks)
        if (c.name == name) return &c;
    return nullptr;
}

struct FixtureRun {
    Fixture fixture;
    FixtureResult result;
    double seconds = 0.0;
};

// Every shipped fixture, run one at a time so each gets an honest wall time.
std::vector<FixtureRun> run_all_fixtures()
{
    std::vector<FixtureRun> out;
    for (auto& fx : load_fixture_dir(GHPF_FIXTURE_DIR)) {
        const auto t0 = std::chrono::steady_clock::now();
        auto r = run_fixture(fx);
        out.push_back({std::move(fx), std::move(r), seconds_since(t0)});
    }
    return out;
}

// Checks a named fixture-level check over every plan fixture.
Outcome plan_check(const std::vector<FixtureRun>& runs, const std::string& check)
{
    Outcome o;
    for (const auto& run : runs) {
        if (run.fixture.kind != "plan") continue;
        if (!run.result.error.empty()) {
            o.require(false, run.fixture.name + " not run: " + run.result.error);
            continue;
        }
        const auto* c = find_check(run.result, check);
        o.require(c && c->passed, run.fixture.name + " " + (c ? c->detail : "missing"));
    }
    return o;
}

Outcome ac1_divider()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = test::map_from(201, 3, [](std::size_t i, std::size_t) {
        return i < 100 ? 1.0 : i == 100 ? 2.0 / 3.0 : 0.5;
    });
    SolverConfig s;
    s.tol = 1e-10;
    const auto [v, rep] = sor_solve(p, {{0.5, 1.5}, {200.5, 1.5}}, s);
    const double interface = (1.0 * v(99, 1) + 0.5 * v(101, 1)) / 1.5;
    const double secs = seconds_since(t0);
    Outcome o;
    o.require(rep.converged, "converged in " + std::to_string(rep.iterations) + " iterations");
    o.require(std::abs(interface - 2.0 / 3.0) <= 1e-6, "interface error " + num(std::abs(interface - 2.0 / 3.0)));
    o.require(secs < 1.0, num(secs) + " s");
    return o;
}

Outcome ac2_laplace_reduction()
{
    const auto t0 = std::chrono::steady_clock::now();
    const GridGeometry g{64, 64, 1.0};
    const Endpoints e{{5.5, 6.5}, {58.5, 57.5}};
    const auto [a, ra] = sor_solve(ProbabilityGrid(g, 1.0), e, {});
    const auto [b, rb] = sor_solve(ProbabilityGrid(g, 0.37), e, {});
    double diff = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) diff = std::max(diff, std::abs(a[k] - b[k]));
    const double secs = seconds_since(t0);
    Outcome o;
    o.require(ra.converged && rb.converged, "both converged");
    o.require(diff <= 1e-8, "max difference " + num(diff));
    o.require(secs < 5.0, num(secs) + " s");
    return o;
}

struct DriftRun {
    std::string name;
    DriftSolution solution;
    Trajectory path;
    VectorFieldGrid psi;
    ProbabilityGrid obstacles;
    double seconds = 0.0;
};

std::vector<DriftRun> run_drift_fixtures(const std::vector<FixtureRun>& runs)
{
    std::vector<DriftRun> out;
    for (const auto& run : runs) {
        if (run.fixture.kind != "drift") continue;
        const auto& c = run.fixture.config;
        const auto t0 = std::chrono::steady_clock::now();
        DriftRun d;
        d.name = run.fixture.name;
        d.obstacles = build_map(c.map, c.base_dir);
        d.psi = build_drift(c.drift_source, d.obstacles.geometry(), c.base_dir);
        d.solution = solve_drift_bvp(d.psi, d.obstacles, c.endpoints(), c.drift, c.solver);
        d.path = integrate_streamline(d.solution.potential, d.solution.effective_p, c.endpoints().start,
                                      c.endpoints().target, c.path);
        d.seconds = seconds_since(t0);
        out.push_back(std::move(d));
    }
    return out;
}

Outcome ac3_maximum_principle(const std::vector<FixtureRun>& runs, const std::vector<DriftRun>& drift)
{
    Outcome o = plan_check(runs, "maximum_principle");
    const SolverConfig defaults;
    for (const auto& d : drift) {
        const auto n = count_strict_extrema(d.solution.potential, defaults.tol);
        o.require(n == 0, d.name + " " + std::to_string(n) + " strict extrema");
    }
    return o;
}

Outcome ac4_avoidance(const std::vector<FixtureRun>& runs)
{
    Outcome o;
    for (const auto& run : runs) {
        if (run.fixture.name != "u_obstacle") continue;
        const auto* c = find_check(run.result, "avoidance");
        const auto seeds = run.result.metrics.value("seeds", Json::object());
        o.require(c && c->passed && seeds.value("count", 0) == 100, c ? c->detail : "missing");
    }
    if (o.detail.empty()) o.require(false, "u_obstacle fixture not found");
    return o;
}

Outcome ac8_risk_ratio(const std::vector<FixtureRun>& runs)
{
    Outcome o;
    for (const auto& run : runs) {
        if (run.fixture.kind != "plan") continue;
        const auto* c = find_check(run.result, "risk_ratio");
        o.require(c && c->passed, run.fixture.name + " " + (c ? c->detail : "missing"));
        o.require(run.seconds < 30.0, run.fixture.name + " " + num(run.seconds) + " s");
    }
    return o;
}

Outcome ac9_white_noise(const std::vector<FixtureRun>& runs)
{
    Outcome o;
    for (const auto& run : runs) {
        if (run.fixture.name != "white_noise") continue;
        const auto* reached = find_check(run.result, "start_path_reached");
        const auto* frac = find_check(run.result, "high_risk_fraction");
        o.require(reached && reached->passed, reached ? reached->detail : "path check missing");
        o.require(frac && frac->passed && run.fixture.checks.high_risk_fraction_max == 0.05,
                  frac ? frac->detail : "fraction check missing");
    }
    if (o.detail.empty()) o.require(false, "white_noise fixture not found");
    return o;
}

Outcome ac10_harvesting(const std::vector<DriftRun>& drift)
{
    Outcome o;
    for (const auto& d : drift) {
        std::size_t in_obstacle = 0;
        for (const auto& s : d.path.samples) in_obstacle += d.obstacles.sample(s.position) == 0.0 ? 1 : 0;
        const double h = harvesting_fraction(heading_drift_differential(d.path, d.psi));
        o.require(d.path.reached() && in_obstacle == 0 && h >= 0.7,
                  d.name + " " + to_string(d.path.status) + ", harvest " + num(h) + ", " +
                      std::to_string(in_obstacle) + " obstacle samples, outer " +
                      std::to_string(d.solution.trace.size()) + (d.solution.outer_converged ? " converged" : " capped"));
        o.require(d.seconds < 60.0, d.name + " " + num(d.seconds) + " s");
    }
    if (drift.size() != 2) o.require(false, "expected the vortex and the noise-with-obstacle fixtures");
    return o;
}

Outcome ac11_brute_force()
{
    Outcome o;
    std::size_t equal = 0, unreachable = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto p = test::random_small_map(6, seed, 0.2);
        const double bf = test::brute_force_min_risk(p, {0, 0}, {5, 5});
        try {
            const double dj = dijkstra_min_risk(p, {{0.5, 0.5}, {5.5, 5.5}}).total_risk;
            equal += dj == bf ? 1 : 0;
        } catch (const Error& e) {
            const bool agree = e.kind() == ErrorKind::unreachable && !std::isfinite(bf);
            equal += agree ? 1 : 0;
            unreachable += agree ? 1 : 0;
        }
    }
    o.require(equal == 20, std::to_string(equal) + "/20 maps agree exactly (" + std::to_string(unreachable) +
                               " of them unreachable in both)");
    return o;
}

Outcome ac12_determinism()
{
    const auto dir = test::scratch_dir("acceptance_replay");
    Outcome o;
    const std::string base = std::string(GHPF_CLI_PATH) + " verify --fixtures '" + GHPF_FIXTURE_DIR + "' --out-dir '";
    const int a = test::run_command(base + (dir / "a").string() + "'");
    const int b = test::run_command(base + (dir / "b").string() + "'");
    o.require(a == b, "exit codes " + std::to_string(a) + " and " + std::to_string(b));
    std::size_t files = 0;
    for (const char* f : {"verify_report.json", "verify_report.txt"}) {
        const auto x = dir / "a" / f, y = dir / "b" / f;
        const bool same = fs::exists(x) && fs::exists(y) && test::read_bytes(x) == test::read_bytes(y);
        o.require(same, std::string(f) + (same ? " identical" : " differs"));
        files += same ? 1 : 0;
    }
    return o;
}

} // namespace

int main()
{
    std::cout << "running shipped fixtures from " << GHPF_FIXTURE_DIR << "\n" << std::flush;
    const auto runs = run_all_fixtures();
    const auto drift = run_drift_fixtures(runs);

    const std::vector<std::pair<std::string, Outcome>> results{
        {"AC1  analytic divider", ac1_divider()},
        {"AC2  Laplace reduction", ac2_laplace_reduction()},
        {"AC3  maximum principle", ac3_maximum_principle(runs, drift)},
        {"AC4  avoidance", ac4_avoidance(runs)},
        {"AC5  convergence from 100 seeds", plan_check(runs, "convergence")},
        {"AC6  Morse check", plan_check(runs, "morse")},
        {"AC7  Dirichlet principle", plan_check(runs, "dirichlet")},
        {"AC8  risk near-optimality", ac8_risk_ratio(runs)},
        {"AC9  white-noise behavior", ac9_white_noise(runs)},
        {"AC10 drift harvesting", ac10_harvesting(drift)},
        {"AC11 oracle brute-force equivalence", ac11_brute_force()},
        {"AC12 determinism", ac12_determinism()},
    };

    std::size_t failed = 0;
    for (const auto& [name, o] : results) {
        std::cout << (o.passed ? "PASS  " : "FAIL  ") << name << "  " << o.detail << "\n";
        failed += o.passed ? 0 : 1;
    }
    std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
