// Solves the U-obstacle map, traces the path from start to target, and sets
// it against the minimum-risk grid path. Prints a short summary.

#include <cstdio>

#include "ghpf/critical_points.hpp"
#include "ghpf/generators.hpp"
#include "ghpf/oracle.hpp"
#include "ghpf/policy.hpp"
#include "ghpf/solver.hpp"

int main()
{
    using namespace ghpf;
    const auto p = u_obstacle_map(GridGeometry{128, 128, 1.0});
    const Endpoints e{{16.5, 40.5}, {112.5, 88.5}};

    const auto [v, rep] = sor_solve(p, e, {});
    std::printf("solve: %zu iterations, residual %.2e, %s\n", rep.iterations, rep.final_residual,
                rep.converged ? "converged" : "NOT converged");

    const auto path = integrate_streamline(v, p, e.start, e.target);
    std::printf("path: %s after %zu samples, length %.2f\n", to_string(path.status), path.size(), path.length());

    // A seed inside the cup still finds its way out through the opening.
    const auto cup = integrate_streamline(v, p, {70.5, 64.5}, e.target);
    std::printf("seed in the cup: %s, length %.2f\n", to_string(cup.status), cup.length());

    const auto cps = detect_critical_points(v, p);
    std::printf("critical points: %zu saddles, %zu extrema, %zu degenerate\n", cps.count(CriticalKind::saddle),
                cps.count(CriticalKind::extremum), cps.count(CriticalKind::degenerate));

    const auto cmp = compare_paths(path, dijkstra_min_risk(p, e), p);
    std::printf("risk %.2f vs grid optimum %.2f (ratio %.3f)\n", cmp.ghpf_risk, cmp.oracle_risk, cmp.ratio);
    std::printf("max turn per unit length %.3f vs %.3f\n", cmp.ghpf_max_turn_rate, cmp.oracle_max_turn_rate);
    return path.reached() ? 0 : 1;
}
