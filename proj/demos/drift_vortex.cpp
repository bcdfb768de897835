// Drift-aware plan through a counter-clockwise vortex in an empty box. The
// path should bend with the current; compare its cost with the straight line.

#include <cstdio>

#include "ghpf/drift.hpp"

int main()
{
    using namespace ghpf;
    const GridGeometry g{64, 64, 1.0};
    const ProbabilityGrid open(g, 1.0);
    const auto psi = vortex_field(g, {32.0, 32.0}, 1.0, true);
    const Endpoints e{{6.5, 6.5}, {57.5, 57.5}};

    const DriftConfig dcfg;
    const auto sol = solve_drift_bvp(psi, open, e, dcfg, {});
    std::printf("outer loop: %zu iterations, last change %.2e, %s\n", sol.trace.size(), sol.trace.back().max_change,
                sol.outer_converged ? "converged" : "stopped at the cap");

    const auto path = integrate_streamline(sol.potential, sol.effective_p, e.start, e.target);
    const auto diff = heading_drift_differential(path, psi);
    std::printf("path: %s, length %.2f, %.0f%% of samples harvesting\n", to_string(path.status), path.length(),
                100.0 * harvesting_fraction(diff));

    const auto line = straight_path(open, e.start, e.target, 0.25);
    std::printf("drift cost: path %.2f, straight line %.2f\n", heading_utility(path, psi, dcfg.k),
                heading_utility(line, psi, dcfg.k));
    return path.reached() ? 0 : 1;
}
