#ifndef GHPF_ORACLE_HPP
#define GHPF_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <tuple>
#include <vector>

#include "error.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "policy.hpp"

namespace ghpf {

/// Minimum-risk cell path on the 8-connected grid graph.
struct OraclePath {
    std::vector<Cell> cells; ///< start cell first, target cell last
    double total_risk = 0.0;

    [[nodiscard]] double length(double spacing) const noexcept
    {
        double l = 0.0;
        for (std::size_t k = 1; k < cells.size(); ++k) {
            const bool diag = cells[k].i != cells[k - 1].i && cells[k].j != cells[k - 1].j;
            l += (diag ? std::numbers::sqrt2 : 1.0) * spacing;
        }
        return l;
    }
};

/// Risk of the edge between adjacent admissible cells a and b: midpoint rule
/// for the line integral of 1/P, 0.5 (1/P_a + 1/P_b) * |ab|.
///
/// Evaluated in a canonical cell order so that w(a, b) == w(b, a) bit for bit.
inline double edge_risk(const ProbabilityGrid& p, std::size_t a, std::size_t b)
{
    if (b < a) std::swap(a, b);
    const auto& g = p.geometry();
    const Cell ca = g.cell_at(a), cb = g.cell_at(b);
    const bool diag = ca.i != cb.i && ca.j != cb.j;
    const double dist = (diag ? std::numbers::sqrt2 : 1.0) * g.spacing;
    return 0.5 * (1.0 / p[a] + 1.0 / p[b]) * dist;
}

/// Calls f(nbr) for every admissible 8-neighbor of cell k. Diagonal moves
/// need both side-adjacent cells admissible (no squeezing between zero cells).
template <class F>
void for_each_admissible_neighbor(const ProbabilityGrid& p, std::size_t k, F&& f)
{
    const auto& g = p.geometry();
    const Cell c = g.cell_at(k);
    for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
            if (di == 0 && dj == 0) continue;
            const auto ni = static_cast<std::ptrdiff_t>(c.i) + di;
            const auto nj = static_cast<std::ptrdiff_t>(c.j) + dj;
            if (ni < 0 || nj < 0 || ni >= static_cast<std::ptrdiff_t>(g.width) ||
                nj >= static_cast<std::ptrdiff_t>(g.height))
                continue;
            const std::size_t n = g.index(static_cast<std::size_t>(ni), static_cast<std::size_t>(nj));
            if (p.is_zero(n)) continue;
            if (di != 0 && dj != 0) {
                if (p.is_zero(g.index(static_cast<std::size_t>(ni), c.j)) ||
                    p.is_zero(g.index(c.i, static_cast<std::size_t>(nj))))
                    continue;
            }
            f(n);
        }
    }
}

/// Sum of edge risks along a cell path, accumulated from whichever end cell
/// has the lower index, so a path and its reverse give the same bits.
inline double cell_path_risk(const ProbabilityGrid& p, const std::vector<Cell>& cells)
{
    const auto& g = p.geometry();
    if (cells.size() < 2) return 0.0;
    const bool forward = g.index(cells.front()) <= g.index(cells.back());
    double r = 0.0;
    for (std::size_t s = 1; s < cells.size(); ++s) {
        const std::size_t a = forward ? s - 1 : cells.size() - s;
        const std::size_t b = forward ? s : cells.size() - s - 1;
        r += edge_risk(p, g.index(cells[a]), g.index(cells[b]));
    }
    return r;
}

/// Dijkstra over admissible cells with edge_risk weights. Ties in the queue
/// are broken by cell index, so the returned path is deterministic.
inline OraclePath dijkstra_min_risk(const ProbabilityGrid& p, const Endpoints& endpoints)
{
    const auto [start_cell, target_cell] = endpoints.validate(p);
    const auto& g = p.geometry();
    const std::size_t n = g.cell_count();
    const std::size_t src = g.index(start_cell), dst = g.index(target_cell);
    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

    std::vector<double> dist(n, inf);
    std::vector<std::size_t> prev(n, none);
    std::vector<std::uint8_t> done(n, 0);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist[src] = 0.0;
    open.emplace(0.0, src);
    while (!open.empty()) {
        const auto [d, k] = open.top();
        open.pop();
        if (done[k]) continue;
        done[k] = 1;
        if (k == dst) break;
        for_each_admissible_neighbor(p, k, [&, d = d, k = k](std::size_t m) {
            if (done[m]) return;
            const double nd = d + edge_risk(p, k, m);
            if (nd < dist[m]) {
                dist[m] = nd;
                prev[m] = k;
                open.emplace(nd, m);
            }
        });
    }
    if (!done[dst]) fail(ErrorKind::unreachable, "no admissible 8-connected path between start and target");

    OraclePath path;
    for (std::size_t k = dst; k != none; k = prev[k]) path.cells.push_back(g.cell_at(k));
    std::reverse(path.cells.begin(), path.cells.end());
    path.total_risk = cell_path_risk(p, path.cells);
    return path;
}

/// Largest turning angle per unit length along a polyline; each interior
/// vertex's turn is divided by the mean length of its two segments.
inline double max_turn_rate(const std::vector<Vec2>& pts)
{
    double best = 0.0;
    for (std::size_t k = 1; k + 1 < pts.size(); ++k) {
        const Vec2 a = pts[k] - pts[k - 1];
        const Vec2 b = pts[k + 1] - pts[k];
        const double la = a.norm(), lb = b.norm();
        if (la == 0.0 || lb == 0.0) continue;
        const double turn = std::abs(signed_angle(a, b));
        best = std::max(best, turn / (0.5 * (la + lb)));
    }
    return best;
}

/// Points every `spacing` of arc length along a polyline, endpoints kept.
inline std::vector<Vec2> resample_polyline(const std::vector<Vec2>& pts, double spacing)
{
    if (!(spacing > 0.0)) fail(ErrorKind::parameter, "resampling spacing must be positive");
    std::vector<Vec2> out;
    if (pts.empty()) return out;
    out.push_back(pts.front());
    double carried = 0.0; // arc length since the last emitted point
    for (std::size_t k = 1; k < pts.size(); ++k) {
        const Vec2 a = pts[k - 1], b = pts[k];
        const double len = distance(a, b);
        double along = spacing - carried;
        while (along <= len) {
            out.push_back(a + (b - a) * (along / len));
            along += spacing;
        }
        carried = len - (along - spacing);
    }
    if (distance(out.back(), pts.back()) > 1e-9 * spacing) out.push_back(pts.back());
    return out;
}

struct PathComparison {
    double ghpf_risk = 0.0;
    double oracle_risk = 0.0;
    double ratio = 0.0;
    double ghpf_length = 0.0;
    double oracle_length = 0.0;
    double ghpf_max_turn_rate = 0.0;
    double oracle_max_turn_rate = 0.0;
};

/// Side-by-side risk, length and smoothness of a traced path and the oracle
/// path. The ratio is reported, not judged. Turn rates are measured after
/// resampling both paths every grid spacing, so the finer sampling of the
/// traced path does not count against it.
inline PathComparison compare_paths(const Trajectory& ghpf_traj, const OraclePath& oracle, const ProbabilityGrid& p,
                                    double floor = default_probability_floor)
{
    if (ghpf_traj.empty() || oracle.cells.empty())
        fail(ErrorKind::precondition, "cannot compare an empty path");
    const auto& g = p.geometry();
    const Cell gs = g.cell_of(ghpf_traj.samples.front().position);
    if (!(gs == oracle.cells.front()))
        fail(ErrorKind::precondition, "traced path and oracle path start in different cells");

    PathComparison c;
    c.ghpf_risk = path_risk(ghpf_traj, floor);
    c.oracle_risk = oracle.total_risk;
    c.ratio = c.oracle_risk > 0.0 ? c.ghpf_risk / c.oracle_risk : std::numeric_limits<double>::infinity();
    c.ghpf_length = ghpf_traj.length();
    c.oracle_length = oracle.length(g.spacing);
    c.ghpf_max_turn_rate = max_turn_rate(resample_polyline(ghpf_traj.points(), g.spacing));
    std::vector<Vec2> centers;
    centers.reserve(oracle.cells.size());
    for (const auto& cell : oracle.cells) centers.push_back(g.center(cell));
    c.oracle_max_turn_rate = max_turn_rate(resample_polyline(centers, g.spacing));
    return c;
}

} // namespace ghpf

#endif // GHPF_ORACLE_HPP
