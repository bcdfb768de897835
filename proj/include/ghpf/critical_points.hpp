#ifndef GHPF_CRITICAL_POINTS_HPP
#define GHPF_CRITICAL_POINTS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "field.hpp"
#include "geometry.hpp"
#include "policy.hpp"
#include "solver.hpp"

namespace ghpf {

enum class CriticalKind { saddle, degenerate, extremum };

constexpr const char* to_string(CriticalKind k) noexcept
{
    switch (k) {
    case CriticalKind::saddle: return "saddle";
    case CriticalKind::degenerate: return "degenerate";
    case CriticalKind::extremum: return "extremum";
    }
    return "unknown";
}

struct CriticalPoint {
    Vec2 location;
    double grad_norm = 0.0;
    double hessian_det = 0.0;
    CriticalKind kind = CriticalKind::saddle;
};

struct CriticalPointReport {
    std::vector<CriticalPoint> points;
    double grad_tol = 0.0;
    double det_tol = 0.0;

    [[nodiscard]] std::size_t count(CriticalKind k) const noexcept
    {
        return static_cast<std::size_t>(
            std::count_if(points.begin(), points.end(), [k](const auto& p) { return p.kind == k; }));
    }
};

struct CriticalPointConfig {
    double grad_rel_tol = 1e-8; ///< times max |grad V| over scanned cells
    double hess_rel_tol = 1e-12; ///< times max |H entry| over scanned cells
    int max_depth = 48;
    /// Sub-squares visited per patch. A whole curve of zeros (an unconverged
    /// or degenerate field) would otherwise branch at every level.
    std::size_t max_nodes = 4096;
};

/// Central-difference Hessian (xx, yy, xy) at interior cells; zero on the ring.
inline Grid<std::array<double, 3>> cell_hessians(const PotentialGrid& v)
{
    const auto& g = v.geometry();
    Grid<std::array<double, 3>> out(g, {0.0, 0.0, 0.0});
    const double ih2 = 1.0 / (g.spacing * g.spacing);
    for (std::size_t j = 1; j + 1 < g.height; ++j) {
        for (std::size_t i = 1; i + 1 < g.width; ++i) {
            const double c = v(i, j);
            out(i, j) = {(v(i + 1, j) - 2.0 * c + v(i - 1, j)) * ih2, (v(i, j + 1) - 2.0 * c + v(i, j - 1)) * ih2,
                         (v(i + 1, j + 1) - v(i - 1, j + 1) - v(i + 1, j - 1) + v(i - 1, j - 1)) * 0.25 * ih2};
        }
    }
    return out;
}

namespace detail {

struct Patch {
    std::array<Vec2, 4> g; // gradients at (0,0), (1,0), (0,1), (1,1)

    [[nodiscard]] Vec2 at(double s, double t) const noexcept
    {
        return (g[0] * (1.0 - s) + g[1] * s) * (1.0 - t) + (g[2] * (1.0 - s) + g[3] * s) * t;
    }
};

inline bool straddles_zero(const std::array<Vec2, 4>& c) noexcept
{
    double xlo = c[0].x, xhi = c[0].x, ylo = c[0].y, yhi = c[0].y;
    for (const auto& v : c) {
        xlo = std::min(xlo, v.x);
        xhi = std::max(xhi, v.x);
        ylo = std::min(ylo, v.y);
        yhi = std::max(yhi, v.y);
    }
    return xlo <= 0.0 && xhi >= 0.0 && ylo <= 0.0 && yhi >= 0.0;
}

/// Quadtree bisection of [s0, s0 + size] x [t0, t0 + size] in patch
/// coordinates, keeping sub-squares where both components change sign.
inline void bisect(const Patch& patch, double s0, double t0, double size, int depth, double grad_tol,
                   int max_depth, std::size_t& budget, std::vector<std::array<double, 2>>& found)
{
    const Vec2 mid = patch.at(s0 + 0.5 * size, t0 + 0.5 * size);
    if (budget == 0) return;
    --budget;
    if (mid.norm() < grad_tol || budget == 0) {
        found.push_back({s0 + 0.5 * size, t0 + 0.5 * size});
        return;
    }
    if (depth >= max_depth) return;
    const double half = 0.5 * size;
    for (int q = 0; q < 4; ++q) {
        const double s = s0 + (q & 1) * half;
        const double t = t0 + (q >> 1) * half;
        const std::array<Vec2, 4> c{patch.at(s, t), patch.at(s + half, t), patch.at(s, t + half),
                                    patch.at(s + half, t + half)};
        if (straddles_zero(c)) bisect(patch, s, t, half, depth + 1, grad_tol, max_depth, budget, found);
    }
}

} // namespace detail

/// Locates points where the interpolated grad V vanishes and classifies them
/// by the sign of the interpolated Hessian determinant.
///
/// Patches of four unpinned cells off the outer ring are scanned, zero
/// probability cells included since the field is defined there as well. Thresholds are relative to the largest gradient and Hessian entry
/// seen on those cells.
inline CriticalPointReport detect_critical_points(const PotentialGrid& v, const ProbabilityGrid& p,
                                                  const CriticalPointConfig& cfg = {})
{
    require_same_geometry(p.geometry(), v.geometry(), "detect_critical_points");
    const auto& g = v.geometry();
    const auto grads = cell_gradients(v);
    const auto hess = cell_hessians(v);

    std::vector<std::uint8_t> eligible(g.cell_count(), 0);
    double gmax = 0.0, hmax = 0.0;
    for (std::size_t j = 1; j + 1 < g.height; ++j) {
        for (std::size_t i = 1; i + 1 < g.width; ++i) {
            const std::size_t k = g.index(i, j);
            if (v.is_pinned(k)) continue;
            eligible[k] = 1;
            gmax = std::max(gmax, grads[k].norm());
            for (double h : hess[k]) hmax = std::max(hmax, std::abs(h));
        }
    }

    CriticalPointReport report;
    report.grad_tol = cfg.grad_rel_tol * gmax;
    report.det_tol = cfg.hess_rel_tol * hmax * hmax;
    if (gmax == 0.0) return report;

    std::vector<std::array<double, 2>> found;
    for (std::size_t j = 1; j + 2 < g.height; ++j) {
        for (std::size_t i = 1; i + 2 < g.width; ++i) {
            const std::array<std::size_t, 4> ks{g.index(i, j), g.index(i + 1, j), g.index(i, j + 1),
                                                g.index(i + 1, j + 1)};
            if (!std::all_of(ks.begin(), ks.end(), [&](auto k) { return eligible[k] != 0; })) continue;
            const detail::Patch patch{{grads[ks[0]], grads[ks[1]], grads[ks[2]], grads[ks[3]]}};
            if (!detail::straddles_zero(patch.g)) continue;
            found.clear();
            std::size_t budget = cfg.max_nodes;
            detail::bisect(patch, 0.0, 0.0, 1.0, 0, report.grad_tol, cfg.max_depth, budget, found);

            std::vector<std::array<double, 2>> unique;
            for (const auto& f : found) {
                const bool dup = std::any_of(unique.begin(), unique.end(), [&](const auto& u) {
                    return std::abs(u[0] - f[0]) < 1e-6 && std::abs(u[1] - f[1]) < 1e-6;
                });
                if (!dup) unique.push_back(f);
            }
            for (const auto& [s, t] : unique) {
                std::array<double, 3> h{};
                for (int c = 0; c < 3; ++c) {
                    h[c] = (hess[ks[0]][c] * (1.0 - s) + hess[ks[1]][c] * s) * (1.0 - t) +
                           (hess[ks[2]][c] * (1.0 - s) + hess[ks[3]][c] * s) * t;
                }
                CriticalPoint cp;
                cp.location = g.center(i, j) + Vec2{s, t} * g.spacing;
                cp.grad_norm = patch.at(s, t).norm();
                cp.hessian_det = h[0] * h[1] - h[2] * h[2];
                if (cp.hessian_det < -report.det_tol) cp.kind = CriticalKind::saddle;
                else if (cp.hessian_det > report.det_tol) cp.kind = CriticalKind::extremum;
                else cp.kind = CriticalKind::degenerate;
                report.points.push_back(cp);
            }
        }
    }
    return report;
}

} // namespace ghpf

#endif // GHPF_CRITICAL_POINTS_HPP
