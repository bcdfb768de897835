#ifndef GHPF_DRIFT_HPP
#define GHPF_DRIFT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "error.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "policy.hpp"
#include "solver.hpp"

namespace ghpf {

struct DriftConfig {
    double k = 1.0;         ///< cost ceiling K
    double alpha = 0.5;     ///< outer-loop mixing
    double outer_tol = 1e-3; ///< in units of K
    std::size_t outer_max_iters = 50;

    [[nodiscard]] double neutral_p() const noexcept { return 0.5 * k; }

    void validate() const
    {
        if (!(k > 0.0) || !std::isfinite(k)) fail(ErrorKind::parameter, "cost ceiling K must be positive");
        if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::parameter, "mixing alpha must lie in (0, 1]");
        if (!(outer_tol > 0.0)) fail(ErrorKind::parameter, "outer tolerance must be positive");
        if (outer_max_iters == 0) fail(ErrorKind::parameter, "outer iteration cap must be at least 1");
    }
};

/// Point cost Fc = K/2 (1 - cos theta), theta the angle between the motion
/// direction -grad V and the drift psi. K/2 when either vector vanishes.
inline double point_cost_fc(Vec2 grad_v, Vec2 psi, double k)
{
    if (!(k > 0.0)) fail(ErrorKind::parameter, "cost ceiling K must be positive");
    const double gn = grad_v.norm(), pn = psi.norm();
    if (gn == 0.0 || pn == 0.0) return 0.5 * k;
    const double c = std::clamp(dot(grad_v, psi) / (gn * pn), -1.0, 1.0);
    return 0.5 * k * (1.0 + c);
}

/// Drift descriptor K - Fc, in [0, K] before any floor.
inline double drift_descriptor(Vec2 grad_v, Vec2 psi, double k) { return k - point_cost_fc(grad_v, psi, k); }

struct OuterIterate {
    std::size_t iteration = 0;
    double max_change = 0.0; ///< max cell |P_next - P|, in units of K
    std::size_t inner_iterations = 0;
    double inner_residual = 0.0;
    bool inner_converged = false;
};

struct DriftSolution {
    PotentialGrid potential;
    /// Effective descriptor divided by K, the one the returned potential was
    /// solved with. The GHPF solution is invariant to scaling P.
    ProbabilityGrid effective_p;
    SolverReport report; ///< last inner solve
    bool outer_converged = false;
    std::vector<OuterIterate> trace;

    [[nodiscard]] bool converged() const noexcept { return outer_converged && report.converged; }
};

/// Solves div(P(grad V) grad V) = 0 by Picard iteration with under-relaxation.
///
/// Each outer step solves the linear problem for the current P, rebuilds the
/// descriptor from the new cell gradients, and mixes. Obstacle cells (zero in
/// `obstacles`) stay at zero throughout. Inner solves are warm-started.
inline DriftSolution solve_drift_bvp(const VectorFieldGrid& psi, const ProbabilityGrid& obstacles,
                                     const Endpoints& endpoints, const DriftConfig& dcfg,
                                     const SolverConfig& scfg)
{
    dcfg.validate();
    scfg.validate();
    require_same_geometry(psi.geometry(), obstacles.geometry(), "solve_drift_bvp");
    require_admissible(obstacles);
    static_cast<void>(endpoints.validate(obstacles));
    const auto& g = obstacles.geometry();
    const std::size_t n = g.cell_count();

    std::vector<double> current(n);
    for (std::size_t k = 0; k < n; ++k) current[k] = obstacles.is_zero(k) ? 0.0 : 0.5;

    DriftSolution out;
    PotentialGrid previous;
    for (std::size_t it = 1; it <= dcfg.outer_max_iters; ++it) {
        ProbabilityGrid p(g, current);
        auto [v, rep] = sor_solve(p, endpoints, scfg, it == 1 ? nullptr : &previous);
        const auto grads = cell_gradients(v);

        double change = 0.0;
        std::vector<double> next(n);
        for (std::size_t k = 0; k < n; ++k) {
            if (obstacles.is_zero(k)) continue;
            const double target = drift_descriptor(grads[k], psi[k], 1.0);
            next[k] = (1.0 - dcfg.alpha) * current[k] + dcfg.alpha * target;
            change = std::max(change, std::abs(next[k] - current[k]));
        }
        out.trace.push_back({it, change, rep.iterations, rep.final_residual, rep.converged});
        out.effective_p = std::move(p);
        out.report = rep;
        previous = v;
        out.potential = std::move(v);
        if (change <= dcfg.outer_tol) {
            out.outer_converged = true;
            break;
        }
        current = std::move(next);
    }
    return out;
}

/// Rotational drift about `center`: strength (-r_y, r_x) / max(|r|, h) for
/// counter-clockwise, negated for clockwise.
inline VectorFieldGrid vortex_field(const GridGeometry& g, Vec2 center, double strength, bool ccw)
{
    g.validate();
    if (!g.contains(center)) fail(ErrorKind::out_of_domain, "vortex center lies outside the grid");
    std::vector<Vec2> v(g.cell_count());
    const double sign = ccw ? 1.0 : -1.0;
    for (std::size_t j = 0; j < g.height; ++j) {
        for (std::size_t i = 0; i < g.width; ++i) {
            const Vec2 r = g.center(i, j) - center;
            v[g.index(i, j)] = Vec2{-r.y, r.x} * (sign * strength / std::max(r.norm(), g.spacing));
        }
    }
    return {g, std::move(v)};
}

namespace detail {

/// Periodic box mean of radius r along both axes (separable).
inline std::vector<double> box_blur(const GridGeometry& g, const std::vector<double>& src, std::size_t r)
{
    if (r == 0) return src;
    const std::size_t w = g.width, h = g.height;
    const double inv = 1.0 / static_cast<double>(2 * r + 1);
    std::vector<double> tmp(src.size()), out(src.size());
    for (std::size_t j = 0; j < h; ++j) {
        for (std::size_t i = 0; i < w; ++i) {
            double s = 0.0;
            for (std::size_t d = 0; d <= 2 * r; ++d) s += src[j * w + (i + w * (r + 1) + d - r) % w];
            tmp[j * w + i] = s * inv;
        }
    }
    for (std::size_t j = 0; j < h; ++j) {
        for (std::size_t i = 0; i < w; ++i) {
            double s = 0.0;
            for (std::size_t d = 0; d <= 2 * r; ++d) s += tmp[((j + h * (r + 1) + d - r) % h) * w + i];
            out[j * w + i] = s * inv;
        }
    }
    return out;
}

} // namespace detail

/// Per-component white noise in [-1, 1), smoothed by a periodic box kernel
/// of side 2 * correlation_length - 1, then scaled to unit max magnitude.
/// correlation_length = 1 leaves the noise untouched before scaling.
inline VectorFieldGrid correlated_noise_field(const GridGeometry& g, std::uint64_t seed, std::size_t correlation_length,
                                              bool rescale = true)
{
    g.validate();
    if (correlation_length < 1) fail(ErrorKind::parameter, "correlation length must be at least 1 cell");
    std::mt19937_64 rng(seed);
    std::vector<double> ux(g.cell_count()), uy(g.cell_count());
    for (std::size_t k = 0; k < g.cell_count(); ++k) {
        ux[k] = uniform_symmetric(rng);
        uy[k] = uniform_symmetric(rng);
    }
    ux = detail::box_blur(g, ux, correlation_length - 1);
    uy = detail::box_blur(g, uy, correlation_length - 1);
    std::vector<Vec2> v(g.cell_count());
    double mx = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        v[k] = {ux[k], uy[k]};
        mx = std::max(mx, v[k].norm());
    }
    if (rescale && mx > 0.0)
        for (auto& x : v) x = x / mx;
    return {g, std::move(v)};
}

/// Accumulated point cost sum Fc(grad V, psi) ds along a traced path, with
/// grad V and psi interpolated at each sample.
inline double accumulated_utility(const Trajectory& traj, const VectorFieldGrid& psi, const PotentialGrid& v, double k)
{
    require_same_geometry(psi.geometry(), v.geometry(), "accumulated_utility");
    const auto grads = cell_gradients(v);
    double u = 0.0;
    for (const auto& s : traj.samples) {
        if (s.ds == 0.0) continue;
        const Vec2 q = clamp_to_hull(v.geometry(), s.position);
        u += point_cost_fc(gradient_at(grads, q), psi.interpolate(q), k) * s.ds;
    }
    return u;
}

/// Same integral with the path's own heading as the motion direction, so any
/// polyline can be scored, not just one traced through V.
inline double heading_utility(const Trajectory& traj, const VectorFieldGrid& psi, double k)
{
    const auto headings = trajectory_headings(traj);
    double u = 0.0;
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const auto& s = traj.samples[i];
        if (s.ds == 0.0) continue;
        const Vec2 q = clamp_to_hull(psi.geometry(), s.position);
        u += point_cost_fc(headings[i] * -1.0, psi.interpolate(q), k) * s.ds;
    }
    return u;
}

/// Straight segment a -> b sampled every step (the last step may be short).
inline Trajectory straight_path(const ProbabilityGrid& p, Vec2 a, Vec2 b, double step)
{
    if (!(step > 0.0)) fail(ErrorKind::parameter, "step must be positive");
    Trajectory t;
    const double len = distance(a, b);
    const auto n = static_cast<std::size_t>(std::ceil(len / step));
    t.samples.push_back({a, p.sample(a), 0.0, 0.0});
    Vec2 prev = a;
    for (std::size_t i = 1; i <= n; ++i) {
        const Vec2 x = i == n ? b : a + (b - a) * (static_cast<double>(i) * step / len);
        t.samples.push_back({x, p.sample(x), 0.0, distance(x, prev)});
        prev = x;
    }
    t.status = TerminalStatus::reached_target;
    return t;
}

} // namespace ghpf

#endif // GHPF_DRIFT_HPP
