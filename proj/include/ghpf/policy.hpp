#ifndef GHPF_POLICY_HPP
#define GHPF_POLICY_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "error.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "solver.hpp"

namespace ghpf {

/// Cell-centered central differences of V. Outer-ring cells use mirrored
/// ghost values, so the normal difference there is half the one-sided one.
inline Grid<Vec2> cell_gradients(const PotentialGrid& v)
{
    const auto& g = v.geometry();
    Grid<Vec2> out(g);
    const double inv = 1.0 / (2.0 * g.spacing);
    for (std::size_t j = 0; j < g.height; ++j) {
        for (std::size_t i = 0; i < g.width; ++i) {
            const double e = v(i + 1 < g.width ? i + 1 : i, j);
            const double w = v(i > 0 ? i - 1 : i, j);
            const double n = v(i, j + 1 < g.height ? j + 1 : j);
            const double s = v(i, j > 0 ? j - 1 : j);
            out(i, j) = {(e - w) * inv, (n - s) * inv};
        }
    }
    return out;
}

/// grad V at a continuous point: cell gradients of the four surrounding
/// centers, bilinearly blended. Throws out_of_domain outside the center hull.
inline Vec2 gradient_at(const Grid<Vec2>& gradients, Vec2 point)
{
    return interpolate(gradients, point);
}

inline Vec2 gradient_at(const PotentialGrid& v, Vec2 point)
{
    // Only the four patch cells are needed; avoid building the whole field.
    const auto& g = v.geometry();
    const auto st = bilinear_stencil(g, point);
    auto central = [&](std::size_t i, std::size_t j) {
        const double e = v(i + 1 < g.width ? i + 1 : i, j);
        const double w = v(i > 0 ? i - 1 : i, j);
        const double n = v(i, j + 1 < g.height ? j + 1 : j);
        const double s = v(i, j > 0 ? j - 1 : j);
        return Vec2{(e - w), (n - s)} / (2.0 * g.spacing);
    };
    const Vec2 a = central(st.base.i, st.base.j);
    const Vec2 b = central(st.base.i + 1, st.base.j);
    const Vec2 c = central(st.base.i, st.base.j + 1);
    const Vec2 d = central(st.base.i + 1, st.base.j + 1);
    return (a * (1.0 - st.fx) + b * st.fx) * (1.0 - st.fy) + (c * (1.0 - st.fx) + d * st.fx) * st.fy;
}

/// Face-centered current density J = -sigma grad V on a staggered grid.
///
/// J_x lives on vertical faces and J_y on horizontal faces. The normal
/// component vanishes at the outer wall and on every face touching a zero
/// cell: the floored conductance leaks a current of order epsilon there,
/// which is dropped so traced lines keep out of the zero set as they would
/// in the zero-floor limit.
class FluxField {
public:
    FluxField(const PotentialGrid& v, const ProbabilityGrid& p)
        : g_(v.geometry()), jx_((g_.width + 1) * g_.height, 0.0), jy_(g_.width * (g_.height + 1), 0.0)
    {
        require_same_geometry(p.geometry(), v.geometry(), "FluxField");
        const ConductanceStencil s(p, v.floor(), v.boundary());
        const auto& d = v.values().data();
        const std::size_t w = g_.width, h = g_.height;
        const double inv_h = 1.0 / g_.spacing;
        for (std::size_t j = 0; j < h; ++j) {
            for (std::size_t i = 0; i + 1 < w; ++i) {
                const std::size_t k = g_.index(i, j);
                if (p.is_zero(k) || p.is_zero(k + 1)) continue;
                jx_[j * (w + 1) + i + 1] = -s.east(k) * (d[k + 1] - d[k]) * inv_h;
            }
        }
        for (std::size_t j = 0; j + 1 < h; ++j) {
            for (std::size_t i = 0; i < w; ++i) {
                const std::size_t k = g_.index(i, j);
                if (p.is_zero(k) || p.is_zero(k + w)) continue;
                jy_[(j + 1) * w + i] = -s.north(k) * (d[k + w] - d[k]) * inv_h;
            }
        }
        if (v.boundary() == OuterBoundary::unit_potential) {
            // Inflow from the wall held at 1, half a cell away.
            auto inflow = [&](std::size_t k) {
                return p.is_zero(k) ? 0.0 : 2.0 * std::max(p[k], v.floor()) * (1.0 - d[k]) * inv_h;
            };
            for (std::size_t j = 0; j < h; ++j) {
                jx_[j * (w + 1)] = inflow(g_.index(0, j));
                jx_[j * (w + 1) + w] = -inflow(g_.index(w - 1, j));
            }
            for (std::size_t i = 0; i < w; ++i) {
                jy_[i] = inflow(g_.index(i, 0));
                jy_[h * w + i] = -inflow(g_.index(i, h - 1));
            }
        }
    }

    [[nodiscard]] const GridGeometry& geometry() const noexcept { return g_; }

    /// J at a point of the workspace. Within a cell each component varies
    /// linearly between that cell's own two faces, so the normal component on
    /// any face is exactly that face's flux.
    [[nodiscard]] Vec2 at(Vec2 q) const
    {
        const Cell c = g_.cell_of(q);
        const std::size_t w = g_.width;
        const double ax = q.x / g_.spacing - static_cast<double>(c.i);
        const double ay = q.y / g_.spacing - static_cast<double>(c.j);
        const double jx = jx_[c.j * (w + 1) + c.i] * (1.0 - ax) + jx_[c.j * (w + 1) + c.i + 1] * ax;
        const double jy = jy_[c.j * w + c.i] * (1.0 - ay) + jy_[(c.j + 1) * w + c.i] * ay;
        return {jx, jy};
    }

private:
    GridGeometry g_;
    std::vector<double> jx_, jy_;
};

enum class TerminalStatus { reached_target, max_steps, stalled };

constexpr const char* to_string(TerminalStatus s) noexcept
{
    switch (s) {
    case TerminalStatus::reached_target: return "reached_target";
    case TerminalStatus::max_steps: return "max_steps";
    case TerminalStatus::stalled: return "stalled";
    }
    return "unknown";
}

struct TrajectorySample {
    Vec2 position;
    double p = 0.0;         ///< P of the containing cell (raw, unfloored)
    double grad_norm = 0.0; ///< |grad V| at the sample
    double ds = 0.0;        ///< distance from the previous sample
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    TerminalStatus status = TerminalStatus::max_steps;

    [[nodiscard]] bool empty() const noexcept { return samples.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
    [[nodiscard]] bool reached() const noexcept { return status == TerminalStatus::reached_target; }

    [[nodiscard]] double length() const noexcept
    {
        double s = 0.0;
        for (const auto& x : samples) s += x.ds;
        return s;
    }

    [[nodiscard]] std::vector<Vec2> points() const
    {
        std::vector<Vec2> out;
        out.reserve(samples.size());
        for (const auto& x : samples) out.push_back(x.position);
        return out;
    }
};

struct StreamlineParams {
    double step_size = 0.25;      ///< cells per step
    double capture_radius = 1.0;  ///< cells
    std::size_t max_steps = 0;    ///< 0 selects 50 * (width + height)
    double stall_threshold = 1e-30;
    int max_refinements = 6;      ///< halvings of a step that would land in a zero cell

    void validate() const
    {
        if (!(step_size > 0.0)) fail(ErrorKind::parameter, "streamline step size must be positive");
        if (!(capture_radius > 0.0)) fail(ErrorKind::parameter, "capture radius must be positive");
        if (!(stall_threshold >= 0.0)) fail(ErrorKind::parameter, "stall threshold must be non-negative");
        if (max_refinements < 0) fail(ErrorKind::parameter, "step refinement count must be non-negative");
    }

    [[nodiscard]] std::size_t step_cap(const GridGeometry& g) const noexcept
    {
        return max_steps != 0 ? max_steps : 50 * (g.width + g.height);
    }
};

/// Clamps p onto the hull of cell centers.
inline Vec2 clamp_to_hull(const GridGeometry& g, Vec2 p) noexcept
{
    const double lo = 0.5 * g.spacing;
    return {std::clamp(p.x, lo, g.extent_x() - lo), std::clamp(p.y, lo, g.extent_y() - lo)};
}

/// Clamps p onto the closed workspace rectangle (the outer wall).
inline Vec2 clamp_to_domain(const GridGeometry& g, Vec2 p) noexcept
{
    return {std::clamp(p.x, 0.0, g.extent_x()), std::clamp(p.y, 0.0, g.extent_y())};
}

/// Traces the current line through seed until it is captured at target,
/// stalls, or runs out of steps.
///
/// Direction is the unit current J / |J| (parallel to -grad V), advanced by
/// classical RK4 at a fixed arc-length step of step_size * h. Each sample
/// records the containing cell's P, |grad V| estimated as |J| / P, and the
/// distance travelled from the previous sample.
inline Trajectory integrate_streamline(const FluxField& flux, const ProbabilityGrid& p, Vec2 seed, Vec2 target,
                                       double floor, const StreamlineParams& params = {})
{
    params.validate();
    const auto& g = p.geometry();
    require_same_geometry(g, flux.geometry(), "integrate_streamline");
    if (!(seed.x > 0.0 && seed.y > 0.0 && seed.x < g.extent_x() && seed.y < g.extent_y()))
        fail(ErrorKind::precondition, "streamline seed lies outside the grid interior");
    if (p.is_zero(g.cell_of(seed))) fail(ErrorKind::precondition, "streamline seed lies in a zero-probability cell");

    const double ds = params.step_size * g.spacing;
    const double capture = params.capture_radius * g.spacing;
    const std::size_t cap = params.step_cap(g);

    Trajectory traj;
    auto record = [&](Vec2 x, double step_len) {
        const double px = p.sample(x);
        traj.samples.push_back({x, px, flux.at(x).norm() / std::max(px, floor), step_len});
    };
    record(seed, 0.0);

    bool stalled = false;
    bool clipped = false;
    auto direction = [&](Vec2 q) {
        q = clamp_to_domain(g, q);
        if (p.is_zero(g.cell_of(q))) {
            // Zero cells carry no flux, so a stage there says nothing about stagnation.
            clipped = true;
            return Vec2{};
        }
        const Vec2 j = flux.at(q);
        const double n = j.norm();
        if (!(n / std::max(p.sample(q), floor) > params.stall_threshold)) {
            stalled = true;
            return Vec2{};
        }
        return j / n;
    };

    Vec2 x = seed;
    for (std::size_t step = 0;; ++step) {
        if (distance(x, target) <= capture) {
            traj.status = TerminalStatus::reached_target;
            return traj;
        }
        if (step >= cap) {
            traj.status = TerminalStatus::max_steps;
            return traj;
        }
        // A full step may clip the convex corner of a zero-probability
        // block; such a step is retried at half length a few times.
        const bool from_admissible = !p.is_zero(g.cell_of(x));
        Vec2 next;
        double h = ds;
        for (int attempt = 0;; ++attempt) {
            clipped = false;
            const Vec2 k1 = direction(x);
            const Vec2 k2 = direction(x + k1 * (0.5 * h));
            const Vec2 k3 = direction(x + k2 * (0.5 * h));
            const Vec2 k4 = direction(x + k3 * h);
            if (stalled) {
                traj.status = TerminalStatus::stalled;
                return traj;
            }
            next = clamp_to_domain(g, x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0));
            if (!from_admissible || (!clipped && !p.is_zero(g.cell_of(next)))) break;
            if (attempt == params.max_refinements) {
                // Only a stagnation line runs into a zero block head on.
                traj.status = TerminalStatus::stalled;
                return traj;
            }
            h *= 0.5;
        }
        const double moved = distance(next, x);
        x = next;
        record(x, moved);
    }
}

inline Trajectory integrate_streamline(const PotentialGrid& v, const ProbabilityGrid& p, Vec2 seed, Vec2 target,
                                       const StreamlineParams& params = {})
{
    return integrate_streamline(FluxField(v, p), p, seed, target, v.floor(), params);
}

/// Accumulated risk sum (1 / P) ds along the samples, with P floored.
inline double path_risk(const Trajectory& traj, double floor = default_probability_floor)
{
    double r = 0.0;
    for (const auto& s : traj.samples) r += s.ds / std::max(s.p, floor);
    return r;
}

/// Signed angle in (-pi, pi] from heading a to vector b.
inline double signed_angle(Vec2 a, Vec2 b) noexcept
{
    const double t = std::atan2(cross(a, b), dot(a, b));
    return t <= -std::numbers::pi ? std::numbers::pi : t;
}

/// Local headings: centered differences, one-sided at the ends.
inline std::vector<Vec2> trajectory_headings(const Trajectory& traj)
{
    const auto n = traj.samples.size();
    std::vector<Vec2> out(n);
    if (n < 2) return out;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t a = k == 0 ? 0 : k - 1;
        const std::size_t b = k + 1 == n ? k : k + 1;
        out[k] = traj.samples[b].position - traj.samples[a].position;
    }
    return out;
}

/// Angle between the local heading and the drift at each sample; empty
/// optional where either vector vanishes.
inline std::vector<std::optional<double>> heading_drift_differential(const Trajectory& traj,
                                                                     const VectorFieldGrid& drift)
{
    const auto headings = trajectory_headings(traj);
    std::vector<std::optional<double>> out(traj.samples.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const Vec2 d = drift.interpolate(clamp_to_hull(drift.geometry(), traj.samples[k].position));
        const Vec2 hd = headings[k];
        if ((d.x == 0.0 && d.y == 0.0) || (hd.x == 0.0 && hd.y == 0.0)) continue;
        out[k] = signed_angle(hd, d);
    }
    return out;
}

/// Fraction of defined differential samples with |angle| < pi / 2.
inline double harvesting_fraction(const std::vector<std::optional<double>>& diffs)
{
    std::size_t defined = 0, aiding = 0;
    for (const auto& d : diffs) {
        if (!d) continue;
        ++defined;
        if (std::abs(*d) < std::numbers::pi / 2.0) ++aiding;
    }
    return defined ? static_cast<double>(aiding) / static_cast<double>(defined) : 0.0;
}

/// Normalized navigation policy -grad V / |grad V| per cell (zero where the
/// gradient vanishes). Pass cell_gradients(V).
inline VectorFieldGrid navigation_policy(const Grid<Vec2>& gradients)
{
    std::vector<Vec2> u(gradients.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double n = gradients[k].norm();
        u[k] = n > 0.0 ? -gradients[k] / n : Vec2{};
    }
    return {gradients.geometry(), std::move(u)};
}

} // namespace ghpf

#endif // GHPF_POLICY_HPP
