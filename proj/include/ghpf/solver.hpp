#ifndef GHPF_SOLVER_HPP
#define GHPF_SOLVER_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "field.hpp"
#include "geometry.hpp"

namespace ghpf {

/// Face value of the conductivity between two adjacent cells: the harmonic
/// mean, i.e. the two half-cells conducting in series.
constexpr double face_conductivity(double p_a, double p_b) noexcept
{
    return 2.0 * p_a * p_b / (p_a + p_b);
}

/// What the outer ring of the grid sees beyond its last cell.
enum class OuterBoundary {
    zero_flux,      // insulated wall (mirrored ghost cells)
    unit_potential, // wall held at V = 1; used when the start pin is omitted
};

struct SolverConfig {
    double omega = 1.9;
    double tol = 1e-8;
    std::size_t max_iters = 0; ///< 0 selects 200 * max(width, height)
    double epsilon_floor = default_probability_floor;
    /// When false only the target is pinned and the outer wall is held at 1.
    bool pin_start = true;

    void validate() const
    {
        if (!(omega > 0.0 && omega < 2.0)) fail(ErrorKind::parameter, "SOR omega must lie in (0, 2)");
        if (!(tol > 0.0) || !std::isfinite(tol)) fail(ErrorKind::parameter, "solver tolerance must be positive");
        if (!(epsilon_floor > 0.0 && epsilon_floor <= 1.0))
            fail(ErrorKind::parameter, "probability floor must lie in (0, 1]");
    }

    [[nodiscard]] std::size_t iteration_cap(const GridGeometry& g) const noexcept
    {
        return max_iters != 0 ? max_iters : 200 * std::max(g.width, g.height);
    }
};

struct SolverReport {
    std::size_t iterations = 0;
    double final_residual = 0.0; ///< relative, infinity norm over free cells
    bool converged = false;
    double dirichlet_energy = 0.0;
    double wall_time = 0.0; ///< seconds
};

/// Solved potential V(x) together with its Dirichlet data.
///
/// Pinned cells always hold their pinned value; only free cells can be
/// changed after construction.
class PotentialGrid {
public:
    PotentialGrid() = default;

    PotentialGrid(GridGeometry geometry, double floor, OuterBoundary boundary)
        : values_(geometry, 0.5), pinned_(geometry.cell_count(), 0), floor_(floor), boundary_(boundary)
    {}

    void pin(Cell c, double value)
    {
        const auto k = geometry().index(c);
        pinned_[k] = 1;
        values_[k] = value;
    }

    [[nodiscard]] const GridGeometry& geometry() const noexcept { return values_.geometry(); }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t k) const noexcept { return values_[k]; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return values_(i, j); }
    [[nodiscard]] const ScalarGrid& values() const noexcept { return values_; }
    [[nodiscard]] bool is_pinned(std::size_t k) const noexcept { return pinned_[k] != 0; }
    [[nodiscard]] const std::vector<std::uint8_t>& pinned_mask() const noexcept { return pinned_; }
    [[nodiscard]] double floor() const noexcept { return floor_; }
    [[nodiscard]] OuterBoundary boundary() const noexcept { return boundary_; }

    void set_free(std::size_t k, double v)
    {
        if (pinned_[k]) fail(ErrorKind::precondition, "cannot overwrite a pinned potential value");
        values_[k] = v;
    }

    /// Raw storage for the solver; pins must be respected by the caller.
    [[nodiscard]] std::vector<double>& raw() noexcept { return values_.data(); }

    bool operator==(const PotentialGrid&) const = default;

private:
    ScalarGrid values_;
    std::vector<std::uint8_t> pinned_;
    double floor_ = default_probability_floor;
    OuterBoundary boundary_ = OuterBoundary::zero_flux;
};

/// Five-point conductance stencil of div(P grad V) on a uniform grid.
///
/// Face conductances are harmonic means of floored cell values; faces on the
/// outer ring are zero for an insulated wall, or 2 * P_cell toward a wall held
/// at V = 1 (half-cell distance).
class ConductanceStencil {
public:
    ConductanceStencil(const ProbabilityGrid& p, double floor, OuterBoundary boundary)
        : g_(p.geometry()), east_(g_.cell_count(), 0.0), north_(g_.cell_count(), 0.0),
          wall_(g_.cell_count(), 0.0), diag_(g_.cell_count(), 0.0)
    {
        const std::size_t w = g_.width, h = g_.height;
        std::vector<double> c(g_.cell_count());
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = std::max(p[k], floor);
        for (std::size_t j = 0; j < h; ++j) {
            for (std::size_t i = 0; i < w; ++i) {
                const std::size_t k = g_.index(i, j);
                if (i + 1 < w) east_[k] = face_conductivity(c[k], c[k + 1]);
                if (j + 1 < h) north_[k] = face_conductivity(c[k], c[k + w]);
                if (boundary == OuterBoundary::unit_potential) {
                    const int walls = (i == 0) + (i + 1 == w) + (j == 0) + (j + 1 == h);
                    wall_[k] = 2.0 * c[k] * walls;
                }
            }
        }
        for (std::size_t j = 0; j < h; ++j) {
            for (std::size_t i = 0; i < w; ++i) {
                const std::size_t k = g_.index(i, j);
                diag_[k] = east_[k] + north_[k] + wall_[k] + (i > 0 ? east_[k - 1] : 0.0) +
                           (j > 0 ? north_[k - w] : 0.0);
            }
        }
    }

    [[nodiscard]] const GridGeometry& geometry() const noexcept { return g_; }
    [[nodiscard]] double east(std::size_t k) const noexcept { return east_[k]; }
    [[nodiscard]] double north(std::size_t k) const noexcept { return north_[k]; }
    [[nodiscard]] double west(std::size_t k) const noexcept { return k % g_.width ? east_[k - 1] : 0.0; }
    [[nodiscard]] double south(std::size_t k) const noexcept { return k >= g_.width ? north_[k - g_.width] : 0.0; }
    [[nodiscard]] double wall(std::size_t k) const noexcept { return wall_[k]; }
    [[nodiscard]] double diag(std::size_t k) const noexcept { return diag_[k]; }

    /// Weighted neighbor sum: sum_f sigma_f * V_nbr (+ wall term).
    [[nodiscard]] double neighbor_sum(const std::vector<double>& v, std::size_t k) const noexcept
    {
        const std::size_t w = g_.width;
        const std::size_t i = k % w;
        double s = wall_[k];
        if (i + 1 < w) s += east_[k] * v[k + 1];
        if (i > 0) s += east_[k - 1] * v[k - 1];
        if (k + w < v.size()) s += north_[k] * v[k + w];
        if (k >= w) s += north_[k - w] * v[k - w];
        return s;
    }

    /// Net inflow sum_f sigma_f (V_nbr - V_k); zero for an exact solution.
    [[nodiscard]] double balance(const std::vector<double>& v, std::size_t k) const noexcept
    {
        return neighbor_sum(v, k) - diag_[k] * v[k];
    }

private:
    GridGeometry g_;
    std::vector<double> east_, north_, wall_, diag_;
};

namespace detail {

inline double residual_inf(const ConductanceStencil& s, const std::vector<double>& v,
                           const std::vector<std::uint8_t>& pinned)
{
    double r = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (pinned[k]) continue;
        r = std::max(r, std::abs(s.balance(v, k)) / s.diag(k));
    }
    return r;
}

inline double energy(const ConductanceStencil& s, const std::vector<double>& v)
{
    const auto& g = s.geometry();
    double e = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const std::size_t i = k % g.width;
        if (i + 1 < g.width) {
            const double d = v[k + 1] - v[k];
            e += s.east(k) * d * d;
        }
        if (k + g.width < v.size()) {
            const double d = v[k + g.width] - v[k];
            e += s.north(k) * d * d;
        }
        if (s.wall(k) != 0.0) {
            const double d = 1.0 - v[k];
            e += s.wall(k) * d * d;
        }
    }
    return e;
}

} // namespace detail

/// Relative infinity-norm defect of the discrete operator over free cells:
/// max_k |sum_f sigma_f (V_nbr - V_k)| / sum_f sigma_f.
inline double residual(const ProbabilityGrid& p, const PotentialGrid& v)
{
    require_same_geometry(p.geometry(), v.geometry(), "residual");
    const ConductanceStencil s(p, v.floor(), v.boundary());
    return detail::residual_inf(s, v.values().data(), v.pinned_mask());
}

/// Discrete Dirichlet energy sum over faces of sigma_f * (dV)^2, which is the
/// integral of P |grad V|^2 with gradients (dV / h) and cell measure h^2.
inline double dirichlet_energy(const ProbabilityGrid& p, const PotentialGrid& v)
{
    require_same_geometry(p.geometry(), v.geometry(), "dirichlet_energy");
    const ConductanceStencil s(p, v.floor(), v.boundary());
    return detail::energy(s, v.values().data());
}

/// Solves div(P grad V) = 0 with V(start) = 1, V(target) = 0 by red-black SOR.
///
/// Red cells ((i + j) even) are all updated before any black cell, so the
/// result does not depend on intra-color ordering. A solve that hits the
/// iteration cap is returned with converged = false. Free cells start at 0.5,
/// or at the values of warm_start when one is given.
inline std::pair<PotentialGrid, SolverReport> sor_solve(const ProbabilityGrid& p, const Endpoints& endpoints,
                                                        const SolverConfig& config,
                                                        const PotentialGrid* warm_start = nullptr)
{
    const auto t0 = std::chrono::steady_clock::now();
    config.validate();
    const auto [start_cell, target_cell] = endpoints.validate(p);
    const auto& g = p.geometry();

    const auto boundary = config.pin_start ? OuterBoundary::zero_flux : OuterBoundary::unit_potential;
    PotentialGrid pot(g, config.epsilon_floor, boundary);
    if (warm_start) {
        require_same_geometry(g, warm_start->geometry(), "sor_solve warm start");
        pot.raw() = warm_start->values().data();
    }
    if (config.pin_start) pot.pin(start_cell, 1.0);
    pot.pin(target_cell, 0.0);

    const ConductanceStencil s(p, config.epsilon_floor, boundary);
    auto& v = pot.raw();
    const auto& pinned = pot.pinned_mask();
    const std::size_t w = g.width, h = g.height;
    const double omega = config.omega;
    const std::size_t cap = config.iteration_cap(g);

    SolverReport report;
    double r = detail::residual_inf(s, v, pinned);
    while (r > config.tol && report.iterations < cap) {
        for (std::size_t color = 0; color < 2; ++color) {
            for (std::size_t j = 0; j < h; ++j) {
                for (std::size_t i = (j + color) & 1U; i < w; i += 2) {
                    const std::size_t k = j * w + i;
                    if (pinned[k]) continue;
                    const double gs = s.neighbor_sum(v, k) / s.diag(k);
                    v[k] += omega * (gs - v[k]);
                }
            }
        }
        ++report.iterations;
        r = detail::residual_inf(s, v, pinned);
    }
    report.final_residual = r;
    report.converged = r <= config.tol;
    report.dirichlet_energy = detail::energy(s, v);
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(pot), report};
}

/// Counts free cells whose value is strictly above, or strictly below, every
/// stencil neighbor by more than margin. A unit-potential outer wall counts
/// as a neighbor of every edge cell.
///
/// A cell sits within the relative residual of its conductance-weighted
/// neighbor mean, so margin = tol separates iteration noise at exact ties
/// (e.g. a box corner) from a real violation.
inline std::size_t count_strict_extrema(const PotentialGrid& v, double margin = 0.0)
{
    const auto& g = v.geometry();
    const bool wall = v.boundary() == OuterBoundary::unit_potential;
    std::size_t count = 0;
    for (std::size_t j = 0; j < g.height; ++j) {
        for (std::size_t i = 0; i < g.width; ++i) {
            const std::size_t k = g.index(i, j);
            if (v.is_pinned(k)) continue;
            bool above = true, below = true;
            auto visit = [&](std::size_t n) {
                above = above && v[k] > v[n] + margin;
                below = below && v[k] < v[n] - margin;
            };
            if (i > 0) visit(k - 1);
            if (i + 1 < g.width) visit(k + 1);
            if (j > 0) visit(k - g.width);
            if (j + 1 < g.height) visit(k + g.width);
            if (wall && (i == 0 || j == 0 || i + 1 == g.width || j + 1 == g.height)) {
                above = above && v[k] > 1.0 + margin;
                below = below && v[k] < 1.0 - margin;
            }
            if (above || below) ++count;
        }
    }
    return count;
}

} // namespace ghpf

#endif // GHPF_SOLVER_HPP
