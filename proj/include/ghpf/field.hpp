#ifndef GHPF_FIELD_HPP
#define GHPF_FIELD_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"

namespace ghpf {

/// Default lower bound applied to P when it is used as a conductivity.
inline constexpr double default_probability_floor = 1e-6;

/// Task-fitness descriptor P(x) sampled at cell centers, values in [0, 1].
///
/// Immutable once built. The zero set (definite-threat region) is kept as an
/// explicit mask that always equals {cells : value == 0}.
class ProbabilityGrid {
public:
    ProbabilityGrid() = default;

    ProbabilityGrid(GridGeometry geometry, std::vector<double> values) : values_(geometry, std::move(values))
    {
        geometry.validate();
        for (double v : values_.data()) {
            if (!std::isfinite(v) || v < 0.0 || v > 1.0)
                fail(ErrorKind::parameter, "probability values must be finite and lie in [0, 1]");
        }
        zero_mask_.assign(values_.size(), 0);
        for (std::size_t k = 0; k < values_.size(); ++k) zero_mask_[k] = values_[k] == 0.0 ? 1 : 0;
    }

    ProbabilityGrid(GridGeometry geometry, double fill)
        : ProbabilityGrid(geometry, std::vector<double>(geometry.cell_count(), fill))
    {}

    [[nodiscard]] const GridGeometry& geometry() const noexcept { return values_.geometry(); }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t idx) const noexcept { return values_[idx]; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return values_(i, j); }
    [[nodiscard]] double at(Cell c) const noexcept { return values_.at(c); }
    [[nodiscard]] const ScalarGrid& values() const noexcept { return values_; }

    [[nodiscard]] bool is_zero(std::size_t idx) const noexcept { return zero_mask_[idx] != 0; }
    [[nodiscard]] bool is_zero(Cell c) const noexcept { return is_zero(geometry().index(c)); }
    [[nodiscard]] const std::vector<std::uint8_t>& zero_mask() const noexcept { return zero_mask_; }

    /// P at the cell containing p (piecewise-constant reading).
    [[nodiscard]] double sample(Vec2 p) const { return at(geometry().cell_of(p)); }

    /// True when no cell is admissible.
    [[nodiscard]] bool degenerate() const noexcept
    {
        return std::all_of(zero_mask_.begin(), zero_mask_.end(), [](auto z) { return z != 0; });
    }

    [[nodiscard]] std::size_t zero_count() const noexcept
    {
        return static_cast<std::size_t>(std::count(zero_mask_.begin(), zero_mask_.end(), std::uint8_t{1}));
    }

    bool operator==(const ProbabilityGrid& o) const { return values_ == o.values_; }

private:
    ScalarGrid values_;
    std::vector<std::uint8_t> zero_mask_;
};

inline void require_admissible(const ProbabilityGrid& p)
{
    if (p.degenerate()) fail(ErrorKind::degenerate_map, "map has no admissible cell (all values are zero)");
}

/// Per-cell 2D vector field: drift or navigation policy.
class VectorFieldGrid {
public:
    VectorFieldGrid() = default;

    VectorFieldGrid(GridGeometry geometry, std::vector<Vec2> vectors) : vectors_(geometry, std::move(vectors))
    {
        geometry.validate();
        for (const auto& v : vectors_.data()) {
            if (!std::isfinite(v.x) || !std::isfinite(v.y))
                fail(ErrorKind::parameter, "vector field contains a non-finite component");
        }
    }

    explicit VectorFieldGrid(GridGeometry geometry, Vec2 fill = {})
        : VectorFieldGrid(geometry, std::vector<Vec2>(geometry.cell_count(), fill))
    {}

    [[nodiscard]] const GridGeometry& geometry() const noexcept { return vectors_.geometry(); }
    [[nodiscard]] std::size_t size() const noexcept { return vectors_.size(); }
    [[nodiscard]] Vec2 operator[](std::size_t idx) const noexcept { return vectors_[idx]; }
    [[nodiscard]] Vec2 operator()(std::size_t i, std::size_t j) const noexcept { return vectors_(i, j); }
    [[nodiscard]] const Grid<Vec2>& vectors() const noexcept { return vectors_; }

    [[nodiscard]] Vec2 interpolate(Vec2 p) const { return ghpf::interpolate(vectors_, p); }

    [[nodiscard]] bool all_zero() const noexcept
    {
        return std::all_of(vectors_.data().begin(), vectors_.data().end(),
                           [](Vec2 v) { return v.x == 0.0 && v.y == 0.0; });
    }

    bool operator==(const VectorFieldGrid& o) const { return vectors_ == o.vectors_; }

private:
    Grid<Vec2> vectors_;
};

/// Start and target of a planning query, in continuous workspace coordinates.
struct Endpoints {
    Vec2 start;
    Vec2 target;

    /// Checks both points against the map and returns their snapped cells.
    [[nodiscard]] std::pair<Cell, Cell> validate(const ProbabilityGrid& p) const
    {
        const auto& g = p.geometry();
        auto inside = [&g](Vec2 q) {
            return q.x > 0.0 && q.y > 0.0 && q.x < g.extent_x() && q.y < g.extent_y();
        };
        if (!inside(start) || !inside(target))
            fail(ErrorKind::precondition, "start and target must lie strictly inside the grid");
        const Cell s = g.cell_of(start);
        const Cell t = g.cell_of(target);
        if (p.is_zero(s)) fail(ErrorKind::precondition, "start lies in a zero-probability cell");
        if (p.is_zero(t)) fail(ErrorKind::precondition, "target lies in a zero-probability cell");
        if (s == t) fail(ErrorKind::precondition, "start and target snap to the same cell");
        return {s, t};
    }
};

// Random numbers. Only the engine's raw output is used so that maps are
// reproducible across standard library implementations.

/// Uniform double in (0, 1].
inline double uniform_open_closed(std::mt19937_64& rng)
{
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

/// Uniform double in [-1, 1).
inline double uniform_symmetric(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

/// Map with every value >= threshold set to 1 and the rest to 0.
inline ProbabilityGrid binary_quantize(const ProbabilityGrid& grid, double threshold)
{
    if (!(threshold > 0.0 && threshold < 1.0))
        fail(ErrorKind::parameter, "quantization threshold must lie in (0, 1)");
    std::vector<double> out(grid.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = grid[k] >= threshold ? 1.0 : 0.0;
    return {grid.geometry(), std::move(out)};
}

/// I.i.d. uniform (0, 1] field; reproducible for a given seed.
inline ProbabilityGrid make_white_noise_map(const GridGeometry& geometry, std::uint64_t seed)
{
    geometry.validate();
    std::mt19937_64 rng(seed);
    std::vector<double> values(geometry.cell_count());
    for (auto& v : values) v = uniform_open_closed(rng);
    return {geometry, std::move(values)};
}

/// Rescales so that the maximum becomes 1. Leaves an all-zero grid alone.
inline std::vector<double> max_normalized(std::vector<double> values)
{
    const double mx = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    if (mx > 0.0 && mx != 1.0) {
        for (auto& v : values) v /= mx;
    }
    return values;
}

} // namespace ghpf

#endif // GHPF_FIELD_HPP
