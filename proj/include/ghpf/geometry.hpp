#ifndef GHPF_GEOMETRY_HPP
#define GHPF_GEOMETRY_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "error.hpp"

namespace ghpf {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const noexcept { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const noexcept { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const noexcept { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const noexcept { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const noexcept { return {x / s, y / s}; }
    constexpr bool operator==(const Vec2&) const noexcept = default;

    [[nodiscard]] double norm() const noexcept { return std::hypot(x, y); }
};

constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double distance(Vec2 a, Vec2 b) noexcept { return (a - b).norm(); }

/// Integer cell address; i runs along x (columns), j along y (rows).
struct Cell {
    std::size_t i = 0;
    std::size_t j = 0;

    constexpr bool operator==(const Cell&) const noexcept = default;
    constexpr auto operator<=>(const Cell&) const noexcept = default;
};

/// Uniform square-cell discretization of a rectangular workspace.
///
/// Cell (i, j) covers [i*h, (i+1)*h) x [j*h, (j+1)*h); its center sits at
/// ((i + 0.5) h, (j + 0.5) h). Storage everywhere is row-major with index
/// j * width + i.
struct GridGeometry {
    std::size_t width = 0;
    std::size_t height = 0;
    double spacing = 1.0;

    constexpr bool operator==(const GridGeometry&) const noexcept = default;

    void validate() const
    {
        if (width < 3 || height < 3)
            fail(ErrorKind::parameter, "grid must be at least 3x3, got " + std::to_string(width) + "x" +
                                           std::to_string(height));
        if (!(spacing > 0.0) || !std::isfinite(spacing))
            fail(ErrorKind::parameter, "grid spacing must be positive and finite");
    }

    [[nodiscard]] constexpr std::size_t cell_count() const noexcept { return width * height; }
    [[nodiscard]] constexpr std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * width + i; }
    [[nodiscard]] constexpr std::size_t index(Cell c) const noexcept { return index(c.i, c.j); }
    [[nodiscard]] constexpr Cell cell_at(std::size_t idx) const noexcept { return {idx % width, idx / width}; }

    [[nodiscard]] constexpr Vec2 center(std::size_t i, std::size_t j) const noexcept
    {
        return {(static_cast<double>(i) + 0.5) * spacing, (static_cast<double>(j) + 0.5) * spacing};
    }
    [[nodiscard]] constexpr Vec2 center(Cell c) const noexcept { return center(c.i, c.j); }

    [[nodiscard]] constexpr double extent_x() const noexcept { return static_cast<double>(width) * spacing; }
    [[nodiscard]] constexpr double extent_y() const noexcept { return static_cast<double>(height) * spacing; }

    /// True when p lies inside the closed workspace rectangle.
    [[nodiscard]] bool contains(Vec2 p) const noexcept
    {
        return p.x >= 0.0 && p.y >= 0.0 && p.x <= extent_x() && p.y <= extent_y();
    }

    /// True when p lies in the hull of cell centers, where bilinear
    /// interpolation between four centers is defined.
    [[nodiscard]] bool in_center_hull(Vec2 p) const noexcept
    {
        const double lo = 0.5 * spacing;
        return p.x >= lo && p.y >= lo && p.x <= extent_x() - lo && p.y <= extent_y() - lo;
    }

    /// Cell containing p; points on the far edge snap to the last cell.
    [[nodiscard]] Cell cell_of(Vec2 p) const
    {
        if (!contains(p) || !std::isfinite(p.x) || !std::isfinite(p.y))
            fail(ErrorKind::out_of_domain, "point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                               ") lies outside the grid");
        auto snap = [this](double v, std::size_t n) {
            auto k = static_cast<std::size_t>(std::floor(v / spacing));
            return k >= n ? n - 1 : k;
        };
        return {snap(p.x, width), snap(p.y, height)};
    }

    [[nodiscard]] bool on_boundary(Cell c) const noexcept
    {
        return c.i == 0 || c.j == 0 || c.i + 1 == width || c.j + 1 == height;
    }
};

/// Dense cell-centered field over a GridGeometry.
template <class T>
class Grid {
public:
    using value_type = T;

    Grid() = default;
    explicit Grid(GridGeometry geometry, T fill = T{}) : geometry_(geometry), data_(geometry.cell_count(), fill) {}
    Grid(GridGeometry geometry, std::vector<T> data) : geometry_(geometry), data_(std::move(data))
    {
        if (data_.size() != geometry_.cell_count())
            fail(ErrorKind::shape, "grid data size does not match geometry");
    }

    [[nodiscard]] const GridGeometry& geometry() const noexcept { return geometry_; }
    [[nodiscard]] std::size_t width() const noexcept { return geometry_.width; }
    [[nodiscard]] std::size_t height() const noexcept { return geometry_.height; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

    [[nodiscard]] T& operator()(std::size_t i, std::size_t j) noexcept { return data_[geometry_.index(i, j)]; }
    [[nodiscard]] const T& operator()(std::size_t i, std::size_t j) const noexcept
    {
        return data_[geometry_.index(i, j)];
    }
    [[nodiscard]] T& operator[](std::size_t idx) noexcept { return data_[idx]; }
    [[nodiscard]] const T& operator[](std::size_t idx) const noexcept { return data_[idx]; }
    [[nodiscard]] T& at(Cell c) noexcept { return data_[geometry_.index(c)]; }
    [[nodiscard]] const T& at(Cell c) const noexcept { return data_[geometry_.index(c)]; }

    [[nodiscard]] const std::vector<T>& data() const noexcept { return data_; }
    [[nodiscard]] std::vector<T>& data() noexcept { return data_; }

    bool operator==(const Grid&) const = default;

private:
    GridGeometry geometry_{};
    std::vector<T> data_;
};

using ScalarGrid = Grid<double>;

/// Bilinear weights of the four cell centers surrounding p.
///
/// p must lie in the center hull. The returned base cell is the lower-left
/// corner of the interpolation patch; fx, fy are in [0, 1].
struct BilinearStencil {
    Cell base;
    double fx = 0.0;
    double fy = 0.0;
};

inline BilinearStencil bilinear_stencil(const GridGeometry& g, Vec2 p)
{
    if (!g.in_center_hull(p) || !std::isfinite(p.x) || !std::isfinite(p.y))
        fail(ErrorKind::out_of_domain, "query point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                           ") is outside the interpolation interior");
    const double u = p.x / g.spacing - 0.5;
    const double v = p.y / g.spacing - 0.5;
    auto i0 = static_cast<std::size_t>(std::floor(u));
    auto j0 = static_cast<std::size_t>(std::floor(v));
    if (i0 + 1 >= g.width) i0 = g.width - 2;
    if (j0 + 1 >= g.height) j0 = g.height - 2;
    return {{i0, j0}, u - static_cast<double>(i0), v - static_cast<double>(j0)};
}

template <class T>
T interpolate(const Grid<T>& grid, Vec2 p)
{
    const auto s = bilinear_stencil(grid.geometry(), p);
    const auto& a = grid(s.base.i, s.base.j);
    const auto& b = grid(s.base.i + 1, s.base.j);
    const auto& c = grid(s.base.i, s.base.j + 1);
    const auto& d = grid(s.base.i + 1, s.base.j + 1);
    return (a * (1.0 - s.fx) + b * s.fx) * (1.0 - s.fy) + (c * (1.0 - s.fx) + d * s.fx) * s.fy;
}

inline void require_same_geometry(const GridGeometry& a, const GridGeometry& b, const char* context)
{
    if (!(a == b)) fail(ErrorKind::geometry_mismatch, std::string(context) + ": grid geometries differ");
}

} // namespace ghpf

#endif // GHPF_GEOMETRY_HPP
