#ifndef GHPF_GENERATORS_HPP
#define GHPF_GENERATORS_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "error.hpp"
#include "field.hpp"
#include "geometry.hpp"

namespace ghpf {

/// Sum of random Gaussian bumps on a small positive floor, max-normalized.
/// Smooth, strictly positive, and with no clean obstacle/free split.
inline ProbabilityGrid multimodal_map(const GridGeometry& g, std::uint64_t seed, std::size_t bumps = 14,
                                      double base = 0.03)
{
    g.validate();
    if (bumps == 0) fail(ErrorKind::parameter, "multimodal map needs at least one bump");
    if (!(base > 0.0)) fail(ErrorKind::parameter, "multimodal base level must be positive");
    struct Bump {
        Vec2 c;
        double sigma, amp;
    };
    std::mt19937_64 rng(seed);
    const double ex = g.extent_x(), ey = g.extent_y();
    const double scale = std::min(ex, ey) / 128.0;
    std::vector<Bump> list;
    for (std::size_t k = 0; k < bumps; ++k) {
        const double x = uniform_open_closed(rng) * ex;
        const double y = uniform_open_closed(rng) * ey;
        const double sigma = (8.0 + 14.0 * uniform_open_closed(rng)) * scale;
        list.push_back({{x, y}, sigma, uniform_open_closed(rng)});
    }
    std::vector<double> v(g.cell_count());
    for (std::size_t j = 0; j < g.height; ++j) {
        for (std::size_t i = 0; i < g.width; ++i) {
            const Vec2 q = g.center(i, j);
            double s = base;
            for (const auto& b : list) {
                const Vec2 d = q - b.c;
                s += b.amp * std::exp(-dot(d, d) / (2.0 * b.sigma * b.sigma));
            }
            v[g.index(i, j)] = s;
        }
    }
    return {g, max_normalized(std::move(v))};
}

/// Binary map with a U-shaped wall whose opening faces -x. On a 128 grid the
/// base spans i in [80, 86), j in [32, 96) and the arms run from i = 40.
inline ProbabilityGrid u_obstacle_map(const GridGeometry& g)
{
    g.validate();
    if (g.width < 32 || g.height < 32) fail(ErrorKind::parameter, "U-obstacle map needs at least 32x32 cells");
    auto sx = [&](std::size_t a) { return a * g.width / 128; };
    auto sy = [&](std::size_t a) { return a * g.height / 128; };
    const std::size_t x0 = sx(40), x1 = sx(80), x2 = sx(86);
    const std::size_t y0 = sy(32), y1 = sy(38), y2 = sy(90), y3 = sy(96);
    std::vector<double> v(g.cell_count(), 1.0);
    for (std::size_t j = 0; j < g.height; ++j) {
        for (std::size_t i = 0; i < g.width; ++i) {
            const bool base = i >= x1 && i < x2 && j >= y0 && j < y3;
            const bool arm = i >= x0 && i < x2 && ((j >= y0 && j < y1) || (j >= y2 && j < y3));
            if (base || arm) v[g.index(i, j)] = 0.0;
        }
    }
    return {g, std::move(v)};
}

/// Square zero block of side 2 * half centered in an otherwise uniform map.
inline ProbabilityGrid block_obstacle_map(const GridGeometry& g, std::size_t half, double fill = 1.0)
{
    g.validate();
    if (half == 0 || 2 * half + 2 > std::min(g.width, g.height))
        fail(ErrorKind::parameter, "obstacle block does not fit inside the map");
    std::vector<double> v(g.cell_count(), fill);
    const std::size_t ci = g.width / 2, cj = g.height / 2;
    for (std::size_t j = cj - half; j < cj + half; ++j)
        for (std::size_t i = ci - half; i < ci + half; ++i) v[g.index(i, j)] = 0.0;
    return {g, std::move(v)};
}

} // namespace ghpf

#endif // GHPF_GENERATORS_HPP
