#ifndef GHPF_TESTS_SUPPORT_HPP
#define GHPF_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <ghpf/ghpf.hpp>

namespace ghpf::test {

inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("ghpf_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_bytes(const std::filesystem::path& path, const std::string& body)
{
    std::ofstream out(path, std::ios::binary);
    out << body;
}

inline std::string read_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Map built from f(i, j) -> P.
inline ProbabilityGrid map_from(std::size_t w, std::size_t h, const std::function<double(std::size_t, std::size_t)>& f,
                                double spacing = 1.0)
{
    GridGeometry g{w, h, spacing};
    std::vector<double> v(g.cell_count());
    for (std::size_t j = 0; j < h; ++j)
        for (std::size_t i = 0; i < w; ++i) v[g.index(i, j)] = f(i, j);
    return {g, std::move(v)};
}

/// Minimum risk over every simple 8-connected path, found by depth-first
/// enumeration. Edge risks are computed here from first principles, not with
/// the oracle's helpers. Each complete path is summed from its lower-index end
/// cell (the oracle's reporting convention); partial paths whose running cost
/// already exceeds the best complete one are cut, which cannot drop the
/// optimum since all edge risks are positive.
inline double brute_force_min_risk(const ProbabilityGrid& p, Cell s, Cell t)
{
    const auto& g = p.geometry();
    const auto w = static_cast<int>(g.width), h = static_cast<int>(g.height);
    std::vector<char> on_path(g.cell_count(), 0);
    std::vector<std::pair<int, int>> path;
    double best = std::numeric_limits<double>::infinity();
    auto val = [&](int i, int j) { return p(static_cast<std::size_t>(i), static_cast<std::size_t>(j)); };
    auto weight = [&](std::pair<int, int> a, std::pair<int, int> b) {
        const bool diag = a.first != b.first && a.second != b.second;
        return 0.5 * (1.0 / val(a.first, a.second) + 1.0 / val(b.first, b.second)) * (diag ? std::sqrt(2.0) : 1.0) *
               g.spacing;
    };
    const bool forward = g.index(s) <= g.index(t);

    std::function<void(int, int, double)> dfs = [&](int i, int j, double cost) {
        if (cost > best * (1.0 + 1e-12)) return;
        path.emplace_back(i, j);
        on_path[static_cast<std::size_t>(j * w + i)] = 1;
        if (i == static_cast<int>(t.i) && j == static_cast<int>(t.j)) {
            double total = 0.0;
            const std::size_t n = path.size();
            for (std::size_t k = 1; k < n; ++k)
                total += forward ? weight(path[k - 1], path[k]) : weight(path[n - k], path[n - k - 1]);
            best = std::min(best, total);
        } else {
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (!di && !dj) continue;
                    const int ni = i + di, nj = j + dj;
                    if (ni < 0 || nj < 0 || ni >= w || nj >= h) continue;
                    if (val(ni, nj) == 0.0 || on_path[static_cast<std::size_t>(nj * w + ni)]) continue;
                    if (di && dj && (val(ni, j) == 0.0 || val(i, nj) == 0.0)) continue;
                    dfs(ni, nj, cost + weight({i, j}, {ni, nj}));
                }
            }
        }
        on_path[static_cast<std::size_t>(j * w + i)] = 0;
        path.pop_back();
    };
    dfs(static_cast<int>(s.i), static_cast<int>(s.j), 0.0);
    return best;
}

/// Random 6x6-style map: values in [0.1, 1] with a sprinkling of zero cells,
/// start and target corners kept admissible.
inline ProbabilityGrid random_small_map(std::size_t n, std::uint64_t seed, double zero_fraction = 0.2)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GridGeometry g{n, n, 1.0};
    std::vector<double> v(g.cell_count());
    for (auto& x : v) x = u(rng) < zero_fraction ? 0.0 : 0.1 + 0.9 * u(rng);
    v.front() = 0.1 + 0.9 * u(rng);
    v.back() = 0.1 + 0.9 * u(rng);
    return {g, std::move(v)};
}

inline int run_command(const std::string& cmd)
{
    const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace ghpf::test

#endif // GHPF_TESTS_SUPPORT_HPP
