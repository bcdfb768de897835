#include <gtest/gtest.h>

#include <chrono>
#include <numbers>

#include "support.hpp"

using namespace ghpf;

namespace {

double autocorrelation_x(const VectorFieldGrid& f, std::size_t lag)
{
    const auto& g = f.geometry();
    double mean = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) mean += f[k].x;
    mean /= static_cast<double>(f.size());
    double c0 = 0.0, cl = 0.0;
    for (std::size_t j = 0; j < g.height; ++j) {
        for (std::size_t i = 0; i < g.width; ++i) {
            const double a = f(i, j).x - mean;
            c0 += a * a;
            cl += a * (f((i + lag) % g.width, j).x - mean);
        }
    }
    return cl / c0;
}

Fixture fixture(const std::string& name)
{
    return load_fixture(std::filesystem::path(GHPF_FIXTURE_DIR) / (name + ".json"));
}

} // namespace

TEST(PointCost, WorkedExamples)
{
    EXPECT_EQ(point_cost_fc({-1, 0}, {1, 0}, 1.0), 0.0);
    EXPECT_NEAR(point_cost_fc({-1, 0}, {0, 1}, 1.0), 0.5, 1e-15);
    EXPECT_EQ(point_cost_fc({1, 0}, {1, 0}, 1.0), 1.0);
    EXPECT_EQ(point_cost_fc({0, 0}, {1, 0}, 3.0), 1.5);
    EXPECT_EQ(point_cost_fc({1, 0}, {0, 0}, 3.0), 1.5);
}

TEST(PointCost, DescriptorComplementsCostExactly)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int n = 0; n < 200; ++n) {
        const Vec2 gv{u(rng), u(rng)}, psi{u(rng), u(rng)};
        const double k = 0.1 + std::abs(u(rng));
        const double fc = point_cost_fc(gv, psi, k);
        EXPECT_DOUBLE_EQ(fc + drift_descriptor(gv, psi, k), k);
        EXPECT_GE(fc, 0.0);
        EXPECT_LE(fc, k);
        for (double s : {0.01, 3.0, 250.0}) {
            EXPECT_NEAR(point_cost_fc(gv * s, psi, k), fc, 1e-14 * k);
            EXPECT_NEAR(point_cost_fc(gv, psi * s, k), fc, 1e-14 * k);
        }
    }
}

TEST(PointCost, DescriptorLimits)
{
    EXPECT_EQ(drift_descriptor({-1, 0}, {1, 0}, 2.0), 2.0);
    EXPECT_EQ(drift_descriptor({1, 0}, {1, 0}, 2.0), 0.0);
    EXPECT_EQ(drift_descriptor({0, 0}, {1, 0}, 2.0), 1.0);
}

TEST(PointCost, NonPositiveCeilingIsParameterError)
{
    for (double k : {0.0, -1.0}) {
        try {
            static_cast<void>(point_cost_fc({1, 0}, {1, 0}, k));
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::parameter);
        }
    }
    DriftConfig d;
    d.alpha = 0.0;
    EXPECT_THROW(d.validate(), Error);
    d = {};
    d.outer_max_iters = 0;
    EXPECT_THROW(d.validate(), Error);
}

TEST(Vortex, RotationConventions)
{
    const GridGeometry g{21, 21, 1.0};
    const Vec2 c{10.5, 10.5};
    const auto ccw = vortex_field(g, c, 1.0, true);
    const Vec2 right = ccw(15, 10), above = ccw(10, 15);
    EXPECT_NEAR(right.x, 0.0, 1e-15);
    EXPECT_GT(right.y, 0.0);
    EXPECT_LT(above.x, 0.0);
    EXPECT_NEAR(above.y, 0.0, 1e-15);
    const auto cw = vortex_field(g, c, 1.0, false);
    EXPECT_LT(cw(15, 10).y, 0.0);
    EXPECT_NEAR(right.norm(), 1.0, 1e-15);
    EXPECT_EQ(ccw(10, 10).norm(), 0.0);
    EXPECT_THROW(static_cast<void>(vortex_field(g, {30.0, 1.0}, 1.0, true)), Error);
}

TEST(Vortex, DiscreteDivergenceSumsToZero)
{
    const GridGeometry g{40, 40, 1.0};
    const auto f = vortex_field(g, {20.0, 20.0}, 2.0, true);
    double sum = 0.0, mag = 0.0;
    for (std::size_t j = 1; j + 1 < g.height; ++j) {
        for (std::size_t i = 1; i + 1 < g.width; ++i) {
            sum += 0.5 * (f(i + 1, j).x - f(i - 1, j).x) + 0.5 * (f(i, j + 1).y - f(i, j - 1).y);
            mag += f(i, j).norm();
        }
    }
    EXPECT_LT(std::abs(sum), 1e-12 * mag);
}

TEST(CorrelatedNoise, UnitLengthIsRawNoise)
{
    const GridGeometry g{16, 12, 1.0};
    const auto f = correlated_noise_field(g, 3, 1, false);
    std::mt19937_64 rng(3);
    for (std::size_t k = 0; k < g.cell_count(); ++k) {
        const double x = uniform_symmetric(rng);
        const double y = uniform_symmetric(rng);
        EXPECT_EQ(f[k].x, x);
        EXPECT_EQ(f[k].y, y);
    }
}

TEST(CorrelatedNoise, SeedDeterminismAndScaling)
{
    const GridGeometry g{32, 32, 1.0};
    EXPECT_TRUE(correlated_noise_field(g, 7, 8) == correlated_noise_field(g, 7, 8));
    EXPECT_FALSE(correlated_noise_field(g, 7, 8) == correlated_noise_field(g, 8, 8));
    double mx = 0.0;
    const auto f = correlated_noise_field(g, 7, 8);
    for (std::size_t k = 0; k < f.size(); ++k) mx = std::max(mx, f[k].norm());
    EXPECT_NEAR(mx, 1.0, 1e-15);
    EXPECT_THROW(static_cast<void>(correlated_noise_field(g, 7, 0)), Error);
}

TEST(CorrelatedNoise, AutocorrelationDropsBelowHalfAtLagL)
{
    const GridGeometry g{256, 256, 1.0};
    for (std::size_t len : {4u, 8u}) {
        const auto f = correlated_noise_field(g, 11, len);
        EXPECT_GT(autocorrelation_x(f, 1), 0.5) << len;
        EXPECT_LT(autocorrelation_x(f, len), 0.5) << len;
    }
}

TEST(OuterLoop, ZeroDriftReachesNeutralFixedPointInOneStep)
{
    const auto obstacles = block_obstacle_map(GridGeometry{32, 32, 1.0}, 4);
    const Endpoints e{{3.5, 3.5}, {28.5, 27.5}};
    DriftConfig d;
    d.alpha = 1.0;
    SolverConfig s;
    s.tol = 1e-10;
    const auto sol = solve_drift_bvp(VectorFieldGrid(obstacles.geometry()), obstacles, e, d, s);
    ASSERT_TRUE(sol.converged());
    EXPECT_EQ(sol.trace.size(), 1u);
    for (std::size_t k = 0; k < obstacles.size(); ++k)
        EXPECT_EQ(sol.effective_p[k], obstacles.is_zero(k) ? 0.0 : 0.5);

    // Uniform scaling of P leaves V unchanged; only the floor ratio at the
    // obstacle faces differs, which moves V by far less than the tolerance.
    const auto [plain, rep] = sor_solve(obstacles, e, s);
    double diff = 0.0;
    for (std::size_t k = 0; k < obstacles.size(); ++k) diff = std::max(diff, std::abs(plain[k] - sol.potential[k]));
    EXPECT_LT(diff, 1e-5);
}

TEST(OuterLoop, ZeroDriftOnAnEmptyMapIsBitIdenticalToThePlainSolve)
{
    const ProbabilityGrid p(GridGeometry{24, 24, 1.0}, 1.0);
    const Endpoints e{{2.5, 2.5}, {20.5, 21.5}};
    DriftConfig d;
    d.alpha = 1.0;
    const auto sol = solve_drift_bvp(VectorFieldGrid(p.geometry()), p, e, d, {});
    const auto [plain, rep] = sor_solve(p, e, {});
    EXPECT_TRUE(sol.potential.values() == plain.values());
    EXPECT_EQ(sol.report.iterations, rep.iterations);
}

TEST(OuterLoop, ObstacleMaskPreservedAtEveryIterate)
{
    const auto obstacles = block_obstacle_map(GridGeometry{40, 40, 1.0}, 5);
    const auto psi = correlated_noise_field(obstacles.geometry(), 7, 6);
    DriftConfig d;
    d.outer_max_iters = 6;
    const auto sol = solve_drift_bvp(psi, obstacles, {{3.5, 3.5}, {36.5, 36.5}}, d, {});
    EXPECT_EQ(sol.effective_p.zero_mask(), obstacles.zero_mask());
    for (std::size_t k = 0; k < obstacles.size(); ++k)
        if (!obstacles.is_zero(k)) {
            EXPECT_GT(sol.effective_p[k], 0.0);
        }
    ASSERT_FALSE(sol.trace.empty());
    for (const auto& it : sol.trace) EXPECT_TRUE(it.inner_converged);
}

TEST(OuterLoop, OuterCapIsReportedNotThrown)
{
    const ProbabilityGrid p(GridGeometry{32, 32, 1.0}, 1.0);
    const auto psi = vortex_field(p.geometry(), {16.0, 16.0}, 1.0, true);
    DriftConfig d;
    d.outer_max_iters = 1;
    d.outer_tol = 1e-12;
    const auto sol = solve_drift_bvp(psi, p, {{3.5, 3.5}, {28.5, 28.5}}, d, {});
    EXPECT_FALSE(sol.outer_converged);
    EXPECT_EQ(sol.trace.size(), 1u);
    EXPECT_GT(sol.trace[0].max_change, d.outer_tol);
}

TEST(OuterLoop, EndpointInObstacleIsPrecondition)
{
    const auto obstacles = block_obstacle_map(GridGeometry{20, 20, 1.0}, 3);
    try {
        static_cast<void>(solve_drift_bvp(VectorFieldGrid(obstacles.geometry()), obstacles,
                                          {{10.0, 10.0}, {18.5, 18.5}}, {}, {}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::precondition);
    }
}

TEST(Utility, ParallelIsZeroAntiParallelIsKTimesLength)
{
    const ProbabilityGrid p(GridGeometry{20, 6, 1.0}, 1.0);
    const auto line = straight_path(p, {1.5, 3.0}, {18.5, 3.0}, 0.25);
    EXPECT_NEAR(line.length(), 17.0, 1e-12);
    const double k = 2.5;
    EXPECT_EQ(heading_utility(line, VectorFieldGrid(p.geometry(), Vec2{1.0, 0.0}), k), 0.0);
    EXPECT_NEAR(heading_utility(line, VectorFieldGrid(p.geometry(), Vec2{-0.3, 0.0}), k), k * 17.0, 1e-12);
    EXPECT_NEAR(heading_utility(line, VectorFieldGrid(p.geometry(), Vec2{0.0, 1.0}), k), 0.5 * k * 17.0, 1e-12);
}

TEST(Utility, AccumulatedAgreesWithHeadingOnAStraightSolve)
{
    const ProbabilityGrid p(GridGeometry{60, 3, 1.0}, 1.0);
    const Endpoints e{{0.5, 1.5}, {59.5, 1.5}};
    const auto [v, rep] = sor_solve(p, e, {});
    const auto t = integrate_streamline(v, p, {5.5, 1.5}, e.target);
    ASSERT_TRUE(t.reached());
    const VectorFieldGrid against(p.geometry(), Vec2{-1.0, 0.0});
    EXPECT_NEAR(accumulated_utility(t, against, v, 1.0), t.length(), 1e-9);
    EXPECT_NEAR(heading_utility(t, against, 1.0), t.length(), 1e-9);
    EXPECT_EQ(accumulated_utility(t, VectorFieldGrid(p.geometry(), Vec2{1.0, 0.0}), v, 1.0), 0.0);
}

TEST(DriftFixtures, VortexPathBeatsTheStraightLine)
{
    const auto fx = fixture("vortex_box");
    const auto& c = fx.config;
    const auto obstacles = build_map(c.map, c.base_dir);
    const auto psi = build_drift(c.drift_source, obstacles.geometry(), c.base_dir);
    const auto t0 = std::chrono::steady_clock::now();
    const auto sol = solve_drift_bvp(psi, obstacles, c.endpoints(), c.drift, c.solver);
    const auto path = integrate_streamline(sol.potential, sol.effective_p, c.endpoints().start, c.endpoints().target,
                                           c.path);
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 60.0);
    ASSERT_TRUE(path.reached());
    const double u_path = heading_utility(path, psi, c.drift.k);
    const double u_line = heading_utility(
        straight_path(obstacles, c.endpoints().start, c.endpoints().target, c.path.step_size), psi, c.drift.k);
    EXPECT_LT(u_path, u_line);
    EXPECT_GE(harvesting_fraction(heading_drift_differential(path, psi)), 0.7);
}

TEST(DriftFixtures, NoiseWithObstacleAvoidsTheBlock)
{
    const auto fx = fixture("noise_drift_obstacle");
    const auto& c = fx.config;
    const auto obstacles = build_map(c.map, c.base_dir);
    const auto psi = build_drift(c.drift_source, obstacles.geometry(), c.base_dir);
    const auto sol = solve_drift_bvp(psi, obstacles, c.endpoints(), c.drift, c.solver);
    const auto path = integrate_streamline(sol.potential, sol.effective_p, c.endpoints().start, c.endpoints().target,
                                           c.path);
    ASSERT_TRUE(path.reached());
    for (const auto& s : path.samples) EXPECT_GT(obstacles.sample(s.position), 0.0);
    EXPECT_GE(harvesting_fraction(heading_drift_differential(path, psi)), 0.7);
}
