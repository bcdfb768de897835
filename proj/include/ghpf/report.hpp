#ifndef GHPF_REPORT_HPP
#define GHPF_REPORT_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "critical_points.hpp"
#include "drift.hpp"
#include "map_io.hpp"
#include "oracle.hpp"
#include "policy.hpp"
#include "solver.hpp"

namespace ghpf {

/// Solver summary. Wall time is left out unless asked for, so that replayed
/// runs produce identical bodies.
inline Json to_json(const SolverReport& r, bool with_time = false)
{
    Json j{{"iterations", r.iterations},
           {"final_residual", r.final_residual},
           {"converged", r.converged},
           {"dirichlet_energy", r.dirichlet_energy}};
    if (with_time) j["wall_time_s"] = r.wall_time;
    return j;
}

inline Json to_json(const CriticalPointReport& r)
{
    Json pts = Json::array();
    for (const auto& p : r.points) {
        pts.push_back({{"x", p.location.x},
                       {"y", p.location.y},
                       {"grad_norm", p.grad_norm},
                       {"hessian_det", p.hessian_det},
                       {"kind", to_string(p.kind)}});
    }
    return {{"grad_tol", r.grad_tol},
            {"det_tol", r.det_tol},
            {"saddles", r.count(CriticalKind::saddle)},
            {"degenerate", r.count(CriticalKind::degenerate)},
            {"extrema", r.count(CriticalKind::extremum)},
            {"points", pts}};
}

inline Json to_json(const PathComparison& c)
{
    return {{"ghpf_risk", c.ghpf_risk},
            {"oracle_risk", c.oracle_risk},
            {"ratio", c.ratio},
            {"ghpf_length", c.ghpf_length},
            {"oracle_length", c.oracle_length},
            {"ghpf_max_turn_rate", c.ghpf_max_turn_rate},
            {"oracle_max_turn_rate", c.oracle_max_turn_rate}};
}

inline Json to_json(const std::vector<OuterIterate>& trace)
{
    Json a = Json::array();
    for (const auto& t : trace) {
        a.push_back({{"iteration", t.iteration},
                     {"max_p_change", t.max_change},
                     {"inner_iterations", t.inner_iterations},
                     {"inner_residual", t.inner_residual},
                     {"inner_converged", t.inner_converged}});
    }
    return a;
}

/// Rows x,y,p,grad_norm,ds,drift_diff; the last column is blank when no
/// differential is defined at that sample.
inline std::string trajectory_csv(const Trajectory& t, const std::vector<std::optional<double>>& diff = {})
{
    std::string out = "x,y,p,grad_norm,ds,drift_diff\n";
    for (std::size_t k = 0; k < t.samples.size(); ++k) {
        const auto& s = t.samples[k];
        for (double v : {s.position.x, s.position.y, s.p, s.grad_norm, s.ds}) {
            detail::append_number(out, v);
            out.push_back(',');
        }
        if (k < diff.size() && diff[k]) detail::append_number(out, *diff[k]);
        out.push_back('\n');
    }
    return out;
}

/// Rows cell_x,cell_y,ux,uy of the unit policy -grad V / |grad V| (zero where
/// the gradient vanishes).
inline std::string policy_csv(const PotentialGrid& v)
{
    const auto grads = cell_gradients(v);
    const auto& g = v.geometry();
    std::string out = "cell_x,cell_y,ux,uy\n";
    for (std::size_t j = 0; j < g.height; ++j) {
        for (std::size_t i = 0; i < g.width; ++i) {
            const Vec2 d = grads(i, j);
            const double n = d.norm();
            const Vec2 u = n > 0.0 ? d * (-1.0 / n) : Vec2{};
            out += std::to_string(i) + ',' + std::to_string(j) + ',';
            detail::append_number(out, u.x);
            out.push_back(',');
            detail::append_number(out, u.y);
            out.push_back('\n');
        }
    }
    return out;
}

inline std::string oracle_csv(const OraclePath& p)
{
    std::string out = "cell_i,cell_j\n";
    for (const auto& c : p.cells) out += std::to_string(c.i) + ',' + std::to_string(c.j) + '\n';
    return out;
}

inline void write_json(const std::filesystem::path& path, const Json& j)
{
    detail::write_file(path, j.dump(2) + "\n");
}

inline void write_text(const std::filesystem::path& path, std::string_view body) { detail::write_file(path, body); }

} // namespace ghpf

#endif // GHPF_REPORT_HPP
