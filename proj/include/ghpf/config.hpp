#ifndef GHPF_CONFIG_HPP
#define GHPF_CONFIG_HPP

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "drift.hpp"
#include "error.hpp"
#include "field.hpp"
#include "generators.hpp"
#include "map_io.hpp"
#include "policy.hpp"
#include "solver.hpp"

namespace ghpf {

inline constexpr int schema_version = 1;

using Json = nlohmann::ordered_json;

/// Where a probability map comes from: a file, or a named generator.
struct MapSource {
    std::string path;      ///< PGM or CSV; relative paths resolve against base_dir
    std::string generator; ///< empty | u_obstacle | multimodal | white_noise | block
    std::size_t width = 128;
    std::size_t height = 128;
    double spacing = 1.0;
    std::uint64_t seed = 0;
    std::size_t half = 6; ///< block generator half side
    std::optional<double> quantize; ///< binary threshold applied after loading

    [[nodiscard]] bool empty() const noexcept { return path.empty() && generator.empty(); }
};

/// Where a drift field comes from.
struct DriftSource {
    std::string type = "none"; ///< none | vortex | noise | files
    bool ccw = true;
    double strength = 1.0;
    std::optional<Vec2> center; ///< vortex center, default mid-domain
    std::uint64_t seed = 7;
    std::size_t correlation_length = 8;
    std::string x_path, y_path; ///< files: split layout, or x_path alone interleaved
};

struct RunConfig {
    MapSource map;
    std::optional<Vec2> start, target;
    SolverConfig solver;
    StreamlineParams path;
    DriftConfig drift;
    DriftSource drift_source;
    std::uint64_t seed = 1; ///< seeds random trial points and perturbations
    std::string out_dir;
    std::filesystem::path base_dir; ///< not serialized; set by the loader

    [[nodiscard]] Endpoints endpoints() const
    {
        if (!start || !target) fail(ErrorKind::parameter, "both --start and --target are required");
        return {*start, *target};
    }
};

/// Parses "x,y".
inline Vec2 parse_point(std::string_view s)
{
    const auto comma = s.find(',');
    if (comma == std::string_view::npos) fail(ErrorKind::parameter, "expected a point as x,y but got '" + std::string(s) + "'");
    auto num = [&](std::string_view t) {
        while (!t.empty() && t.front() == ' ') t.remove_prefix(1);
        while (!t.empty() && t.back() == ' ') t.remove_suffix(1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v))
            fail(ErrorKind::parameter, "bad coordinate '" + std::string(t) + "'");
        return v;
    };
    return {num(s.substr(0, comma)), num(s.substr(comma + 1))};
}

namespace detail {

inline void reject_unknown(const Json& j, std::initializer_list<const char*> keys, const char* where)
{
    if (!j.is_object()) fail(ErrorKind::parameter, std::string(where) + " must be a JSON object");
    const std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!known.contains(k)) fail(ErrorKind::parameter, std::string("unknown key '") + k + "' in " + where);
}

template <class T>
void read(const Json& j, const char* key, T& out)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parameter, std::string("bad value for '") + key + "': " + e.what());
    }
}

inline Json point_json(Vec2 p) { return Json::array({p.x, p.y}); }

inline Vec2 point_from(const Json& j, const char* key)
{
    if (j.is_string()) return parse_point(j.get<std::string>());
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(ErrorKind::parameter, std::string("'") + key + "' must be [x, y] or \"x,y\"");
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace detail

inline Json to_json(const MapSource& m)
{
    Json j;
    if (!m.path.empty()) j["path"] = m.path;
    if (!m.generator.empty()) {
        j["generator"] = m.generator;
        j["width"] = m.width;
        j["height"] = m.height;
        j["seed"] = m.seed;
        if (m.generator == "block") j["half"] = m.half;
    }
    j["spacing"] = m.spacing;
    if (m.quantize) j["quantize"] = *m.quantize;
    return j;
}

inline MapSource map_source_from(const Json& j)
{
    detail::reject_unknown(j, {"path", "generator", "width", "height", "spacing", "seed", "half", "quantize"}, "map");
    MapSource m;
    detail::read(j, "path", m.path);
    detail::read(j, "generator", m.generator);
    detail::read(j, "width", m.width);
    detail::read(j, "height", m.height);
    detail::read(j, "spacing", m.spacing);
    detail::read(j, "seed", m.seed);
    detail::read(j, "half", m.half);
    if (j.contains("quantize")) m.quantize = j.at("quantize").get<double>();
    return m;
}

inline Json to_json(const DriftSource& d)
{
    Json j;
    j["type"] = d.type;
    if (d.type == "vortex") {
        j["ccw"] = d.ccw;
        j["strength"] = d.strength;
        if (d.center) j["center"] = detail::point_json(*d.center);
    } else if (d.type == "noise") {
        j["seed"] = d.seed;
        j["correlation_length"] = d.correlation_length;
    } else if (d.type == "files") {
        j["x_path"] = d.x_path;
        if (!d.y_path.empty()) j["y_path"] = d.y_path;
    }
    return j;
}

inline DriftSource drift_source_from(const Json& j)
{
    detail::reject_unknown(j, {"type", "ccw", "strength", "center", "seed", "correlation_length", "x_path", "y_path"},
                           "drift_source");
    DriftSource d;
    detail::read(j, "type", d.type);
    detail::read(j, "ccw", d.ccw);
    detail::read(j, "strength", d.strength);
    if (j.contains("center")) d.center = detail::point_from(j.at("center"), "center");
    detail::read(j, "seed", d.seed);
    detail::read(j, "correlation_length", d.correlation_length);
    detail::read(j, "x_path", d.x_path);
    detail::read(j, "y_path", d.y_path);
    if (d.type != "none" && d.type != "vortex" && d.type != "noise" && d.type != "files")
        fail(ErrorKind::parameter, "drift type must be none, vortex, noise or files");
    return d;
}

inline Json to_json(const RunConfig& c)
{
    Json j;
    j["schema_version"] = schema_version;
    j["map"] = to_json(c.map);
    if (c.start) j["start"] = detail::point_json(*c.start);
    if (c.target) j["target"] = detail::point_json(*c.target);
    j["solver"] = {{"omega", c.solver.omega},
                   {"tol", c.solver.tol},
                   {"max_iters", c.solver.max_iters},
                   {"epsilon", c.solver.epsilon_floor},
                   {"pin_start", c.solver.pin_start}};
    j["path"] = {{"step_size", c.path.step_size},
                 {"capture_radius", c.path.capture_radius},
                 {"max_steps", c.path.max_steps},
                 {"stall_threshold", c.path.stall_threshold},
                 {"max_refinements", c.path.max_refinements}};
    j["drift"] = {{"k", c.drift.k},
                  {"alpha", c.drift.alpha},
                  {"outer_tol", c.drift.outer_tol},
                  {"outer_max_iters", c.drift.outer_max_iters}};
    j["drift_source"] = to_json(c.drift_source);
    j["seed"] = c.seed;
    if (!c.out_dir.empty()) j["out_dir"] = c.out_dir;
    return j;
}

/// Reads a config object. Missing keys keep their defaults; unknown keys and
/// a schema_version other than the current one are parameter errors.
inline RunConfig run_config_from(const Json& j, RunConfig c = {})
{
    detail::reject_unknown(j,
                           {"schema_version", "name", "kind", "checks", "map", "start", "target", "solver", "path",
                            "drift", "drift_source", "seed", "out_dir"},
                           "config");
    if (!j.contains("schema_version")) fail(ErrorKind::parameter, "config lacks schema_version");
    if (j.at("schema_version") != schema_version)
        fail(ErrorKind::parameter, "unsupported config schema_version " + j.at("schema_version").dump());
    if (j.contains("map")) c.map = map_source_from(j.at("map"));
    if (j.contains("start")) c.start = detail::point_from(j.at("start"), "start");
    if (j.contains("target")) c.target = detail::point_from(j.at("target"), "target");
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        detail::reject_unknown(s, {"omega", "tol", "max_iters", "epsilon", "pin_start"}, "solver");
        detail::read(s, "omega", c.solver.omega);
        detail::read(s, "tol", c.solver.tol);
        detail::read(s, "max_iters", c.solver.max_iters);
        detail::read(s, "epsilon", c.solver.epsilon_floor);
        detail::read(s, "pin_start", c.solver.pin_start);
    }
    if (j.contains("path")) {
        const auto& s = j.at("path");
        detail::reject_unknown(s, {"step_size", "capture_radius", "max_steps", "stall_threshold", "max_refinements"},
                               "path");
        detail::read(s, "step_size", c.path.step_size);
        detail::read(s, "capture_radius", c.path.capture_radius);
        detail::read(s, "max_steps", c.path.max_steps);
        detail::read(s, "stall_threshold", c.path.stall_threshold);
        detail::read(s, "max_refinements", c.path.max_refinements);
    }
    if (j.contains("drift")) {
        const auto& s = j.at("drift");
        detail::reject_unknown(s, {"k", "alpha", "outer_tol", "outer_max_iters"}, "drift");
        detail::read(s, "k", c.drift.k);
        detail::read(s, "alpha", c.drift.alpha);
        detail::read(s, "outer_tol", c.drift.outer_tol);
        detail::read(s, "outer_max_iters", c.drift.outer_max_iters);
    }
    if (j.contains("drift_source")) c.drift_source = drift_source_from(j.at("drift_source"));
    detail::read(j, "seed", c.seed);
    detail::read(j, "out_dir", c.out_dir);
    return c;
}

inline Json parse_json_file(const std::filesystem::path& path)
{
    const std::string text = detail::read_file(path);
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::parameter, path.string() + ": " + e.what());
    }
}

inline RunConfig load_run_config(const std::filesystem::path& path)
{
    RunConfig c = run_config_from(parse_json_file(path));
    c.base_dir = path.parent_path();
    return c;
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    const std::filesystem::path q(p);
    return q.is_absolute() || base.empty() ? q : base / q;
}

/// Builds the probability map described by a source.
inline ProbabilityGrid build_map(const MapSource& m, const std::filesystem::path& base_dir = {})
{
    if (!m.path.empty() && !m.generator.empty())
        fail(ErrorKind::parameter, "map takes either a path or a generator, not both");
    ProbabilityGrid p;
    if (!m.path.empty()) {
        const auto file = resolve(base_dir, m.path);
        p = load_probability_map(file, map_format_from_path(file), Rescale::max, m.spacing);
    } else {
        const GridGeometry g{m.width, m.height, m.spacing};
        if (m.generator == "empty") p = ProbabilityGrid(g, 1.0);
        else if (m.generator == "u_obstacle") p = u_obstacle_map(g);
        else if (m.generator == "multimodal") p = multimodal_map(g, m.seed);
        else if (m.generator == "white_noise") p = make_white_noise_map(g, m.seed);
        else if (m.generator == "block") p = block_obstacle_map(g, m.half);
        else if (m.generator.empty()) fail(ErrorKind::parameter, "no map given (use --map or a config map entry)");
        else fail(ErrorKind::parameter, "unknown map generator '" + m.generator + "'");
    }
    if (m.quantize) p = binary_quantize(p, *m.quantize);
    require_admissible(p);
    return p;
}

/// Builds the drift field described by a source on geometry g.
inline VectorFieldGrid build_drift(const DriftSource& d, const GridGeometry& g,
                                   const std::filesystem::path& base_dir = {})
{
    if (d.type == "none") return VectorFieldGrid(g);
    if (d.type == "vortex") {
        const Vec2 c = d.center.value_or(Vec2{0.5 * g.extent_x(), 0.5 * g.extent_y()});
        return vortex_field(g, c, d.strength, d.ccw);
    }
    if (d.type == "noise") return correlated_noise_field(g, d.seed, d.correlation_length);
    if (d.x_path.empty()) fail(ErrorKind::parameter, "drift files need at least x_path");
    auto f = d.y_path.empty()
                 ? load_drift_csv(resolve(base_dir, d.x_path), {}, DriftLayout::interleaved, g.spacing)
                 : load_drift_csv(resolve(base_dir, d.x_path), resolve(base_dir, d.y_path), DriftLayout::split,
                                  g.spacing);
    require_same_geometry(g, f.geometry(), "drift field");
    return f;
}

} // namespace ghpf

#endif // GHPF_CONFIG_HPP
