#ifndef GHPF_MAP_IO_HPP
#define GHPF_MAP_IO_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "error.hpp"
#include "field.hpp"
#include "geometry.hpp"

namespace ghpf {

enum class MapFormat { pgm, csv };
enum class Rescale { max, none };

/// Drift files come either as two CSV files (vx, vy) or one CSV whose rows
/// interleave vx,vy pairs.
enum class DriftLayout { split, interleaved };

namespace detail {

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view body)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot write '" + path.string() + "'");
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) fail(ErrorKind::io, "short write to '" + path.string() + "'");
}

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view tok, const std::string& where)
{
    tok = trim(tok);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size())
        fail(ErrorKind::format, where + ": cannot parse '" + std::string(tok) + "' as a number");
    return v;
}

struct Table {
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::vector<double> values;
};

inline Table parse_csv(std::string_view text, const std::string& where)
{
    Table t;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        std::size_t count = 0;
        while (true) {
            const auto comma = line.find(',');
            t.values.push_back(parse_double(line.substr(0, comma), where + ":" + std::to_string(line_no)));
            ++count;
            if (comma == std::string_view::npos) break;
            line = line.substr(comma + 1);
        }
        if (t.rows == 0) t.cols = count;
        else if (count != t.cols)
            fail(ErrorKind::shape, where + ":" + std::to_string(line_no) + ": expected " + std::to_string(t.cols) +
                                       " columns, found " + std::to_string(count));
        ++t.rows;
    }
    if (t.rows == 0) fail(ErrorKind::format, where + ": empty CSV");
    return t;
}

inline void append_number(std::string& out, double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

/// Reads the next whitespace-separated PGM header token, skipping comments.
inline std::string_view pgm_token(std::string_view data, std::size_t& pos)
{
    while (pos < data.size()) {
        const char c = data[pos];
        if (c == '#') {
            while (pos < data.size() && data[pos] != '\n') ++pos;
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++pos;
        } else {
            break;
        }
    }
    const std::size_t begin = pos;
    while (pos < data.size() && data[pos] != ' ' && data[pos] != '\t' && data[pos] != '\n' && data[pos] != '\r' &&
           data[pos] != '#')
        ++pos;
    return data.substr(begin, pos - begin);
}

inline std::size_t pgm_uint(std::string_view tok, const std::string& where)
{
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size())
        fail(ErrorKind::format, where + ": bad PGM header field '" + std::string(tok) + "'");
    return v;
}

} // namespace detail

struct RawImage {
    GridGeometry geometry;
    std::vector<double> values; // pixel / maxval
};

/// Decodes P2 (ASCII) or P5 (binary) grayscale. File row 0 becomes grid row j = 0.
inline RawImage decode_pgm(std::string_view data, const std::string& where, double spacing = 1.0)
{
    std::size_t pos = 0;
    const auto magic = detail::pgm_token(data, pos);
    if (magic != "P2" && magic != "P5") fail(ErrorKind::format, where + ": not a P2/P5 PGM file");
    const std::size_t w = detail::pgm_uint(detail::pgm_token(data, pos), where);
    const std::size_t h = detail::pgm_uint(detail::pgm_token(data, pos), where);
    const std::size_t maxval = detail::pgm_uint(detail::pgm_token(data, pos), where);
    if (maxval == 0 || maxval > 65535) fail(ErrorKind::format, where + ": PGM maxval must be in [1, 65535]");
    if (w == 0 || h == 0) fail(ErrorKind::format, where + ": empty PGM image");

    RawImage img{{w, h, spacing}, std::vector<double>(w * h)};
    const double scale = 1.0 / static_cast<double>(maxval);
    if (magic == "P5") {
        ++pos; // single whitespace byte after maxval
        const std::size_t bytes = maxval < 256 ? 1 : 2;
        if (data.size() < pos + w * h * bytes) fail(ErrorKind::format, where + ": truncated PGM raster");
        for (std::size_t k = 0; k < w * h; ++k) {
            std::size_t px = static_cast<unsigned char>(data[pos + k * bytes]);
            if (bytes == 2) px = (px << 8) | static_cast<unsigned char>(data[pos + k * bytes + 1]);
            if (px > maxval) fail(ErrorKind::format, where + ": pixel exceeds maxval");
            img.values[k] = static_cast<double>(px) * scale;
        }
    } else {
        for (std::size_t k = 0; k < w * h; ++k) {
            const auto tok = detail::pgm_token(data, pos);
            if (tok.empty()) fail(ErrorKind::format, where + ": truncated PGM raster");
            const std::size_t px = detail::pgm_uint(tok, where);
            if (px > maxval) fail(ErrorKind::format, where + ": pixel exceeds maxval");
            img.values[k] = static_cast<double>(px) * scale;
        }
    }
    return img;
}

/// Loads a probability map. Raw values must be finite and non-negative; by
/// default they are rescaled so that the maximum is 1.
inline ProbabilityGrid load_probability_map(const std::filesystem::path& path, MapFormat format,
                                            Rescale rescale = Rescale::max, double spacing = 1.0)
{
    const std::string where = path.string();
    const std::string text = detail::read_file(path);
    GridGeometry geometry;
    std::vector<double> values;
    if (format == MapFormat::pgm) {
        auto img = decode_pgm(text, where, spacing);
        geometry = img.geometry;
        values = std::move(img.values);
    } else {
        auto table = detail::parse_csv(text, where);
        geometry = {table.cols, table.rows, spacing};
        values = std::move(table.values);
    }
    geometry.validate();
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0) fail(ErrorKind::format, where + ": values must be finite and non-negative");
    }
    if (std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; }))
        fail(ErrorKind::degenerate_map, where + ": map is all zero, no admissible region");
    if (rescale == Rescale::max) values = max_normalized(std::move(values));
    else if (*std::max_element(values.begin(), values.end()) > 1.0)
        fail(ErrorKind::format, where + ": values exceed 1 and rescaling is disabled");
    return {geometry, std::move(values)};
}

inline MapFormat map_format_from_path(const std::filesystem::path& path)
{
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".pgm") return MapFormat::pgm;
    if (ext == ".csv") return MapFormat::csv;
    fail(ErrorKind::format, "cannot infer map format from '" + path.string() + "' (expected .pgm or .csv)");
}

/// Row-major CSV, shortest round-trip decimal representation.
inline std::string format_csv(const ScalarGrid& grid)
{
    std::string out;
    out.reserve(grid.size() * 20);
    for (std::size_t j = 0; j < grid.height(); ++j) {
        for (std::size_t i = 0; i < grid.width(); ++i) {
            if (i) out.push_back(',');
            detail::append_number(out, grid(i, j));
        }
        out.push_back('\n');
    }
    return out;
}

inline void save_csv(const std::filesystem::path& path, const ScalarGrid& grid)
{
    detail::write_file(path, format_csv(grid));
}

inline void save_probability_csv(const std::filesystem::path& path, const ProbabilityGrid& grid)
{
    save_csv(path, grid.values());
}

/// Binary PGM with values in [0, 1] mapped linearly onto [0, maxval].
inline std::string encode_pgm(const ScalarGrid& grid, std::size_t maxval)
{
    std::string out = "P5\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) + "\n" +
                      std::to_string(maxval) + "\n";
    const bool wide = maxval > 255;
    for (double v : grid.data()) {
        const double c = std::clamp(std::isfinite(v) ? v : 0.0, 0.0, 1.0);
        const auto px = static_cast<std::uint32_t>(std::lround(c * static_cast<double>(maxval)));
        if (wide) out.push_back(static_cast<char>((px >> 8) & 0xff));
        out.push_back(static_cast<char>(px & 0xff));
    }
    return out;
}

inline void save_pgm(const std::filesystem::path& path, const ScalarGrid& grid, std::size_t maxval = 255)
{
    if (maxval == 0 || maxval > 65535) fail(ErrorKind::parameter, "PGM maxval must be in [1, 65535]");
    detail::write_file(path, encode_pgm(grid, maxval));
}

/// Loads a drift field. For the split layout pass the vx and vy files; for the
/// interleaved layout pass the same file twice (the second path is ignored).
inline VectorFieldGrid load_drift_csv(const std::filesystem::path& first, const std::filesystem::path& second,
                                      DriftLayout layout, double spacing = 1.0)
{
    std::vector<Vec2> vectors;
    GridGeometry geometry;
    if (layout == DriftLayout::split) {
        const auto vx = detail::parse_csv(detail::read_file(first), first.string());
        const auto vy = detail::parse_csv(detail::read_file(second), second.string());
        if (vx.cols != vy.cols || vx.rows != vy.rows)
            fail(ErrorKind::shape, "drift component files have different dimensions");
        geometry = {vx.cols, vx.rows, spacing};
        vectors.resize(vx.values.size());
        for (std::size_t k = 0; k < vectors.size(); ++k) vectors[k] = {vx.values[k], vy.values[k]};
    } else {
        const auto t = detail::parse_csv(detail::read_file(first), first.string());
        if (t.cols % 2 != 0) fail(ErrorKind::shape, first.string() + ": interleaved drift rows need an even column count");
        geometry = {t.cols / 2, t.rows, spacing};
        vectors.resize(t.values.size() / 2);
        for (std::size_t k = 0; k < vectors.size(); ++k) vectors[k] = {t.values[2 * k], t.values[2 * k + 1]};
    }
    geometry.validate();
    return {geometry, std::move(vectors)};
}

inline void save_drift_csv(const std::filesystem::path& first, const std::filesystem::path& second,
                           const VectorFieldGrid& drift, DriftLayout layout)
{
    const auto& g = drift.geometry();
    if (layout == DriftLayout::split) {
        ScalarGrid vx(g), vy(g);
        for (std::size_t k = 0; k < drift.size(); ++k) {
            vx[k] = drift[k].x;
            vy[k] = drift[k].y;
        }
        save_csv(first, vx);
        save_csv(second, vy);
        return;
    }
    std::string out;
    for (std::size_t j = 0; j < g.height; ++j) {
        for (std::size_t i = 0; i < g.width; ++i) {
            if (i) out.push_back(',');
            detail::append_number(out, drift(i, j).x);
            out.push_back(',');
            detail::append_number(out, drift(i, j).y);
        }
        out.push_back('\n');
    }
    detail::write_file(first, out);
}

} // namespace ghpf

#endif // GHPF_MAP_IO_HPP
