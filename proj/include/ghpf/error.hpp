#ifndef GHPF_ERROR_HPP
#define GHPF_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace ghpf {

enum class ErrorKind {
    format,             // unparsable input file
    shape,              // ragged CSV or mismatched dimensions in a file
    degenerate_map,     // no admissible region
    parameter,          // configuration value outside its domain
    precondition,       // endpoints or seeds violate an operation's precondition
    geometry_mismatch,  // grids that must share a geometry do not
    out_of_domain,      // continuous query outside the interpolation hull
    unreachable,        // no admissible path between endpoints
    io,                 // file could not be opened or written
};

constexpr std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::format: return "format";
    case ErrorKind::shape: return "shape";
    case ErrorKind::degenerate_map: return "degenerate_map";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::geometry_mismatch: return "geometry_mismatch";
    case ErrorKind::out_of_domain: return "out_of_domain";
    case ErrorKind::unreachable: return "unreachable";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind)
    {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

} // namespace ghpf

#endif // GHPF_ERROR_HPP
