#ifndef GHPF_GHPF_HPP
#define GHPF_GHPF_HPP

// Everything in one include. config.hpp, report.hpp and verify.hpp pull in
// nlohmann/json; the other headers need only the standard library.

#include "critical_points.hpp"
#include "drift.hpp"
#include "error.hpp"
#include "field.hpp"
#include "generators.hpp"
#include "geometry.hpp"
#include "map_io.hpp"
#include "oracle.hpp"
#include "policy.hpp"
#include "solver.hpp"
#include "config.hpp"
#include "report.hpp"
#include "verify.hpp"

#endif // GHPF_GHPF_HPP
