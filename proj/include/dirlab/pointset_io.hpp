#pragma once

// Point-set text format:
//
//   d n mode            (mode is "exact" or "float")
//   x_1 ... x_d         (n rows)
//
// Exact sets are written as p/q tokens and read back bit-exactly; integer and
// terminating-decimal tokens are also accepted in exact mode. Float sets are
// written with 17 significant digits. Lines starting with '#' are ignored.

#include <iosfwd>
#include <string>
#include <string_view>

#include "dirlab/geometry.hpp"

namespace dirlab {

PointSet parse_point_set(std::string_view text);
PointSet read_point_set(std::istream& in);
PointSet read_point_set_file(const std::string& path);

std::string format_point_set(const PointSet& points);
void write_point_set(std::ostream& out, const PointSet& points);
void write_point_set_file(const std::string& path, const PointSet& points);

// Parses "p/q", "p", or a decimal literal into a canonical rational.
Rational parse_rational(std::string_view token);

}  // namespace dirlab
