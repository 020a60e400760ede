#pragma once

#include <string>

#include "hessianlab/grid.hpp"

namespace hessianlab::io {

// CSV with columns index, x1, y1, ..., xn, yn, value (%.17g formatting).
std::string field_csv(const BallGrid& g, std::span<const double> values);
void write_field_csv(const std::string& path, const BallGrid& g, std::span<const double> values);

// 8-bit binary PGM of the 2D lattice slice spanned by (axis_u, axis_v) with
// all other lattice coordinates 0; linear min-max scaling recorded in a
// sidecar JSON at path + ".json". Pixels outside the interior are 0.
void write_pgm_slice(const std::string& path, const BallGrid& g, std::span<const double> values,
                     int axis_u = 0, int axis_v = 1);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

} // namespace hessianlab::io
