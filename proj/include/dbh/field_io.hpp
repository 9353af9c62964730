#pragma once

#include <string>

#include "dbh/grid.hpp"

namespace dbh {

// Field cache file: one line of UTF-8 JSON (keys N, n_axis, L, dtype="c128",
// layout="row-major"), a newline, then the raw little-endian complex128 array.
void save_field(const std::string& path, const SampledField& f);
SampledField load_field(const std::string& path);

} // namespace dbh
