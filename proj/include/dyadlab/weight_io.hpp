#pragma once

#include <filesystem>
#include <iosfwd>

#include "dyadlab/lattice.hpp"

namespace dyadlab {

// Text format: a header line `WGT1 d=<dim> L=<depth>` followed by 2^(dL)
// whitespace-separated values in row-major order.

void write_weight(std::ostream& os, const Weight& w);
void save_weight(const std::filesystem::path& path, const Weight& w);

/// Throws FormatError (kind format) on bad magic, bad header or a wrong value
/// count, and FormatError (kind invalid_value) on a negative or non-finite
/// entry; both carry the offending line.
Weight read_weight(std::istream& is);
Weight load_weight(const std::filesystem::path& path);

}  // namespace dyadlab
