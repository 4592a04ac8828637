#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dyadlab/lattice.hpp"

namespace dyadlab {

struct SuiteOptions {
  std::uint64_t seed = 7;
  /// Multiplies every sample count (1 = the documented sizes).
  double scale = 1.0;
  /// Depth of the property checks (the numbered criteria use fixed depths).
  int depth = 8;
};

struct CheckRow {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
  std::string witness;
  std::string detail;
};

struct Check {
  std::string name;
  std::function<CheckRow(const SuiteOptions&)> run;
};

/// The ten numbered criteria, in order.
std::vector<Check> criteria_checks();
/// Smaller invariant checks at `SuiteOptions::depth`.
std::vector<Check> property_checks();

/// Runs checks; a check that throws yields a failing row carrying the error.
std::vector<CheckRow> run_checks(const std::vector<Check>& checks, const SuiteOptions& opts);

void write_rows_csv(std::ostream& os, const std::vector<CheckRow>& rows);
void write_rows_json(std::ostream& os, const std::vector<CheckRow>& rows);

/// Log-normal test density: roughness (and the coarse resolution when
/// base_depth < 0) drawn from the seed; about one in five also gets a zero
/// half-space.
Weight random_test_weight(const Lattice& lat, std::uint64_t seed, int base_depth = -1);
GridFunction random_test_function(const Lattice& lat, std::uint64_t seed, int base_depth);

}  // namespace dyadlab
