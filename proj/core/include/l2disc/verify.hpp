#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace l2disc {

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};

/// Runs the module invariants on seeded and structured point sets. Every
/// check catches its own exceptions and reports them as failures.
std::vector<CheckResult> run_property_battery(std::uint64_t seed = 42);

}  // namespace l2disc
