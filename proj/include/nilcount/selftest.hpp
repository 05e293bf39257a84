#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nilcount/counter.hpp"

namespace nilcount {

// Box enumeration over L Z^(q+m) with 50-digit decimal arithmetic; shares no
// code with the counting kernel. Points within 1e-40 of the sphere count as inside.
std::int64_t naive_count(const Problem& p, const Radius& R);

struct SelftestCase {
  std::string name;
  double alpha = 0;
  std::string radius;
  std::int64_t count = 0;
  std::int64_t naive = 0;
  bool exact = false;
  bool ok() const { return count == naive; }
};

struct SelftestReport {
  std::vector<SelftestCase> cases;
  bool passed() const {
    for (const auto& c : cases)
      if (!c.ok()) return false;
    return !cases.empty();
  }
};

// Kernel counts against naive_count for radii up to 4.
SelftestReport selftest(int workers = 1);

}  // namespace nilcount
