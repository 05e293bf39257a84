#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nilcount/counter.hpp"

namespace nilcount {

// Matrix entries: JSON integers and "p/q" or decimal strings are exact,
// non-integral JSON numbers make the whole matrix floating.
struct GroupSection {
  std::string builtin;  // heisenberg, polarized_heisenberg, free_carnot, h_type, or "" for explicit
  int d = 0;            // heisenberg, polarized_heisenberg
  int q = 0;            // free_carnot, explicit
  int m = 0;            // explicit
  std::vector<Matrix> U;  // h_type, explicit
  bool operator==(const GroupSection&) const = default;
};

struct LatticeSection {
  enum class Kind { identity, gamma_b, explicit_ } kind = Kind::identity;
  std::vector<int> b;
  std::optional<Matrix> L1, L2;
  bool operator==(const LatticeSection&) const = default;
};

struct RunSection {
  int workers = 1;
  std::uint64_t seed = 1;
  double boundary_tolerance = 1e-9;
  std::int64_t average_budget = 100000;
  double max_fibres = 1e9;
  std::int64_t poisson_max_evaluations = 20000;
  double poisson_max_tail_ratio = 0.1;
  bool operator==(const RunSection&) const = default;
};

struct Config {
  GroupSection group;
  double alpha = 2;
  std::optional<Rational> alpha_exact;
  std::optional<Matrix> M1, M2;  // identity when absent
  LatticeSection lattice;
  RunSection run;

  Problem problem() const;
  CounterOptions counter_options() const;
  bool operator==(const Config&) const = default;
};

// Text starting with '{' is parsed as JSON, anything else is read as a path.
Config parse_config(const std::string& text_or_path);
Config parse_config_text(const std::string& json);
std::string serialize_config(const Config& c, int indent = 2);

}  // namespace nilcount
