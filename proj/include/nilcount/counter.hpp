#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nilcount/lattice.hpp"

namespace nilcount {

struct Problem {
  GroupSpec group;
  NormParams norm;
  LatticeSpec lattice;

  ReducedSpec reduced() const { return reduce(norm, lattice); }
  double alpha() const { return norm.alpha(); }
};

void validate_problem(const Problem& p);

struct CounterOptions {
  int workers = 1;
  // Relative tolerance of the floating path: N <= R (1 + tol) counts as inside.
  double boundary_tolerance = 1e-9;
  bool cross_check = false;
  std::int64_t average_budget = 100000;
};

struct BallQuery {
  Radius radius;
  std::optional<ExactElement> center;
};

struct CountResult {
  std::int64_t count = 0;
  std::int64_t boundary_hits = 0;
  bool exact = false;
};

// #{k in Z^(q+m) : |Mt1 k'|^a + |Mt2 k''|^(a/2) <= R^a}.
CountResult count_ball(const ReducedSpec& reduced, double alpha, const Radius& R, const CounterOptions& opt = {});
// #(Gamma_L cap B_R(center)); translated balls use the group law.
CountResult count_ball(const Problem& p, const BallQuery& q, const CounterOptions& opt = {});
CountResult count_shell(const Problem& p, const BallQuery& q, const Rational& delta, const CounterOptions& opt = {});

struct CountRecord {
  double R = 0;
  std::int64_t count = 0;
  double leading = 0;
  double abs_error = 0;
  double rel_discrepancy = 0;
  std::int64_t boundary_hits = 0;
  bool exact = false;
};

CountRecord make_record(const Problem& p, double R, const CountResult& c);

double average_shell_count(const Problem& p, const Rational& T, double R, double delta, const CounterOptions& opt = {});

struct SharpnessRow {
  int N = 0;
  std::int64_t count = 0;
  std::int64_t count_shifted = 0;
  double volume_jump = 0;
};

struct SharpnessReport {
  int n_max = 0;
  int verified = 0;
  std::optional<int> first_failure;
  std::vector<SharpnessRow> rows;
  bool ok() const { return !first_failure && verified == n_max; }
};

// Checks count(sqrt N) == count(sqrt(N + 1/2)) for N = 1..n_max (alpha = 2, m = 1, integral Mt).
SharpnessReport sharpness_probe_alpha2(const ReducedSpec& integral, int n_max, const CounterOptions& opt = {});
// Rescales (Mt1, Mt2) -> (c Mt1, c^2 Mt2) with the delta-rational c; nullopt if none exists.
std::optional<ReducedSpec> integral_rescaling(const ReducedSpec& r);

}  // namespace nilcount
