#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace nilcount {

// phi: lambda1 r +- lambda2 (1 - r^a)^(2/a)
// psi: lambda2 r +- lambda1 (1 - r^(a/2))^(1/a)
enum class PhaseFamily { phi, psi };

struct PhaseSpec {
  double alpha = 2;
  double lambda1 = 1;
  double lambda2 = 1;
  int sign = +1;
  PhaseFamily family = PhaseFamily::phi;
};

// Derivative of the given order (0..3) at r in (0,1).
double phase_eval(const PhaseSpec& spec, double r, int order);

// (1-r^a)^(2/a-1) r^(a-1) for phi, (1-r^(a/2))^(1/a-1) r^(a/2-1) for psi;
// the first derivative is lambda1 -+ 2 lambda2 g, resp. lambda2 -+ lambda1 G / 2.
double phase_profile(PhaseFamily family, double alpha, double r);

struct CriticalPoint {
  double value = std::numeric_limits<double>::quiet_NaN();
  double complement = std::numeric_limits<double>::quiet_NaN();  // 1 - value, carried separately near 1
  bool absent = true;  // no root in the open piece; value is then the clamped endpoint
  double residual = 0;  // |profile - target| / target at the solver's own variable
};

struct CriticalPoints {
  double alpha = 0;
  double c_alpha = 2;
  // g(r) = lambda1 / (4 lambda2); for 1 < a < 2 the lower root is r_star and the upper one r_star_upper.
  CriticalPoint r_star, r_star_upper;
  // G(r) = lambda2 / lambda1, same convention.
  CriticalPoint R_star, R_star_upper;
  // Defined for 1 < a < 2 only: r0 = (a-1)^(1/a) maximises g, R0 = (2-a)^(2/a) minimises G.
  double r0 = std::numeric_limits<double>::quiet_NaN();
  double R0 = std::numeric_limits<double>::quiet_NaN();
  // g = C_a / 4 on either side of r0, G = 4 / C_a on either side of R0.
  CriticalPoint r0_lo, r0_hi, R0_lo, R0_hi;
};

CriticalPoints critical_points(const PhaseSpec& spec);
// The lambda-independent part (r0, R0 and their neighbours).
CriticalPoints alpha_points(double alpha);

// case_i: lambda1 >= C_a lambda2, phi clauses; case_ii: lambda1 < C_a lambda2, psi clauses.
// The minus-phase clauses are checked in both.
enum class PhaseRegime { case_i, case_ii };
const char* regime_name(PhaseRegime r);
PhaseRegime parse_regime(const std::string& s);

struct ClauseResult {
  std::string id;
  std::string statement;
  double multiple = 0;   // required lower bound as a multiple of the reference lambda
  bool strict = false;   // bound must be exceeded, not just met
  bool diagnostic = false;  // reported, not part of the verdict
  double worst_ratio = std::numeric_limits<double>::infinity();  // min over samples of infimum / lambda_ref
  double worst_lambda1 = 0, worst_lambda2 = 0;
  std::int64_t checked = 0;
  std::int64_t failed = 0;
  std::int64_t vacuous = 0;  // samples where the interval was empty
  bool passed() const { return failed == 0; }
};

struct PhaseReport {
  double alpha = 0;
  PhaseRegime regime = PhaseRegime::case_i;
  int grid_n = 0;
  size_t samples = 0;
  CriticalPoints points;  // lambda-independent points
  std::vector<ClauseResult> clauses;
  // Empirical constants for 1 < a < 2: smallest combined-bound ratio seen.
  double d_alpha = std::numeric_limits<double>::quiet_NaN();
  double d_alpha_prime = std::numeric_limits<double>::quiet_NaN();
  bool passed = false;
};

std::vector<std::pair<double, double>> sample_lambdas(double alpha, PhaseRegime regime, size_t n, std::uint64_t seed);

PhaseReport verify_phase_lemmas(double alpha, PhaseRegime regime, const std::vector<std::pair<double, double>>& lambdas,
                                int grid_n = 10000, int workers = 1);

// Oscillatory-integral bound with c_k = 5 * 2^(k-1) - 2.
double vdc_constant(int k);

using PhaseFn = std::function<double(double r, int order)>;
using AmplitudeFn = std::function<double(double r)>;

struct VdcReport {
  int k = 1;
  double a = 0, b = 1;
  double c_k = 3;
  double lambda = 0;         // inf |Phi^(k)| on the grid (or the supplied scale)
  double lhs = 0;            // |int_a^b exp(i Phi) amp|
  double quad_error = 0;
  double amplitude_term = 0; // min(|amp(a)|, |amp(b)|) + total variation of amp
  double rhs = 0;
  size_t panels = 0;
  bool holds = false;
};

// Phi carries its own large parameter; it is normalised by lambda = inf |Phi^(k)|.
// lambda_scale > 0 replaces the measured infimum after checking |Phi^(k)| >= lambda_scale.
VdcReport van_der_corput_check(const PhaseFn& phase, const AmplitudeFn& amplitude, double a, double b, int k,
                               double lambda_scale = 0, int grid_n = 10000);
VdcReport van_der_corput_check(const PhaseSpec& spec, const AmplitudeFn& amplitude, double a, double b, int k,
                               double lambda_scale = 0, int grid_n = 10000);

}  // namespace nilcount
