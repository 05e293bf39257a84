#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "nilcount/counter.hpp"
#include "nilcount/envelope.hpp"

namespace nilcount {

struct ExponentCandidate {
  std::string tag;
  double gamma1 = 0;
  double gamma2 = 0;
};

// P(R) <~ R^-gamma1 log^gamma2 R.
struct ExponentTable {
  int q = 0, m = 0;
  double alpha = 0;
  double gamma1 = 0;
  double gamma2 = 0;
  std::string tag;
  double sigma = 0.5;
  double beta1 = 0, beta2 = 0;
  std::vector<ExponentCandidate> candidates;
  // Summary table of the shell-count bounds, stated for alpha >= 1 only (NaN otherwise).
  double table_gamma1 = std::numeric_limits<double>::quiet_NaN();
  double table_gamma2 = std::numeric_limits<double>::quiet_NaN();
};

double sigma_of(double alpha);
ExponentTable predicted_exponents(int q, int m, double alpha);

struct SweepOptions {
  CounterOptions counter;
  int min_windows = 8;
  double slope_tolerance = 0.15;
  double sharp_floor = 1.5;  // soft lower bound for the sharp alpha = 2 case
  double max_fibres = 1e9;  // centre-layer lattice points the counter walks at the largest radius
};

struct SweepResult {
  std::vector<CountRecord> records;
  EnvelopeFit fit;
  ExponentTable table;
  double predicted_slope = 0;  // Q - gamma1 for |count - leading|
  enum class Verdict { consistent, above_prediction, undefined } verdict = Verdict::undefined;
  bool sharp_case = false;
  bool warning = false;
  std::string note;
};

const char* verdict_name(SweepResult::Verdict v);

SweepResult sweep(const Problem& p, const std::vector<double>& radii, const SweepOptions& opt = {});
SweepResult summarize_sweep(const Problem& p, std::vector<CountRecord> records, const SweepOptions& opt = {});
std::vector<double> radius_grid(double rmin, double rmax, int points, bool geometric = true);

struct PoissonOptions {
  int N = 0;  // weight exponent; 0 means q + m + 1
  double cap1 = 16;  // |k'| <= cap1
  double cap2 = 4;   // |k''| <= cap2
  double tol = 1e-9;
  std::int64_t max_evaluations = 20000;
  std::int64_t max_terms = 50'000'000;
  double max_tail_ratio = 0.1;
  int workers = 1;
};

struct PoissonPart {
  double head = 0;
  double tail = 0;
  double envelope_constant = 0;  // C in C lambda^-mu, matched to the outer half of the head
  double decay = 0;               // mu
  // The tail models the terms past the cap by that envelope, integrated against the weight.
  std::int64_t terms = 0;
};

struct PoissonRadius {
  double rho = 0;
  PoissonPart s1, s2, s3;
  double total() const { return s1.head + s1.tail + s2.head + s2.tail + s3.head + s3.tail; }
};

// Dual-sum envelope estimate of the relative discrepancy, with the mollifier
// transform replaced by the weight (1 + eps|k'| + eps^2|k''|)^-N.
struct PoissonEstimate {
  double R = 0, eps = 0;
  int N = 0;
  PoissonRadius plus, minus;
  double edge = 0;   // ((R + eps)^Q - R^Q) / R^Q
  double bound = 0;  // S(R + eps) + S(R - eps) + edge
  double bound_unit_edge = 0;  // the same with eps / R in place of edge
  double head = 0, tail = 0;
  std::int64_t evaluations = 0;
  double env1 = 0, env2 = 0, env3 = 0;  // R^-b1 E(q,b1), R^-2b2 E(2m,2b2), and the mixed-term envelope
  double cap1 = 0, cap2 = 0;            // caps after the 1e-12 weight cut
};

double epsilon_power(double eps, double eta1, double eta2);
PoissonEstimate poisson_estimate(const Problem& p, double R, double eps, const PoissonOptions& opt = {});

}  // namespace nilcount
