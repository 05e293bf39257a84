#pragma once

#include <cstdint>

#include "nilcount/group.hpp"
#include "nilcount/radius.hpp"

namespace nilcount {

class NormParams {
 public:
  NormParams(double alpha, Matrix M1, Matrix M2);
  static NormParams standard(double alpha, int q, int m);

  double alpha() const { return alpha_; }
  const Matrix& M1() const { return M1_; }
  const Matrix& M2() const { return M2_; }
  int q() const { return static_cast<int>(M1_.rows()); }
  int m() const { return static_cast<int>(M2_.rows()); }
  bool is_exact() const { return M1_.is_exact() && M2_.is_exact(); }
  double abs_det() const;

 private:
  double alpha_;
  Matrix M1_, M2_;
};

// The exponents for which membership is decided in exact arithmetic.
bool exact_alpha_supported(double alpha);

// Decides A^(a/2) + B^(a/4) <= C^(a/2) exactly, with A = |M1x|^2,
// B = |M2t|^2 and C = R^2, for alpha in {1, 2, 4}.
bool exact_ball_test(double alpha, const Rational& A, const Rational& B, const Rational& C);

double norm(const NormParams& p, const GroupElement& g);
double norm(const NormParams& p, std::span<const double> x, std::span<const double> t);

bool ball_contains(const NormParams& p, double R, const GroupElement& g, double tol = 0);
// Exact when p is exact and alpha is supported, otherwise falls back to doubles.
bool ball_contains(const NormParams& p, const Radius& R, const ExactElement& g, double tol = 0);

double unit_ball_volume(double alpha, int q, int m);
double ball_volume(const NormParams& p, double R = 1.0);

struct MonteCarloVolume {
  double estimate = 0;
  double std_error = 0;
  std::uint64_t samples = 0;
};

MonteCarloVolume ball_volume_monte_carlo(const NormParams& p, std::uint64_t samples, std::uint64_t seed);

struct SubadditivityWitness {
  GroupElement g, h;
  double eps = 0;
  double margin = 0;
};

SubadditivityWitness subadditivity_witness(const NormParams& p);

struct ConvexityWitness {
  GroupElement a, b;
  double s0 = 0, s = 0;
  double midpoint_norm = 0;
};

ConvexityWitness convexity_witness(const NormParams& p);

// max N(g o h) / (N(g) + N(h)) over random pairs; a diagnostic estimate of C0.
double measure_quasi_constant(const GroupSpec& g, const NormParams& p, int samples, std::uint64_t seed);

}  // namespace nilcount
