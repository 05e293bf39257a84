#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nilcount/envelope.hpp"
#include "nilcount/norm.hpp"

namespace nilcount {

// first_layer integrates over |x| with the centre fibre done in closed form;
// center integrates over |t| with the first-layer fibre done in closed form.
enum class Route { automatic, first_layer, center };

const char* route_name(Route r);
Route parse_route(const std::string& s);

struct SpectralQuery {
  double lambda1 = 0;  // 2 pi |w|
  double lambda2 = 0;  // 2 pi |s|
  Route route = Route::automatic;
};

struct SpectralSample {
  SpectralQuery query;
  std::complex<double> value;
  Route route = Route::first_layer;
  double error = 0;
};

// 2 (2-a)^(2/a-1) (a-1)^(1-1/a) for 1 < a < 2, otherwise 2.
double c_alpha(double alpha);

// Transform of the indicator of B_1^(alpha, I) at |w| = lambda1/(2 pi), |s| = lambda2/(2 pi).
SpectralSample fourier_ball(double alpha, int q, int m, const SpectralQuery& query, double tol = 1e-11);

// Transform of the indicator of B_1^(alpha, M).
std::complex<double> fourier_scaled(const NormParams& p, std::span<const double> w, std::span<const double> s,
                                    double tol = 1e-11);
// Transform of the indicator of B_R^(alpha, M): R^Q times the unit transform at (R w, R^2 s).
std::complex<double> fourier_dilated(const NormParams& p, double R, std::span<const double> w,
                                     std::span<const double> s, double tol = 1e-11);

struct OracleValue {
  std::complex<double> value;
  double error = 0;
  std::int64_t evaluations = 0;
};

// Direct quadrature of exp(-2 pi i (w.x + s.t)) over B_1^(alpha, I) in polar
// coordinates on both layers, without the Bessel reductions. The error bar is
// the change under doubling of every node count.
OracleValue fourier_oracle(double alpha, int q, int m, std::span<const double> w, std::span<const double> s,
                           std::int64_t budget = 200'000'000);

struct Ray {
  enum class Kind { w_axis, s_axis, fixed_ratio };
  Kind kind = Kind::w_axis;
  double ratio = 1;  // lambda2 / lambda1 on fixed_ratio rays

  SpectralQuery at(double lambda) const;
  std::string name() const;
  static Ray parse(const std::string& s);
};

struct DecayPrediction {
  bool available = false;
  double exponent = 0;
  std::string rule;
};

// Decay exponent of |transform| along the ray in the ray parameter.
DecayPrediction predicted_decay(double alpha, int q, int m, const Ray& ray);

struct DecayFit {
  Ray ray;
  DecayPrediction predicted;
  EnvelopeFit fit;
  std::vector<double> lambda;
  std::vector<double> magnitude;
  std::vector<bool> on_envelope;
};

DecayFit decay_fit(double alpha, int q, int m, const Ray& ray, const std::vector<double>& lambda_grid,
                   int workers = 1, double tol = 1e-11);

}  // namespace nilcount
