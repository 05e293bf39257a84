#include "nilcount/bessel.hpp"

#include <cmath>
#include <numbers>

#include "nilcount/error.hpp"

namespace nilcount {
namespace {

constexpr double pi = std::numbers::pi;

bool is_integer(double v) { return v == std::floor(v); }
bool is_half_integer(double v) { return is_integer(v - 0.5); }

// sum_k (-z^2/4)^k / (k! Gamma(nu + k + 1)); the caller supplies (z/2)^nu.
double series_core(double nu, double z) {
  const double x = -0.25 * z * z;
  double term = 1.0 / std::tgamma(nu + 1);
  double sum = term;
  for (int k = 0; k < 500; ++k) {
    term *= x / ((k + 1) * (nu + k + 1));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum) && k > 2) break;
  }
  return sum;
}

double hankel(double nu, double z) {
  const double mu = 4 * nu * nu;
  double P = 0, Q = 0;
  double term = 1, prev = INFINITY;
  for (int k = 0; k < 200; ++k) {
    if (k > 0) term *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * z);
    const double a = std::abs(term);
    if (a > prev) break;
    if (k % 4 == 0) P += term;
    else if (k % 4 == 1) Q += term;
    else if (k % 4 == 2) P -= term;
    else Q -= term;
    if (a < 1e-17 * std::max(std::abs(P), 1e-300) && k > 1) break;
    prev = a;
  }
  // cos(z - phi) with phi = (nu/2 + 1/4) pi, expanded to keep z exact.
  const double phi = (0.5 * nu + 0.25) * pi;
  const double c = std::cos(z) * std::cos(phi) + std::sin(z) * std::sin(phi);
  const double s = std::sin(z) * std::cos(phi) - std::cos(z) * std::sin(phi);
  return std::sqrt(2 / (pi * z)) * (P * c - Q * s);
}

double half_integer_upward(double nu, double r) {
  const double amp = std::sqrt(2 / (pi * r));
  double jm = amp * std::cos(r);  // J_{-1/2}
  double j = amp * std::sin(r);   // J_{1/2}
  if (nu == -0.5) return jm;
  for (double v = 0.5; v < nu; v += 1) {
    const double next = 2 * v / r * j - jm;
    jm = j;
    j = next;
  }
  return j;
}

double miller(double nu, double r) {
  const double mu = nu - std::floor(nu);
  const int n = static_cast<int>(std::floor(nu));
  const int N = static_cast<int>(std::max<double>(n, r) + 30 + 10 * std::cbrt(r));
  double f_next = 0, f = 1e-300, target = 0, norm = 0;
  // (r/2)^mu = sum_k c_k J_{mu+2k}, c_k = (mu + 2k) d_k, d_k = Gamma(mu + k) / k!, c_0 = Gamma(mu + 1).
  int k2 = N / 2;
  double d = std::exp(std::lgamma(mu + k2) - std::lgamma(k2 + 1.0));
  for (int k = N; k >= 0; --k) {
    if (k == n) target = f;
    if (k % 2 == 0) {
      k2 = k / 2;
      norm += (k2 == 0 ? std::tgamma(mu + 1) : (mu + 2 * k2) * d) * f;
      if (k2 > 1) d *= k2 / (mu + k2 - 1);
    }
    if (k == 0) break;
    const double prev = 2 * (mu + k) / r * f - f_next;
    f_next = f;
    f = prev;
    if (std::abs(f) > 1e200) {
      f *= 1e-200;
      f_next *= 1e-200;
      target *= 1e-200;
      norm *= 1e-200;
    }
  }
  return target * std::pow(0.5 * r, mu) / norm;
}

}  // namespace

double bessel_j(double nu, double r) {
  if (!std::isfinite(nu) || !std::isfinite(r) || r < 0) fail(Errc::domain, "bessel_j needs finite r >= 0");
  if (nu < -1.5) fail(Errc::domain, "bessel_j supports nu >= -3/2");
  if (nu < 0 && is_integer(nu)) return (static_cast<long>(-nu) % 2 ? -1 : 1) * bessel_j(-nu, r);
  if (r == 0) {
    if (nu == 0) return 1;
    if (nu > 0) return 0;
    fail(Errc::domain, "J_nu(0) is infinite for negative non-integer nu");
  }
  if (r <= 6 || r * r <= 4 * (nu + 1)) return std::pow(0.5 * r, nu) * series_core(nu, r);
  if (r >= std::max(25.0, nu * nu)) return hankel(nu, r);
  if (is_half_integer(nu) && nu >= -0.5 && r > nu) return half_integer_upward(nu, r);
  if (nu < 0) return 2 * (nu + 1) / r * bessel_j(nu + 1, r) - bessel_j(nu + 2, r);
  return miller(nu, r);
}

double bessel_lambda(double nu, double z) {
  if (!std::isfinite(z) || z < 0) fail(Errc::domain, "bessel_lambda needs finite z >= 0");
  if (nu < -1.5) fail(Errc::domain, "bessel_lambda supports nu >= -3/2");
  if (nu < 0 && is_integer(nu)) return (static_cast<long>(-nu) % 2 ? -1 : 1) * bessel_j(-nu, z) * std::pow(z, -nu);
  if (z <= 6 || z * z <= 4 * (nu + 1)) return std::pow(2.0, -nu) * series_core(nu, z);
  return bessel_j(nu, z) / std::pow(z, nu);
}

}  // namespace nilcount
