#include "nilcount/spectral.hpp"


#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <limits>
#include <queue>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "nilcount/bessel.hpp"
#include "nilcount/error.hpp"
#include "parallel.hpp"

namespace nilcount {
namespace {

constexpr double pi = std::numbers::pi;

// 1 - r^a given r and d = 1 - r, accurate when d is small.
double one_minus_pow(double r, double d, double a) {
  if (d < 0.5) return -std::expm1(a * std::log1p(-d));
  return 1 - std::pow(r, a);
}

struct Integrand {
  double alpha;
  int q, m;
  double l1, l2;
  Route route;

  double operator()(double r, double d) const {
    if (route == Route::first_layer) {
      const double u = std::max(0.0, one_minus_pow(r, d, alpha));
      const double rho = std::pow(u, 2 / alpha);
      return bessel_lambda(0.5 * q - 1, l1 * r) * bessel_lambda(0.5 * m, l2 * rho) * std::pow(r, q - 1) *
             std::pow(u, 2.0 * m / alpha);
    }
    const double v = std::max(0.0, one_minus_pow(r, d, alpha / 2));
    const double rho = std::pow(v, 1 / alpha);
    return bessel_lambda(0.5 * m - 1, l2 * r) * bessel_lambda(0.5 * q, l1 * rho) * std::pow(r, m - 1) *
           std::pow(v, q / alpha);
  }
};

struct Panel {
  double a, b, value, error, l1;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// Kronrod-31 / Gauss-15 on [a, b] with the QUADPACK error model.
template <class F>
Panel gk31(const F& f, double a, double b) {
  using K = boost::math::quadrature::gauss_kronrod<double, 31>;
  using G = boost::math::quadrature::gauss<double, 15>;
  const auto& x = K::abscissa();
  const auto& wk = K::weights();
  const auto& wg = G::weights();
  const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  std::array<double, 31> fv{};
  fv[0] = f(c);
  double kr = wk[0] * fv[0], gr = wg[0] * fv[0], abs_sum = wk[0] * std::abs(fv[0]);
  for (size_t i = 1; i < x.size(); ++i) {
    const double fp = f(c + hw * x[i]), fm = f(c - hw * x[i]);
    fv[2 * i - 1] = fp;
    fv[2 * i] = fm;
    kr += wk[i] * (fp + fm);
    abs_sum += wk[i] * (std::abs(fp) + std::abs(fm));
    if (i % 2 == 0) gr += wg[i / 2] * (fp + fm);
  }
  const double mean = 0.5 * kr;
  double asc = wk[0] * std::abs(fv[0] - mean);
  for (size_t i = 1; i < x.size(); ++i) asc += wk[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
  Panel p{a, b, kr * hw, std::abs((kr - gr) * hw), abs_sum * hw};
  const double resasc = asc * hw;
  if (resasc != 0 && p.error != 0) p.error = resasc * std::min(1.0, std::pow(200 * p.error / resasc, 1.5));
  p.error = std::max(p.error, 50 * std::numeric_limits<double>::epsilon() * p.l1);
  return p;
}

boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
  static thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  return rule;
}

void check_dims(double alpha, int q, int m) {
  if (!(alpha > 0) || !std::isfinite(alpha)) fail(Errc::domain, "alpha must be positive");
  if (q < 1 || m < 1) fail(Errc::dimension_mismatch, "transform needs q >= 1 and m >= 1");
}

}  // namespace

const char* route_name(Route r) {
  switch (r) {
    case Route::automatic: return "auto";
    case Route::first_layer: return "first-layer";
    case Route::center: return "center";
  }
  return "?";
}

Route parse_route(const std::string& s) {
  if (s == "auto") return Route::automatic;
  if (s == "first-layer") return Route::first_layer;
  if (s == "center") return Route::center;
  fail(Errc::invalid_argument, "unknown route '" + s + "'");
}

double c_alpha(double alpha) {
  if (alpha > 1 && alpha < 2)
    return 2 * std::pow(2 - alpha, 2 / alpha - 1) * std::pow(alpha - 1, 1 - 1 / alpha);
  return 2;
}

SpectralSample fourier_ball(double alpha, int q, int m, const SpectralQuery& query, double tol) {
  check_dims(alpha, q, m);
  if (!(query.lambda1 >= 0) || !(query.lambda2 >= 0) || !std::isfinite(query.lambda1) ||
      !std::isfinite(query.lambda2))
    fail(Errc::domain, "frequencies must be finite and nonnegative");
  SpectralSample out;
  out.query = query;
  out.route = query.route;
  if (out.route == Route::automatic)
    out.route = query.lambda1 >= c_alpha(alpha) * query.lambda2 ? Route::first_layer : Route::center;

  const Integrand f{alpha, q, m, query.lambda1, query.lambda2, out.route};
  // Uniform panels of width <= pi / max(lambda, 1), each cut further at
  // equal steps of the total Bessel phase where that phase moves by more than
  // pi; it is monotone in r and steep near a singular fibre radius.
  const double lmax = std::max({query.lambda1, query.lambda2, 1.0});
  const int n = static_cast<int>(std::ceil(lmax / pi));
  auto phase = [&](double r) {
    const double d = 1 - r;
    if (out.route == Route::first_layer)
      return query.lambda1 * r + query.lambda2 * (1 - std::pow(std::max(0.0, one_minus_pow(r, d, alpha)), 2 / alpha));
    return query.lambda2 * r + query.lambda1 * (1 - std::pow(std::max(0.0, one_minus_pow(r, d, alpha / 2)), 1 / alpha));
  };
  std::vector<double> cuts{0.0};
  double phase_lo = phase(0);
  for (int i = 0; i < n; ++i) {
    const double a = static_cast<double>(i) / n, b = static_cast<double>(i + 1) / n;
    const double phase_hi = phase(b);
    const int k = static_cast<int>(std::ceil((phase_hi - phase_lo) / pi - 1e-9));
    for (int j = 1; j < k; ++j) {
      const double target = phase_lo + (phase_hi - phase_lo) * j / k;
      double lo = std::max(a, cuts.back()), hi = b;
      while (hi - lo > 1e-15 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (phase(mid) < target ? lo : hi) = mid;
      }
      const double c = 0.5 * (lo + hi);
      if (c > cuts.back() + 1e-13) cuts.push_back(c);
    }
    if (b > cuts.back() + 1e-13 || i + 1 == n) cuts.push_back(b);
    phase_lo = phase_hi;
  }
  cuts.back() = 1.0;
  const size_t np = cuts.size() - 1;

  double sum = 0, err = 0, l1 = 0, end_err = 0;
  auto end_panel = [&](double a, double b) {
    double e = 0, L = 0;
    // The complement argument is a - x on the left half and b - x on the right half.
    auto g = [&](double x, double xc) {
      const double d = b == 1.0 ? (xc > 0 ? xc : (1 - a) + xc) : 1 - x;
      const double r = (a == 0.0 && xc < 0) ? -xc : x;
      return f(r, d);
    };
    sum += tanh_sinh_rule().integrate(g, a, b, tol, &e, &L);
    err += e;
    end_err += e;
    l1 += L;
  };
  if (np == 1) {
    end_panel(0, 1);
  } else {
    end_panel(0, cuts[1]);
    end_panel(cuts[np - 1], 1);
    auto interior = [&](double r) { return f(r, 1 - r); };
    std::priority_queue<Panel> panels;
    double isum = 0, ierr = 0, il1 = 0;
    for (size_t i = 1; i + 1 < np; ++i) {
      const Panel p = gk31(interior, cuts[i], cuts[i + 1]);
      isum += p.value;
      ierr += p.error;
      il1 += p.l1;
      panels.push(p);
    }
    // Global refinement: bisect the worst interior panel until the interior share
    // of the error budget is met; the endpoint panels are already adaptive.
    for (size_t it = 0; it < 4 * np + 200 && !panels.empty() && ierr > 0.5 * tol * (l1 + il1); ++it) {
      const Panel w = panels.top();
      panels.pop();
      const double mid = 0.5 * (w.a + w.b);
      const Panel lo = gk31(interior, w.a, mid), hi = gk31(interior, mid, w.b);
      isum += lo.value + hi.value - w.value;
      ierr += lo.error + hi.error - w.error;
      il1 += lo.l1 + hi.l1 - w.l1;
      panels.push(lo);
      panels.push(hi);
    }
    sum += isum;
    err += ierr;
    l1 += il1;
  }
  if (!(err <= 10 * tol * l1 + 1e-300) || !std::isfinite(sum)) {
    std::ostringstream os;
    os << "transform quadrature did not converge at (" << query.lambda1 << ", " << query.lambda2
       << "): error " << err << " (endpoint panels " << end_err << ") vs L1 " << l1;
    fail(Errc::convergence, os.str());
  }
  const double c = std::pow(2 * pi, 0.5 * (q + m));
  out.value = c * sum;
  out.error = c * err;
  return out;
}

std::complex<double> fourier_scaled(const NormParams& p, std::span<const double> w, std::span<const double> s,
                                    double tol) {
  if (w.size() != static_cast<size_t>(p.q()) || s.size() != static_cast<size_t>(p.m()))
    fail(Errc::dimension_mismatch, "frequency dimensions do not match the norm");
  const double det = p.abs_det();
  if (!(det > 0)) fail(Errc::singular, "M is singular");
  const Matrix A1 = p.M1().inexact().inverse().transpose(), A2 = p.M2().inexact().inverse().transpose();
  const double lw = 2 * pi * std::sqrt(norm2(A1.apply(w))), ls = 2 * pi * std::sqrt(norm2(A2.apply(s)));
  return fourier_ball(p.alpha(), p.q(), p.m(), {lw, ls, Route::automatic}, tol).value / det;
}

std::complex<double> fourier_dilated(const NormParams& p, double R, std::span<const double> w,
                                     std::span<const double> s, double tol) {
  if (!(R > 0)) fail(Errc::domain, "dilation needs R > 0");
  std::vector<double> Rw(w.begin(), w.end()), Rs(s.begin(), s.end());
  for (auto& v : Rw) v *= R;
  for (auto& v : Rs) v *= R * R;
  return std::pow(R, p.q() + 2 * p.m()) * fourier_scaled(p, Rw, Rs, tol);
}

namespace {

// GSL's glfixed rule loses about 1e-11 in the weights at untabulated sizes.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0);
  w.assign(n, 0);
  const auto zeros = boost::math::legendre_p_zeros<long double>(n);  // non-negative zeros, ascending
  for (size_t k = 0; k < zeros.size(); ++k) {
    const long double z = zeros[k];
    const long double d = boost::math::legendre_p_prime<long double>(n, z);
    const long double wk = 2 / ((1 - z * z) * d * d);
    const int hi = n / 2 + static_cast<int>(k);
    const int lo = n - 1 - hi;
    x[hi] = static_cast<double>(z);
    x[lo] = -static_cast<double>(z);
    w[hi] = w[lo] = static_cast<double>(wk);
  }
}

struct SphereRule {
  std::vector<std::vector<double>> nodes;
  std::vector<double> weights;
};

// Product rule on S^(k-1): Gauss-Legendre in the polar angles, trapezoid in the azimuth.
SphereRule sphere_rule(int k, int n) {
  SphereRule out;
  if (k == 1) {
    out.nodes = {{1.0}, {-1.0}};
    out.weights = {1.0, 1.0};
    return out;
  }
  if (k == 2) {
    const int N = 2 * n;
    for (int j = 0; j < N; ++j) {
      const double th = 2 * pi * j / N;
      out.nodes.push_back({std::cos(th), std::sin(th)});
      out.weights.push_back(2 * pi / N);
    }
    return out;
  }
  SphereRule inner = sphere_rule(k - 1, n);
  std::vector<double> x, wx;
  gauss_legendre(n, x, wx);
  for (int i = 0; i < n; ++i) {
    const double ph = 0.5 * pi * (x[i] + 1), wph = 0.5 * pi * wx[i];
    const double c = std::cos(ph), sn = std::sin(ph);
    for (size_t j = 0; j < inner.nodes.size(); ++j) {
      std::vector<double> v{c};
      for (double e : inner.nodes[j]) v.push_back(sn * e);
      out.nodes.push_back(std::move(v));
      out.weights.push_back(wph * std::pow(sn, k - 2) * inner.weights[j]);
    }
  }
  return out;
}

std::complex<double> oracle_once(double alpha, int q, int m, std::span<const double> w, std::span<const double> s,
                                 int n, std::int64_t& evals) {
  std::vector<double> u, wu;
  gauss_legendre(n, u, wu);
  const SphereRule Sx = sphere_rule(q, n), St = sphere_rule(m, n);
  const std::complex<double> I(0, 1);
  std::complex<double> total = 0;
  for (int i = 0; i < n; ++i) {
    // r = sin(pi v / 2) on v in [0, 1] smooths the (1 - r^a) powers at r = 1.
    const double v = 0.5 * (u[i] + 1);
    const double r = std::sin(0.5 * pi * v), jac = 0.5 * pi * std::cos(0.5 * pi * v) * 0.5 * wu[i];
    const double d = 2 * std::pow(std::sin(0.25 * pi * (1 - v)), 2);
    const double rho = std::pow(std::max(0.0, one_minus_pow(r, d, alpha)), 2 / alpha);
    std::complex<double> ax = 0;
    for (size_t j = 0; j < Sx.nodes.size(); ++j) {
      double ph = 0;
      for (int a = 0; a < q; ++a) ph += w[a] * Sx.nodes[j][a];
      ax += Sx.weights[j] * std::exp(-2 * pi * I * (r * ph));
    }
    std::complex<double> at = 0;
    for (int k = 0; k < n; ++k) {
      const double tau = 0.5 * (u[k] + 1), wt = 0.5 * wu[k] * std::pow(tau, m - 1);
      for (size_t j = 0; j < St.nodes.size(); ++j) {
        double ph = 0;
        for (int a = 0; a < m; ++a) ph += s[a] * St.nodes[j][a];
        at += wt * St.weights[j] * std::exp(-2 * pi * I * (rho * tau * ph));
      }
    }
    evals += static_cast<std::int64_t>(Sx.nodes.size() + n * St.nodes.size());
    total += jac * std::pow(r, q - 1) * ax * std::pow(rho, m) * at;
  }
  return total;
}

}  // namespace

OracleValue fourier_oracle(double alpha, int q, int m, std::span<const double> w, std::span<const double> s,
                           std::int64_t budget) {
  check_dims(alpha, q, m);
  if (w.size() != static_cast<size_t>(q) || s.size() != static_cast<size_t>(m))
    fail(Errc::dimension_mismatch, "frequency dimensions do not match (q, m)");
  const double fw = std::sqrt(norm2(w)), fs = std::sqrt(norm2(s));
  if (fw > 20 || fs > 20) fail(Errc::domain, "the direct oracle is limited to |w|, |s| <= 20");
  const int n = 24 + static_cast<int>(std::ceil(2 * pi * (fw + fs)));
  auto cost = [&](int k) {
    const double sx = std::pow(2.0 * k, q > 1 ? 1 : 0) * std::pow(k, std::max(0, q - 2)) * (q == 1 ? 2 : 1);
    const double st = std::pow(2.0 * k, m > 1 ? 1 : 0) * std::pow(k, std::max(0, m - 2)) * (m == 1 ? 2 : 1);
    return static_cast<double>(k) * (sx + k * st);
  };
  if (cost(n) + cost(2 * n) > static_cast<double>(budget))
    fail(Errc::budget, "oracle quadrature exceeds the evaluation budget");
  OracleValue out;
  const auto coarse = oracle_once(alpha, q, m, w, s, n, out.evaluations);
  out.value = oracle_once(alpha, q, m, w, s, 2 * n, out.evaluations);
  // Refinement difference plus an allowance for rounding in the long sums.
  out.error = std::abs(out.value - coarse) + 1e-12 * unit_ball_volume(alpha, q, m);
  return out;
}

SpectralQuery Ray::at(double lambda) const {
  switch (kind) {
    case Kind::w_axis: return {lambda, 0, Route::automatic};
    case Kind::s_axis: return {0, lambda, Route::automatic};
    case Kind::fixed_ratio: return {lambda, ratio * lambda, Route::automatic};
  }
  return {};
}

std::string Ray::name() const {
  switch (kind) {
    case Kind::w_axis: return "w-axis";
    case Kind::s_axis: return "s-axis";
    case Kind::fixed_ratio: {
      std::ostringstream os;
      os << "fixed-ratio(" << ratio << ")";
      return os.str();
    }
  }
  return "?";
}

Ray Ray::parse(const std::string& s) {
  if (s == "w-axis") return {Kind::w_axis, 1};
  if (s == "s-axis") return {Kind::s_axis, 1};
  if (s == "diagonal") return {Kind::fixed_ratio, 1};
  const std::string prefix = "fixed-ratio(";
  if (s.rfind(prefix, 0) == 0 && s.back() == ')') {
    size_t used = 0;
    const std::string body = s.substr(prefix.size(), s.size() - prefix.size() - 1);
    double r = 0;
    try {
      r = std::stod(body, &used);
    } catch (...) {
      used = 0;
    }
    if (used == body.size() && r > 0 && std::isfinite(r)) return {Kind::fixed_ratio, r};
  }
  fail(Errc::invalid_argument, "unknown ray '" + s + "' (w-axis, s-axis, diagonal, fixed-ratio(r))");
}

namespace {

bool is_multiple(double alpha, int k) {
  const double v = alpha / k;
  return v >= 1 && v == std::floor(v);
}

}  // namespace

DecayPrediction predicted_decay(double alpha, int q, int m, const Ray& ray) {
  check_dims(alpha, q, m);
  DecayPrediction p;
  const double slow = (q + 1) / 2.0 + 2.0 * m / alpha;
  switch (ray.kind) {
    case Ray::Kind::w_axis:
      p.available = true;
      if (is_multiple(alpha, 2)) {
        p.exponent = -slow;
        p.rule = "w-axis, even alpha";
      } else if (q < 4.0 * m / alpha - 2 * alpha + 1) {
        p.exponent = -(q + alpha);
        p.rule = "w-axis, small q";
      } else {
        p.exponent = -slow;
        p.rule = "w-axis, large q";
      }
      break;
    case Ray::Kind::s_axis: {
      p.available = true;
      const double other = (m + 1) / 2.0 + q / alpha;
      if (is_multiple(alpha, 4)) {
        p.exponent = -other;
        p.rule = "s-axis, alpha divisible by 4";
      } else if (q > (m + alpha - 1) / 2 * alpha) {
        p.exponent = -(m + alpha / 2);
        p.rule = "s-axis, large q";
      } else {
        p.exponent = -other;
        p.rule = "s-axis, small q";
      }
      break;
    }
    case Ray::Kind::fixed_ratio: {
      const double sigma = (alpha > 1 && alpha < 2) ? 1.0 / 3 : 0.5;
      if (alpha >= 2 - m) {
        p.available = true;
        // Both mixed bounds give the same total power along a ray of fixed ratio.
        p.exponent = -(q + m) / 2.0 - sigma;
        p.rule = (q / 2.0 + 1 >= alpha && alpha >= 3 - m) ? "mixed, improved" : "mixed";
      } else {
        p.rule = "mixed, alpha < 2 - m: no bound";
      }
      break;
    }
  }
  return p;
}

DecayFit decay_fit(double alpha, int q, int m, const Ray& ray, const std::vector<double>& lambda_grid, int workers,
                   double tol) {
  check_dims(alpha, q, m);
  if (lambda_grid.size() < 16) fail(Errc::invalid_argument, "decay fit needs at least 16 grid points");
  for (size_t i = 0; i < lambda_grid.size(); ++i)
    if (!(lambda_grid[i] > 0) || (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1])))
      fail(Errc::invalid_argument, "decay fit grid must be positive and strictly increasing");
  if (std::log10(lambda_grid.back() / lambda_grid.front()) < 1.5 - 1e-12)
    fail(Errc::invalid_argument, "decay fit grid must span at least 1.5 decades");

  DecayFit out;
  out.ray = ray;
  out.predicted = predicted_decay(alpha, q, m, ray);
  out.lambda = lambda_grid;
  out.magnitude.assign(lambda_grid.size(), 0);
  detail::parallel_for(lambda_grid.size(), workers, [&](size_t i) {
    out.magnitude[i] = std::abs(fourier_ball(alpha, q, m, ray.at(lambda_grid[i]), tol).value);
  });
  out.fit = fit_envelope(out.lambda, out.magnitude);
  if (out.fit.windows < 8) fail(Errc::invalid_argument, "decay fit grid leaves fewer than 8 nonempty windows");
  out.on_envelope.assign(lambda_grid.size(), false);
  for (double x : out.fit.window_x)
    for (size_t i = 0; i < lambda_grid.size(); ++i)
      if (lambda_grid[i] == x) out.on_envelope[i] = true;
  return out;
}

}  // namespace nilcount
