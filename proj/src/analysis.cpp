#include "nilcount/analysis.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

#include "nilcount/error.hpp"
#include "nilcount/spectral.hpp"
#include "parallel.hpp"

namespace nilcount {

namespace {

constexpr double kEq = 1e-12;
bool same(double a, double b) { return std::abs(a - b) <= kEq * std::max(1.0, std::abs(b)); }

void check_dims(int q, int m, double alpha) {
  if (q < 1 || m < 1) fail(Errc::invalid_argument, "q and m must be positive");
  if (!(alpha > 0) || !std::isfinite(alpha)) fail(Errc::domain, "alpha must be positive");
}

}  // namespace

double sigma_of(double alpha) { return (alpha > 1 && alpha < 2) ? 1.0 / 3 : 0.5; }

ExponentTable predicted_exponents(int q, int m, double alpha) {
  check_dims(q, m, alpha);
  ExponentTable t;
  t.q = q;
  t.m = m;
  t.alpha = alpha;
  t.sigma = sigma_of(alpha);
  t.beta1 = q / 2.0 + 0.5 * std::min(q + 2 * alpha, 4.0 * m / alpha + 1);
  t.beta2 = m / 2.0 + 0.5 * std::min(m + alpha, 2.0 * q / alpha + 1);
  const double Q = q + 2.0 * m;
  const double crit = 4.0 * m / alpha + 1;  // q against 4m/alpha + 1
  const bool q_eq = same(q, crit);
  const bool q_lt = q < crit && !q_eq;
  auto add = [&](const char* tag, double g1, double g2) { t.candidates.push_back({tag, g1, g2}); };

  if (alpha >= 1 && q / 2.0 + 1 >= alpha && alpha >= 3 - m)
    add("ge1-balanced", std::min({crit, m + 2 * t.sigma, 2.0}), (q_eq && q == 2) ? 1 : 0);
  if (alpha >= 1 && alpha > q / 2.0 + 1 && (q_lt || q_eq))
    add("ge1-steep-low", 2, (q_lt && m == 1 ? 2 / (Q + 4) : 0) + (q_eq && q == 2 ? 1 : 0));
  if (alpha >= 1 && alpha > q / 2.0 + 1 && !(q_lt || q_eq))
    add("ge1-steep-high", std::min(2 * q * alpha / (q * alpha + alpha - 4 * m), 2.0),
        (alpha < 4 * m && m == 1) ? 2 / Q : 0);
  if (same(alpha, 1) && m == 1) add("unit-alpha-m1", 2, 2.0 / (q + 2));
  if (alpha > 1 && alpha < 2 && !same(alpha, 1) && m == 1) add("mid-alpha-m1", (6.0 * q + 14) / (3.0 * q + 10), 0);
  if (alpha <= 1 + kEq && m >= 2) add("le1-higher-center", 2 * Q * alpha / (Q + 2 * alpha - 3 + (m == 2 ? 1 : 0)), 0);
  if (m == 1 && q >= 2) {
    if (q == 2)
      add("m1-any-alpha", 4.0 / 3, 0);
    else if (q == 3)
      add("m1-any-alpha", 243.0 / 158, 0);
    else if (q == 4)
      add("m1-any-alpha", 2, 1);
    else
      add("m1-any-alpha", 2, 0);
  }

  if (t.candidates.empty()) fail(Errc::domain, "no exponent clause covers this (q, m, alpha)");
  const ExponentCandidate* best = &t.candidates.front();
  for (const auto& c : t.candidates) {
    if (c.gamma1 > best->gamma1 + kEq || (same(c.gamma1, best->gamma1) && c.gamma2 < best->gamma2 - kEq)) best = &c;
  }
  t.gamma1 = best->gamma1;
  t.gamma2 = best->gamma2;
  t.tag = best->tag;

  if (alpha >= 1) {
    if (q / 2.0 + 1 >= alpha && alpha >= 3 - m)
      t.table_gamma1 = std::min({crit, m + 2 * t.sigma, 2.0});
    else if ((alpha > q / 2.0 + 1 && (q_lt || q_eq)) || (same(alpha, 1) && m == 1))
      t.table_gamma1 = 2;
    else if (alpha > q / 2.0 + 1)
      t.table_gamma1 = std::min(2 * q * alpha / (q * alpha + alpha - 4 * m), 2.0);
    else if (alpha > 1 && alpha < 2 && m == 1)
      t.table_gamma1 = (6.0 * q + 14) / (3.0 * q + 10);

    if (q_eq && q == 2 && alpha >= 3 - m)
      t.table_gamma2 = 1;
    else if (alpha > 2 && alpha < 3 && q == 2 && m == 1)
      t.table_gamma2 = 2 / (Q + 4);
    else if ((same(alpha, 1) && m == 1) || (alpha < 4 && alpha > q / 2.0 + 1 && q > 4 / alpha + 1 && m == 1))
      t.table_gamma2 = 2 / Q;
    else
      t.table_gamma2 = 0;
  }
  return t;
}

const char* verdict_name(SweepResult::Verdict v) {
  switch (v) {
    case SweepResult::Verdict::consistent: return "consistent";
    case SweepResult::Verdict::above_prediction: return "above-prediction";
    case SweepResult::Verdict::undefined: return "undefined";
  }
  return "?";
}

std::vector<double> radius_grid(double rmin, double rmax, int points, bool geometric) {
  if (!(rmin > 0) || !(rmax > rmin) || points < 2) fail(Errc::domain, "radius grid needs 0 < rmin < rmax and >= 2 points");
  std::vector<double> r(points);
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / (points - 1);
    r[i] = geometric ? rmin * std::pow(rmax / rmin, f) : rmin + (rmax - rmin) * f;
  }
  r.back() = rmax;
  return r;
}

SweepResult summarize_sweep(const Problem& p, std::vector<CountRecord> records, const SweepOptions& opt) {
  SweepResult out;
  out.records = std::move(records);
  const int q = p.group.q(), m = p.group.m();
  out.table = predicted_exponents(q, m, p.alpha());
  out.predicted_slope = q + 2.0 * m - out.table.gamma1;
  std::vector<double> x, y;
  for (const auto& r : out.records) {
    x.push_back(r.R);
    y.push_back(r.abs_error);
  }
  out.fit = fit_envelope(x, y, opt.min_windows);
  out.sharp_case = same(p.alpha(), 2) && m == 1;
  switch (out.fit.status) {
    case EnvelopeFit::Status::undefined:
      out.verdict = SweepResult::Verdict::undefined;
      out.note = out.records.size() < 2 ? "single radius: slope undefined" : "too few nonempty windows: slope undefined";
      break;
    case EnvelopeFit::Status::zero:
      out.verdict = SweepResult::Verdict::consistent;
      out.note = "discrepancy identically zero";
      break;
    case EnvelopeFit::Status::ok:
      out.verdict = out.fit.slope <= out.predicted_slope + opt.slope_tolerance ? SweepResult::Verdict::consistent
                                                                                : SweepResult::Verdict::above_prediction;
      if (out.fit.windows < opt.min_windows) out.note = "fewer windows than requested";
      break;
  }
  if (out.sharp_case && out.fit.status == EnvelopeFit::Status::ok && out.fit.slope < opt.sharp_floor) {
    out.warning = true;
    std::ostringstream s;
    s << "slope " << out.fit.slope << " below " << opt.sharp_floor << " in the sharp case; the range may be too short";
    out.note = s.str();
  }
  return out;
}

SweepResult sweep(const Problem& p, const std::vector<double>& radii, const SweepOptions& opt) {
  validate_problem(p);
  if (radii.empty()) fail(Errc::invalid_argument, "sweep needs at least one radius");
  for (size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0) || !std::isfinite(radii[i])) fail(Errc::domain, "sweep radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) fail(Errc::domain, "sweep radii must be strictly increasing");
  }
  const int m = p.group.m();
  const auto red = p.reduced();
  const double Rmax = radii.back();
  const double fibres = std::pow(std::numbers::pi, m / 2.0) / std::tgamma(m / 2.0 + 1) * std::pow(Rmax * Rmax + 1, m) /
                        std::abs(red.Mt2.determinant());
  if (fibres > opt.max_fibres) {
    std::ostringstream s;
    s << "largest radius needs about " << fibres << " centre fibres, over the budget " << opt.max_fibres;
    fail(Errc::budget, s.str());
  }
  std::vector<CountRecord> recs;
  recs.reserve(radii.size());
  for (double R : radii) {
    BallQuery query{Radius::from_double(R), std::nullopt};
    recs.push_back(make_record(p, R, count_ball(p, query, opt.counter)));
  }
  return summarize_sweep(p, std::move(recs), opt);
}

double epsilon_power(double eps, double eta1, double eta2) {
  if (same(eta1, eta2)) return std::log(1 / eps);
  if (eta1 > eta2) return std::pow(eps, -(eta1 - eta2));
  return 1;
}

namespace {

struct Shell {
  double u;            // |A k|^2 with A the inverse transpose
  std::int64_t n2;     // |k|^2
  std::int64_t count;  // lattice vectors with this pair
};

// Nonzero k in Z^d with |k| <= K, grouped by (|A k|^2, |k|^2).
std::vector<Shell> shells(const Matrix& A, double K, std::int64_t& budget) {
  const int d = static_cast<int>(A.rows());
  const std::int64_t K2 = static_cast<std::int64_t>(std::floor(K * K + 1e-9));
  const std::int64_t b = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(K2)) + 1e-9));
  std::map<std::pair<double, std::int64_t>, std::int64_t> acc;
  std::vector<std::int64_t> k(d, 0);
  std::vector<double> kd(d);
  auto rec = [&](auto&& self, int i, std::int64_t used) -> void {
    if (i == d) {
      if (used == 0) return;
      if (--budget < 0) fail(Errc::budget, "dual sum exceeds the term budget; lower the caps");
      for (int j = 0; j < d; ++j) kd[j] = static_cast<double>(k[j]);
      const auto v = A.apply(kd);
      double u = 0;
      for (double x : v) u += x * x;
      ++acc[{u, used}];
      return;
    }
    for (std::int64_t x = -b; x <= b; ++x) {
      if (used + x * x > K2) continue;
      k[i] = x;
      self(self, i + 1, used + x * x);
    }
    k[i] = 0;
  };
  rec(rec, 0, 0);
  std::vector<Shell> out;
  out.reserve(acc.size());
  for (const auto& [key, c] : acc) out.push_back({key.first, key.second, c});
  return out;
}

double sphere_area(int d) { return 2 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0); }

double min_singular(const Matrix& A) {
  Eigen::MatrixXd E(A.rows(), A.cols());
  for (size_t i = 0; i < A.rows(); ++i)
    for (size_t j = 0; j < A.cols(); ++j) E(i, j) = A(i, j);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(E);
  return svd.singularValues().minCoeff();
}

struct GslWork {
  gsl_integration_workspace* w;
  GslWork() : w(gsl_integration_workspace_alloc(1000)) {}
  ~GslWork() { gsl_integration_workspace_free(w); }
};

template <class F>
double gsl_call(double x, void* p) {
  return (*static_cast<F*>(p))(x);
}

template <class F>
double integrate(F f, double a, double b, GslWork& work) {
  gsl_function g{&gsl_call<F>, &f};
  double r = 0, err = 0;
  const int st = std::isinf(b) ? gsl_integration_qagiu(&g, a, 0, 1e-6, 1000, work.w, &r, &err)
                               : gsl_integration_qags(&g, a, b, 0, 1e-6, 1000, work.w, &r, &err);
  if (st && st != GSL_EROUND) fail(Errc::convergence, std::string("tail integral: ") + gsl_strerror(st));
  return r;
}

struct Dual {
  int q, m, N;
  double alpha, eps, R, tol, vol1, Q;
  double s1, s2;  // smallest singular values of the inverse transposes
  double cap1, cap2;
  double mu1, mu2, mu3;
  int workers;
  std::vector<Shell> a, b;

  PoissonRadius at(double rho, std::int64_t& evaluations) const {
    PoissonRadius out;
    out.rho = rho;
    const double scale = std::pow(rho / R, Q) / vol1;
    const double two_pi = 2 * std::numbers::pi;
    auto weight = [&](double n1, double n2) { return std::pow(1 + eps * n1 + eps * eps * n2, -N); };

    struct Job {
      double l1, l2, w;
      std::int64_t mult;
      bool outer;
      int part;
    };
    std::vector<Job> jobs;
    for (const auto& s : a) {
      const double n = std::sqrt(static_cast<double>(s.n2));
      jobs.push_back({two_pi * rho * std::sqrt(s.u), 0, weight(n, 0), s.count, n > cap1 / 2, 1});
    }
    for (const auto& s : b) {
      const double n = std::sqrt(static_cast<double>(s.n2));
      jobs.push_back({0, two_pi * rho * rho * std::sqrt(s.u), weight(0, n), s.count, n > cap2 / 2, 2});
    }
    for (const auto& s : a)
      for (const auto& t : b) {
        const double n1 = std::sqrt(static_cast<double>(s.n2)), n2 = std::sqrt(static_cast<double>(t.n2));
        jobs.push_back({two_pi * rho * std::sqrt(s.u), two_pi * rho * rho * std::sqrt(t.u), weight(n1, n2),
                        s.count * t.count, n1 > cap1 / 2 || n2 > cap2 / 2, 3});
      }
    std::vector<double> mag(jobs.size());
    detail::parallel_for(jobs.size(), workers, [&](size_t i) {
      mag[i] = scale * std::abs(fourier_ball(alpha, q, m, {jobs[i].l1, jobs[i].l2}, tol).value);
    });
    evaluations += static_cast<std::int64_t>(jobs.size());

    PoissonPart* parts[] = {nullptr, &out.s1, &out.s2, &out.s3};
    out.s1.decay = mu1;
    out.s2.decay = mu2;
    out.s3.decay = mu3;
    double outer[4] = {0, 0, 0, 0};
    for (size_t i = 0; i < jobs.size(); ++i) {
      const auto& j = jobs[i];
      const double v = static_cast<double>(j.mult) * mag[i] * j.w;
      parts[j.part]->head += v;
      parts[j.part]->terms += j.mult;
      if (j.outer) outer[j.part] += v;
    }

    // Tail = (outer-half head) * (model mass past the cap) / (model mass on the outer half),
    // with the model C lambda^-mu times the weight on the continuum.
    GslWork work, inner;
    const double c1 = two_pi * rho * s1, c2 = two_pi * rho * rho * s2;
    auto f1 = [&](double r) { return std::pow(c1 * r, -mu1) * weight(r, 0) * std::pow(r, q - 1); };
    auto f2 = [&](double r) { return std::pow(c2 * r, -mu2) * weight(0, r) * std::pow(r, m - 1); };
    auto f3 = [&](double r1, double r2) {
      return std::pow(std::max(c1 * r1, c2 * r2), -mu3) * weight(r1, r2) * std::pow(r1, q - 1) * std::pow(r2, m - 1);
    };
    auto box = [&](double a1, double b1, double a2, double b2) {
      if (!(b1 > a1) || !(b2 > a2)) return 0.0;
      return integrate([&](double r2) { return integrate([&](double r1) { return f3(r1, r2); }, a1, b1, inner); }, a2, b2,
                       work);
    };
    const double wq = sphere_area(q), wm = sphere_area(m);
    auto fill = [&](PoissonPart& P, double o, double model_outer, double model_tail, double area) {
      if (!(model_outer > 0)) return;
      P.envelope_constant = o / (area * model_outer);
      P.tail = o * model_tail / model_outer;
    };
    fill(out.s1, outer[1], integrate(f1, std::max(1.0, cap1 / 2), cap1, work), integrate(f1, cap1, INFINITY, work), wq);
    fill(out.s2, outer[2], integrate(f2, std::max(1.0, cap2 / 2), cap2, work), integrate(f2, cap2, INFINITY, work), wm);
    {
      const double h1 = std::max(1.0, cap1 / 2), h2 = std::max(1.0, cap2 / 2);
      const double model_outer = box(1, cap1, 1, cap2) - box(1, h1, 1, h2);
      const double past = integrate(
          [&](double r2) {
            return integrate([&](double r1) { return f3(r1, r2); }, r2 > cap2 ? 1.0 : cap1, INFINITY, inner);
          },
          1.0, INFINITY, work);
      fill(out.s3, outer[3], model_outer, past, wq * wm);
    }
    return out;
  }
};

}  // namespace

PoissonEstimate poisson_estimate(const Problem& p, double R, double eps, const PoissonOptions& opt) {
  validate_problem(p);
  if (!(eps > 0 && eps < 1)) fail(Errc::domain, "poisson estimate needs 0 < eps < 1");
  if (!(R - eps > 0) || !std::isfinite(R)) fail(Errc::domain, "poisson estimate needs R > eps");
  if (!(opt.cap1 >= 1) || !(opt.cap2 >= 1))
    fail(Errc::invalid_argument, "both caps must be at least 1, otherwise a dual sum is empty");
  gsl_set_error_handler_off();

  const auto red = p.reduced();
  Dual d;
  d.q = p.group.q();
  d.m = p.group.m();
  d.alpha = p.alpha();
  d.N = opt.N > 0 ? opt.N : d.q + d.m + 1;
  d.eps = eps;
  d.R = R;
  d.tol = opt.tol;
  d.Q = d.q + 2.0 * d.m;
  d.vol1 = unit_ball_volume(d.alpha, d.q, d.m);
  d.workers = opt.workers;
  const Matrix A1 = red.Mt1.inexact().inverse().transpose(), A2 = red.Mt2.inexact().inverse().transpose();
  d.s1 = min_singular(A1);
  d.s2 = min_singular(A2);
  // Past these the weight is below 1e-12.
  const double reach = std::pow(1e12, 1.0 / d.N) - 1;
  d.cap1 = std::min(opt.cap1, reach / eps);
  d.cap2 = std::min(opt.cap2, reach / (eps * eps));
  if (d.cap2 < 1) d.cap2 = 1;
  if (d.cap1 < 1) d.cap1 = 1;

  d.mu1 = -predicted_decay(d.alpha, d.q, d.m, Ray{Ray::Kind::w_axis}).exponent;
  d.mu2 = -predicted_decay(d.alpha, d.q, d.m, Ray{Ray::Kind::s_axis}).exponent;
  const auto mixed = predicted_decay(d.alpha, d.q, d.m, Ray{Ray::Kind::fixed_ratio});
  d.mu3 = std::min(d.mu1, d.mu2);
  if (mixed.available) d.mu3 = std::min(d.mu3, -mixed.exponent);

  std::int64_t term_budget = opt.max_terms;
  d.a = shells(A1, d.cap1, term_budget);
  d.b = shells(A2, d.cap2, term_budget);
  const std::int64_t per_radius = static_cast<std::int64_t>(d.a.size() + d.b.size() + d.a.size() * d.b.size());
  if (2 * per_radius > opt.max_evaluations) {
    std::ostringstream s;
    s << "dual sums need " << 2 * per_radius << " transform evaluations, over the budget " << opt.max_evaluations;
    fail(Errc::budget, s.str());
  }

  PoissonEstimate out;
  out.R = R;
  out.eps = eps;
  out.N = d.N;
  out.cap1 = d.cap1;
  out.cap2 = d.cap2;
  out.plus = d.at(R + eps, out.evaluations);
  out.minus = d.at(R - eps, out.evaluations);
  out.edge = (std::pow(R + eps, d.Q) - std::pow(R, d.Q)) / std::pow(R, d.Q);
  for (const auto* r : {&out.plus, &out.minus})
    for (const auto* s : {&r->s1, &r->s2, &r->s3}) {
      out.head += s->head;
      out.tail += s->tail;
    }
  out.bound = out.head + out.tail + out.edge;
  out.bound_unit_edge = out.head + out.tail + eps / R;

  const auto t = predicted_exponents(d.q, d.m, d.alpha);
  out.env1 = std::pow(R, -t.beta1) * epsilon_power(eps, d.q, t.beta1);
  out.env2 = std::pow(R, -2 * t.beta2) * epsilon_power(eps, 2.0 * d.m, 2 * t.beta2);
  out.env3 = mixed.available ? std::pow(R, -d.Q / 2 - 2 * t.sigma) * std::pow(eps, -d.q / 2.0) *
                                   epsilon_power(eps, d.m, 2 * t.sigma)
                             : std::numeric_limits<double>::quiet_NaN();

  if (out.tail > opt.max_tail_ratio * out.head) {
    std::ostringstream s;
    s << "modelled tail " << out.tail << " exceeds " << opt.max_tail_ratio << " of the summed head " << out.head
      << "; raise the caps";
    fail(Errc::budget, s.str());
  }
  return out;
}

}  // namespace nilcount
