#include "nilcount/phase.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <random>

#include "nilcount/error.hpp"
#include "nilcount/spectral.hpp"
#include "parallel.hpp"

namespace nilcount {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Both families are  A r + s B (1 - r^beta)^gamma.
struct Shape {
  double A, B, beta, gamma;
};

Shape shape(PhaseFamily f, double alpha, double l1, double l2) {
  if (f == PhaseFamily::phi) return {l1, l2, alpha, 2 / alpha};
  return {l2, l1, alpha / 2, 1 / alpha};
}

void check_alpha(double alpha) {
  if (!(alpha > 0) || !std::isfinite(alpha)) fail(Errc::invalid_argument, "phase: alpha must be positive");
}

void check_spec(const PhaseSpec& s) {
  check_alpha(s.alpha);
  if (!(s.lambda1 > 0) || !(s.lambda2 > 0) || !std::isfinite(s.lambda1) || !std::isfinite(s.lambda2))
    fail(Errc::invalid_argument, "phase: lambda1 and lambda2 must be positive");
  if (s.sign != 1 && s.sign != -1) fail(Errc::invalid_argument, "phase: sign must be +1 or -1");
}

double log_profile(PhaseFamily f, double alpha, double r) {
  auto sh = shape(f, alpha, 1, 1);
  double lr = std::log(r);
  double om = -std::expm1(sh.beta * lr);
  return (sh.gamma - 1) * std::log(om) + (sh.beta - 1) * lr;
}

double limit_at_zero(PhaseFamily f, double alpha) {
  auto sh = shape(f, alpha, 1, 1);
  return sh.beta > 1 ? -inf : sh.beta < 1 ? inf : 0.0;
}

double limit_at_one(PhaseFamily f, double alpha) {
  auto sh = shape(f, alpha, 1, 1);
  return sh.gamma > 1 ? -inf : sh.gamma < 1 ? inf : 0.0;
}

// Root of profile = target on (lo, hi), where the profile is monotone.
CriticalPoint solve_profile(PhaseFamily f, double alpha, double target, double lo, double hi) {
  double lt = std::log(target);
  auto F = [&](double r) {
    if (r <= 0) return limit_at_zero(f, alpha) - lt;
    if (r >= 1) return limit_at_one(f, alpha) - lt;
    return log_profile(f, alpha, r) - lt;
  };
  double flo = F(lo), fhi = F(hi);
  CriticalPoint cp;
  if (flo == 0 && lo > 0) {
    cp.value = lo;
    cp.complement = 1 - lo;
    cp.absent = false;
    return cp;
  }
  if (fhi == 0 && hi < 1) {
    cp.value = hi;
    cp.complement = 1 - hi;
    cp.absent = false;
    return cp;
  }
  if (!((flo < 0 && fhi > 0) || (flo > 0 && fhi < 0))) {
    cp.value = std::abs(flo) <= std::abs(fhi) ? lo : hi;
    cp.complement = 1 - cp.value;
    cp.absent = true;
    cp.residual = std::abs(std::expm1(std::min(std::abs(flo), std::abs(fhi))));
    return cp;
  }
  bool rising = flo < 0;
  for (int it = 0; it < 4000; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double fm = F(mid);
    if (fm == 0) {
      lo = hi = mid;
      break;
    }
    if ((fm < 0) == rising)
      lo = mid;
    else
      hi = mid;
  }
  double flo2 = std::abs(F(lo)), fhi2 = std::abs(F(hi));
  cp.value = flo2 <= fhi2 ? lo : hi;
  cp.complement = 1 - cp.value;
  cp.residual = std::abs(std::expm1(std::min(flo2, fhi2)));
  cp.absent = !(cp.value > 0 && cp.value < 1);
  if (cp.absent || cp.value < 0.5) return cp;

  // Near 1 the spacing of doubles in r is too coarse; polish in om = 1 - r^beta.
  auto sh = shape(f, alpha, 1, 1);
  auto G = [&](double om) { return (sh.gamma - 1) * std::log(om) + (sh.beta - 1) * std::log1p(-om) / sh.beta - lt; };
  double olo = -std::expm1(sh.beta * std::log(hi)), ohi = -std::expm1(sh.beta * std::log(lo));
  if (!(olo > 0)) olo = std::numeric_limits<double>::min();
  double glo = G(olo), ghi = G(ohi);
  if (!((glo <= 0 && ghi >= 0) || (glo >= 0 && ghi <= 0))) return cp;
  bool orising = glo < ghi;
  for (int it = 0; it < 4000; ++it) {
    double mid = 0.5 * (olo + ohi);
    if (mid <= olo || mid >= ohi) break;
    double gm = G(mid);
    if (gm == 0) {
      olo = ohi = mid;
      break;
    }
    if ((gm < 0) == orising)
      olo = mid;
    else
      ohi = mid;
  }
  double a1 = std::abs(G(olo)), a2 = std::abs(G(ohi));
  double om = a1 <= a2 ? olo : ohi;
  double res = std::abs(std::expm1(std::min(a1, a2)));
  if (res <= cp.residual) {
    cp.complement = -std::expm1(std::log1p(-om) / sh.beta);
    cp.value = 1 - cp.complement;
    cp.residual = res;
  }
  return cp;
}

bool mid_alpha(double alpha) { return alpha > 1 && alpha < 2; }

}  // namespace

double phase_profile(PhaseFamily family, double alpha, double r) {
  check_alpha(alpha);
  if (!(r > 0 && r < 1)) fail(Errc::domain, "phase: r must lie in (0,1)");
  return std::exp(log_profile(family, alpha, r));
}

double phase_eval(const PhaseSpec& spec, double r, int order) {
  check_spec(spec);
  if (!(r > 0 && r < 1)) fail(Errc::domain, "phase: r must lie in (0,1)");
  if (order < 0 || order > 3) fail(Errc::invalid_argument, "phase: derivative order must be 0..3");
  auto [A, B, be, ga] = shape(spec.family, spec.alpha, spec.lambda1, spec.lambda2);
  double sB = spec.sign * B;
  double lr = std::log(r);
  double w = std::exp(be * lr);
  double om = -std::expm1(be * lr);
  double lom = std::log(om);
  auto pw = [&](int k) { return std::exp((ga - k) * lom + (be - k) * lr); };
  double gb = ga * be;
  switch (order) {
    case 0:
      return A * r + sB * std::exp(ga * lom);
    case 1:
      return A - sB * gb * pw(1);
    case 2:
      return -sB * gb * pw(2) * ((be - 1) - (gb - 1) * w);
    default: {
      double P = (be - 1) - (gb - 1) * w;
      double br = P * ((be - 2) * om - (ga - 2) * be * w) - (gb - 1) * be * w * om;
      return -sB * gb * pw(3) * br;
    }
  }
}

CriticalPoints alpha_points(double alpha) {
  check_alpha(alpha);
  CriticalPoints cp;
  cp.alpha = alpha;
  cp.c_alpha = c_alpha(alpha);
  if (mid_alpha(alpha)) {
    cp.r0 = std::pow(alpha - 1, 1 / alpha);
    cp.R0 = std::pow(2 - alpha, 2 / alpha);
    double c = cp.c_alpha;
    cp.r0_lo = solve_profile(PhaseFamily::phi, alpha, c / 4, 0, cp.r0);
    cp.r0_hi = solve_profile(PhaseFamily::phi, alpha, c / 4, cp.r0, 1);
    cp.R0_lo = solve_profile(PhaseFamily::psi, alpha, 4 / c, 0, cp.R0);
    cp.R0_hi = solve_profile(PhaseFamily::psi, alpha, 4 / c, cp.R0, 1);
  }
  return cp;
}

CriticalPoints critical_points(const PhaseSpec& spec) {
  check_spec(spec);
  double a = spec.alpha;
  CriticalPoints cp = alpha_points(a);
  double tr = spec.lambda1 / (4 * spec.lambda2);
  double tR = spec.lambda2 / spec.lambda1;
  if (mid_alpha(a)) {
    cp.r_star = solve_profile(PhaseFamily::phi, a, tr, 0, cp.r0);
    cp.r_star_upper = solve_profile(PhaseFamily::phi, a, tr, cp.r0, 1);
    cp.R_star = solve_profile(PhaseFamily::psi, a, tR, 0, cp.R0);
    cp.R_star_upper = solve_profile(PhaseFamily::psi, a, tR, cp.R0, 1);
  } else {
    cp.r_star = solve_profile(PhaseFamily::phi, a, tr, 0, 1);
    cp.R_star = solve_profile(PhaseFamily::psi, a, tR, 0, 1);
  }
  return cp;
}

const char* regime_name(PhaseRegime r) { return r == PhaseRegime::case_i ? "case-i" : "case-ii"; }

PhaseRegime parse_regime(const std::string& s) {
  if (s == "case-i") return PhaseRegime::case_i;
  if (s == "case-ii") return PhaseRegime::case_ii;
  fail(Errc::invalid_argument, "unknown regime '" + s + "' (expected case-i or case-ii)");
}

std::vector<std::pair<double, double>> sample_lambdas(double alpha, PhaseRegime regime, size_t n, std::uint64_t seed) {
  check_alpha(alpha);
  double c = c_alpha(alpha);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(-1, 3), gap(-4, 2), below(-4, 0);
  std::vector<std::pair<double, double>> out;
  for (size_t i = 0; i < n; ++i) {
    double l2 = std::pow(10.0, mag(rng));
    double l1;
    if (regime == PhaseRegime::case_i) {
      l1 = i == 0 ? c * l2 : c * l2 * (1 + std::pow(10.0, gap(rng)));
      if (l1 < c * l2) l1 = c * l2;
    } else {
      l1 = c * l2 * std::pow(10.0, below(rng));
      if (l1 >= c * l2) l1 = std::nextafter(c * l2, 0.0);
    }
    out.emplace_back(l1, l2);
  }
  return out;
}

namespace {

struct ClauseDef {
  const char* id;
  const char* statement;
  double multiple;
  bool strict;
  bool diagnostic;
  bool ref_lambda2;
};

// Infimum of f over (lo, hi) sampled at cell midpoints; empty when the interval is.
template <class F>
std::optional<double> infimum(double lo, double hi, int n, F&& f) {
  if (!(hi > lo)) return std::nullopt;
  double m = inf;
  for (int i = 0; i < n; ++i) m = std::min(m, f(lo + (hi - lo) * (i + 0.5) / n));
  return m;
}

std::optional<double> min_opt(std::optional<double> a, std::optional<double> b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

std::optional<double> sum_opt(std::optional<double> a, std::optional<double> b) {
  if (!a || !b) return min_opt(a, b);
  return *a + *b;
}

struct Plan {
  std::vector<ClauseDef> defs;
  // infima per clause for one lambda sample
  std::function<std::vector<std::optional<double>>(double, double)> eval;
};

Plan make_plan(double alpha, PhaseRegime regime, int n, const CriticalPoints& ap) {
  Plan plan;
  bool ge2 = alpha >= 2, le1 = alpha <= 1;
  bool one = regime == PhaseRegime::case_i;
  if (one) {
    if (ge2)
      plan.defs = {{"phi+.monotone", "(phi+)' decreasing on (0,1)", 0, false, false, false},
                   {"phi+.first", "(phi+)' >= lambda1/2 on (0,r*)", 0.5, false, false, false},
                   {"phi+.second", "|(phi+)''| >= lambda1/2 on (r*,1)", 0.5, false, false, false}};
    else if (le1)
      plan.defs = {{"phi+.monotone", "(phi+)' increasing on (0,1)", 0, false, false, false},
                   {"phi+.first", "(phi+)' >= lambda1/2 on (r*,1)", 0.5, false, false, false},
                   {"phi+.second", "|(phi+)''| >= lambda1/2 on (0,r*)", 0.5, false, false, false}};
    else
      plan.defs = {{"phi+.monotone", "(phi+)' decreasing on (0,r0), increasing on (r0,1)", 0, false, false, false},
                   {"phi+.outer", "(phi+)' >= D lambda1 on (0,r0') u (r0'',1)", 0, true, false, false},
                   {"phi+.inner", "inf (phi+)' + inf |(phi+)'''| >= D lambda1 on [r0',r0'']", 0, true, false, false}};
  } else {
    if (ge2)
      plan.defs = {{"psi+.monotone", "(psi+)' decreasing on (0,1)", 0, false, false, true},
                   {"psi+.first", "(psi+)' >= lambda2/2 on (0,R*)", 0.5, false, false, true},
                   {"psi+.second", "|(psi+)''| >= lambda2/4 on (R*,1)", 0.25, false, false, true}};
    else if (le1)
      plan.defs = {{"psi+.monotone", "(psi+)' increasing on (0,1)", 0, false, false, true},
                   {"psi+.first", "(psi+)' >= lambda2/2 on (R*,1)", 0.5, false, false, true},
                   {"psi+.second", "|(psi+)''| >= lambda2/4 on (0,R*)", 0.25, false, false, true}};
    else
      plan.defs = {
          {"psi+.monotone", "(psi+)' increasing on (0,R0), decreasing on (R0,1)", 0, false, false, true},
          {"psi+.outer", "|(psi+)'| + |(psi+)''| >= D' lambda2 pointwise on (0,R0') u (R0'',1)", 0, true, false, true},
          {"psi+.outer-separate", "inf |(psi+)'| + inf |(psi+)''| over (0,R0') u (R0'',1)", 0, true, true, true},
          {"psi+.inner", "inf |(psi+)'| + inf |(psi+)'''| >= D' lambda2 on [R0',R0'']", 0, true, false, true}};
  }
  plan.defs.push_back({"phi-.bound", "(phi-)' >= lambda1 on (0,1)", 1, false, false, false});
  plan.defs.push_back({"phi-.monotone", "(phi-)' monotone on each piece split at r0", 0, false, false, false});
  plan.defs.push_back({"psi-.bound", "(psi-)' >= lambda2 on (0,1)", 1, false, false, true});
  plan.defs.push_back({"psi-.monotone", "(psi-)' monotone on each piece split at R0", 0, false, false, true});

  plan.eval = [=](double l1, double l2) {
    PhaseSpec pp{alpha, l1, l2, +1, PhaseFamily::phi};
    PhaseSpec pm{alpha, l1, l2, -1, PhaseFamily::phi};
    PhaseSpec sp{alpha, l1, l2, +1, PhaseFamily::psi};
    PhaseSpec sm{alpha, l1, l2, -1, PhaseFamily::psi};
    auto d = [](const PhaseSpec& s, int k, double c = 1) {
      return [&s, k, c](double r) { return c * phase_eval(s, r, k); };
    };
    auto absf = [](auto f) { return [f](double r) { return std::abs(f(r)); }; };
    std::vector<std::optional<double>> out;
    CriticalPoints cp = critical_points(pp);
    if (one) {
      if (ge2 || le1) {
        double rs = cp.r_star.value;
        out.push_back(infimum(0, 1, n, d(pp, 2, ge2 ? -1 : 1)));
        out.push_back(ge2 ? infimum(0, rs, n, d(pp, 1)) : infimum(rs, 1, n, d(pp, 1)));
        out.push_back(ge2 ? infimum(rs, 1, n, absf(d(pp, 2))) : infimum(0, rs, n, absf(d(pp, 2))));
      } else {
        double lo = ap.r0_lo.value, hi = ap.r0_hi.value;
        out.push_back(min_opt(infimum(0, ap.r0, n, d(pp, 2, -1)), infimum(ap.r0, 1, n, d(pp, 2))));
        out.push_back(min_opt(infimum(0, lo, n, d(pp, 1)), infimum(hi, 1, n, d(pp, 1))));
        out.push_back(sum_opt(infimum(lo, hi, n, d(pp, 1)), infimum(lo, hi, n, absf(d(pp, 3)))));
      }
    } else {
      if (ge2 || le1) {
        double Rs = cp.R_star.value;
        out.push_back(infimum(0, 1, n, d(sp, 2, ge2 ? -1 : 1)));
        out.push_back(ge2 ? infimum(0, Rs, n, d(sp, 1)) : infimum(Rs, 1, n, d(sp, 1)));
        out.push_back(ge2 ? infimum(Rs, 1, n, absf(d(sp, 2))) : infimum(0, Rs, n, absf(d(sp, 2))));
      } else {
        double lo = ap.R0_lo.value, hi = ap.R0_hi.value;
        auto both = [&](double r) { return std::abs(phase_eval(sp, r, 1)) + std::abs(phase_eval(sp, r, 2)); };
        out.push_back(min_opt(infimum(0, ap.R0, n, d(sp, 2)), infimum(ap.R0, 1, n, d(sp, 2, -1))));
        out.push_back(min_opt(infimum(0, lo, n, both), infimum(hi, 1, n, both)));
        out.push_back(sum_opt(min_opt(infimum(0, lo, n, absf(d(sp, 1))), infimum(hi, 1, n, absf(d(sp, 1)))),
                              min_opt(infimum(0, lo, n, absf(d(sp, 2))), infimum(hi, 1, n, absf(d(sp, 2))))));
        out.push_back(sum_opt(infimum(lo, hi, n, absf(d(sp, 1))), infimum(lo, hi, n, absf(d(sp, 3)))));
      }
    }
    out.push_back(infimum(0, 1, n, d(pm, 1)));
    if (mid_alpha(alpha)) {
      out.push_back(min_opt(infimum(0, ap.r0, n, d(pm, 2)), infimum(ap.r0, 1, n, d(pm, 2, -1))));
    } else {
      out.push_back(infimum(0, 1, n, d(pm, 2, alpha >= 2 ? 1 : -1)));
    }
    out.push_back(infimum(0, 1, n, d(sm, 1)));
    if (mid_alpha(alpha)) {
      out.push_back(min_opt(infimum(0, ap.R0, n, d(sm, 2, -1)), infimum(ap.R0, 1, n, d(sm, 2))));
    } else {
      out.push_back(infimum(0, 1, n, d(sm, 2, alpha >= 2 ? 1 : -1)));
    }
    return out;
  };
  return plan;
}

}  // namespace

PhaseReport verify_phase_lemmas(double alpha, PhaseRegime regime, const std::vector<std::pair<double, double>>& lambdas,
                                int grid_n, int workers) {
  check_alpha(alpha);
  if (grid_n < 1) fail(Errc::invalid_argument, "phase: grid_n must be positive");
  double c = c_alpha(alpha);
  for (auto [l1, l2] : lambdas) {
    if (!(l1 > 0) || !(l2 > 0) || !std::isfinite(l1) || !std::isfinite(l2))
      fail(Errc::invalid_argument, "phase: lambda1 and lambda2 must be positive");
    bool in_i = l1 >= c * l2;
    if (in_i != (regime == PhaseRegime::case_i))
      fail(Errc::domain, "phase: lambda sample outside the " + std::string(regime_name(regime)) + " regime");
  }
  PhaseReport rep;
  rep.alpha = alpha;
  rep.regime = regime;
  rep.grid_n = grid_n;
  rep.samples = lambdas.size();
  rep.points = alpha_points(alpha);
  Plan plan = make_plan(alpha, regime, grid_n, rep.points);

  std::vector<std::vector<std::optional<double>>> infima(lambdas.size());
  detail::parallel_for(lambdas.size(), workers,
                       [&](size_t i) { infima[i] = plan.eval(lambdas[i].first, lambdas[i].second); });

  for (size_t j = 0; j < plan.defs.size(); ++j) {
    const auto& def = plan.defs[j];
    ClauseResult cr;
    cr.id = def.id;
    cr.statement = def.statement;
    cr.multiple = def.multiple;
    cr.strict = def.strict;
    cr.diagnostic = def.diagnostic;
    for (size_t i = 0; i < lambdas.size(); ++i) {
      auto v = infima[i][j];
      ++cr.checked;
      if (!v) {
        ++cr.vacuous;
        continue;
      }
      double ref = def.ref_lambda2 ? lambdas[i].second : lambdas[i].first;
      double bound = def.multiple * ref;
      bool ok = def.strict ? *v > bound : *v >= bound;
      if (!ok) ++cr.failed;
      double ratio = *v / ref;
      if (ratio < cr.worst_ratio) {
        cr.worst_ratio = ratio;
        cr.worst_lambda1 = lambdas[i].first;
        cr.worst_lambda2 = lambdas[i].second;
      }
    }
    rep.clauses.push_back(cr);
  }
  if (mid_alpha(alpha)) {
    double d = inf;
    for (const auto& cr : rep.clauses)
      if ((cr.id == "phi+.outer" || cr.id == "phi+.inner" || cr.id == "psi+.outer" || cr.id == "psi+.inner"))
        d = std::min(d, cr.worst_ratio);
    if (regime == PhaseRegime::case_i)
      rep.d_alpha = d;
    else
      rep.d_alpha_prime = d;
  }
  rep.passed = std::all_of(rep.clauses.begin(), rep.clauses.end(),
                           [](const ClauseResult& c) { return c.diagnostic || c.passed(); });
  return rep;
}

double vdc_constant(int k) {
  if (k < 1 || k > 30) fail(Errc::invalid_argument, "van der Corput: k must be in 1..30");
  return 5.0 * std::ldexp(1.0, k - 1) - 2;
}

VdcReport van_der_corput_check(const PhaseFn& phase, const AmplitudeFn& amplitude, double a, double b, int k,
                               double lambda_scale, int grid_n) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) fail(Errc::invalid_argument, "van der Corput: need a < b");
  if (grid_n < 2) fail(Errc::invalid_argument, "van der Corput: grid_n must be at least 2");
  VdcReport rep;
  rep.k = k;
  rep.a = a;
  rep.b = b;
  rep.c_k = vdc_constant(k);
  double h = (b - a) / grid_n;

  double mn = inf, lo_sign = inf, hi_sign = -inf, mono_lo = inf, mono_hi = -inf;
  std::vector<double> slope(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    double r = a + h * (i + 0.5);
    double dk = phase(r, k);
    if (!std::isfinite(dk)) fail(Errc::domain, "van der Corput: phase derivative not finite on the grid");
    mn = std::min(mn, std::abs(dk));
    lo_sign = std::min(lo_sign, dk);
    hi_sign = std::max(hi_sign, dk);
    if (k == 1) {
      double d2 = phase(r, 2);
      mono_lo = std::min(mono_lo, d2);
      mono_hi = std::max(mono_hi, d2);
    }
    slope[i] = std::abs(k == 1 ? dk : phase(r, 1));
  }
  if (!(mn > 0) || (lo_sign < 0 && hi_sign > 0))
    fail(Errc::domain, "van der Corput: the k-th derivative vanishes or changes sign on the grid");
  if (k == 1 && mono_lo < 0 && mono_hi > 0)
    fail(Errc::domain, "van der Corput: first derivative is not monotone on the grid");
  if (lambda_scale > 0) {
    if (mn < lambda_scale) fail(Errc::domain, "van der Corput: |phase^(k)| falls below the supplied scale");
    rep.lambda = lambda_scale;
  } else {
    rep.lambda = mn;
  }

  using boost::math::quadrature::gauss;
  std::complex<double> fine = 0, coarse = 0;
  auto f = [&](double r) { return std::polar(amplitude(r), phase(r, 0)); };
  for (int i = 0; i < grid_n; ++i) {
    double x0 = a + h * i;
    // 20 nodes per quarter period, with a factor 2 margin on the local slope.
    int sub = std::max(1, static_cast<int>(std::ceil(2 * slope[i] * h / (std::numbers::pi / 2))));
    double hs = h / sub;
    for (int j = 0; j < sub; ++j) {
      double u0 = x0 + hs * j, u1 = (j + 1 == sub) ? x0 + h : u0 + hs;
      fine += gauss<double, 20>::integrate(f, u0, u1);
      coarse += gauss<double, 10>::integrate(f, u0, u1);
      ++rep.panels;
    }
  }
  rep.lhs = std::abs(fine);
  rep.quad_error = std::abs(fine - coarse);

  double fa = amplitude(a), fb = amplitude(b);
  if (!std::isfinite(fa) || !std::isfinite(fb)) fail(Errc::domain, "van der Corput: amplitude not finite at the ends");
  int tv_n = 4 * grid_n;
  double tv = 0, prev = fa;
  for (int i = 1; i <= tv_n; ++i) {
    double cur = i == tv_n ? fb : amplitude(a + (b - a) * i / tv_n);
    tv += std::abs(cur - prev);
    prev = cur;
  }
  rep.amplitude_term = std::min(std::abs(fa), std::abs(fb)) + tv;
  rep.rhs = rep.c_k * std::pow(rep.lambda, -1.0 / k) * rep.amplitude_term;
  rep.holds = rep.lhs <= rep.rhs;
  return rep;
}

VdcReport van_der_corput_check(const PhaseSpec& spec, const AmplitudeFn& amplitude, double a, double b, int k,
                               double lambda_scale, int grid_n) {
  check_spec(spec);
  if (k < 1 || k > 3) fail(Errc::invalid_argument, "van der Corput: closed-form phases support k = 1..3");
  if (!(a > 0 && b < 1)) fail(Errc::domain, "van der Corput: interval must lie inside (0,1)");
  return van_der_corput_check([spec](double r, int o) { return phase_eval(spec, r, o); }, amplitude, a, b, k,
                              lambda_scale, grid_n);
}

}  // namespace nilcount
