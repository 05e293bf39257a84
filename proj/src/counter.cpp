#include "nilcount/counter.hpp"

#include <cmath>
#include <limits>
#include <thread>
#include <unordered_map>

#include "nilcount/ellipsoid.hpp"
#include "nilcount/error.hpp"
#include "parallel.hpp"

namespace nilcount {

namespace {

struct Overflow {};

// __int128 with trapping arithmetic; the predicate retries in BigInt on trap.
struct Ck {
  i128 v;
};
inline Ck operator+(Ck a, Ck b) {
  i128 r;
  if (__builtin_add_overflow(a.v, b.v, &r)) throw Overflow{};
  return {r};
}
inline Ck operator-(Ck a, Ck b) {
  i128 r;
  if (__builtin_sub_overflow(a.v, b.v, &r)) throw Overflow{};
  return {r};
}
inline Ck operator*(Ck a, Ck b) {
  i128 r;
  if (__builtin_mul_overflow(a.v, b.v, &r)) throw Overflow{};
  return {r};
}
inline bool operator<=(Ck a, Ck b) { return a.v <= b.v; }
inline bool operator>=(Ck a, Ck b) { return a.v >= b.v; }
inline Ck ck(long long v) { return {v}; }
inline BigInt big(i128 v) {
  bool neg = v < 0;
  unsigned __int128 a = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  BigInt r = BigInt(static_cast<std::uint64_t>(a >> 64));
  r <<= 64;
  r += BigInt(static_cast<std::uint64_t>(a));
  return neg ? BigInt(-r) : r;
}

bool fits(const BigInt& v) { return boost::multiprecision::abs(v) < (BigInt(1) << 100); }

i128 small(const BigInt& v) {
  bool neg = v < 0;
  BigInt a = boost::multiprecision::abs(v);
  i128 r = static_cast<i128>(static_cast<std::uint64_t>(a >> 64)) << 64;
  r += static_cast<i128>(static_cast<std::uint64_t>(a & BigInt(std::numeric_limits<std::uint64_t>::max())));
  return neg ? -r : r;
}

// A = a/DA, B = b/DB, C = R^2 = cn/cd; all scaled to integer comparisons.
template <class T>
bool predicate(int alpha, T a, T b, T DA, T DB, T cn, T cd, T four) {
  if (alpha == 2) {
    T X = cn * DA - a * cd;
    if (!(X >= T{} )) return false;
    T s = cd * DA;
    return b * (s * s) <= X * X * DB;
  }
  if (alpha == 4) {
    T c2 = cd * cd;
    return a * a * DB * c2 + b * DA * DA * c2 <= cn * cn * DA * DA * DB;
  }
  if (!(a * cd <= cn * DA)) return false;
  T s = cd * DA;
  T Z = cn * DA + a * cd;
  T X = b * s * s;
  T Y = four * a * cn * cd * DA * DB;
  T W = Z * Z * DB - X - Y;
  if (!(W >= T{})) return false;
  return four * X * Y <= W * W;
}

class ExactKernel {
 public:
  ExactKernel(const ReducedSpec& r, int alpha, const Rational& C)
      : A_(integer_gram(r.Mt1)), B_(integer_gram(r.Mt2)), alpha_(alpha), C_(C) {
    cn_ = numerator(C);
    cd_ = denominator(C);
    small_ok_ = fits(cn_) && fits(cd_) && fits(A_.scale) && fits(B_.scale);
    if (small_ok_) {
      scn_ = small(cn_);
      scd_ = small(cd_);
      sDA_ = small(A_.scale);
      sDB_ = small(B_.scale);
    }
    Cd_ = to_double(C);
    DAd_ = to_double(Rational(A_.scale));
    DBd_ = to_double(Rational(B_.scale));
  }

  bool test(i128 a, i128 b) const {
    if (small_ok_) {
      try {
        return predicate<Ck>(alpha_, {a}, {b}, {sDA_}, {sDB_}, {scn_}, {scd_}, ck(4));
      } catch (const Overflow&) {
      }
    }
    return predicate<BigInt>(alpha_, big(a), big(b), A_.scale, B_.scale, cn_, cd_, BigInt(4));
  }

  // Largest a with test(a, b), or -1.
  i128 a_max(i128 b) const {
    if (!test(0, b)) return -1;
    double B = static_cast<double>(b) / DBd_;
    double guess;
    if (alpha_ == 2)
      guess = Cd_ - std::sqrt(B);
    else if (alpha_ == 4)
      guess = std::sqrt(std::max(Cd_ * Cd_ - B, 0.0));
    else {
      double s = std::sqrt(Cd_) - std::pow(B, 0.25);
      guess = s * s;
    }
    double g = std::floor(std::max(guess, 0.0) * DAd_);
    i128 a = g > 1e30 ? static_cast<i128>(1e30) : static_cast<i128>(g);
    if (a < 0) a = 0;
    // Walk to the exact threshold; the guess is within a few units.
    i128 step = 1;
    if (test(a, b)) {
      while (test(a + step, b)) {
        a += step;
        step *= 2;
      }
      for (step /= 2; step >= 1; step /= 2)
        if (test(a + step, b)) a += step;
    } else {
      i128 lo = 0;
      while (a - lo > 1) {
        i128 mid = lo + (a - lo) / 2;
        (test(mid, b) ? lo : a) = mid;
      }
      a = lo;
    }
    return a;
  }

  i128 outer_bound() const {
    // |Mt2 k''|^2 <= C^2  <=>  b <= floor(C^2 DB)
    return small(floor_of(C_ * C_ * Rational(B_.scale)));
  }

  const IntegerEllipsoid& inner() const { return A_.form; }
  const IntegerEllipsoid& outer() const { return B_.form; }

 private:
  ScaledGram A_, B_;
  int alpha_;
  Rational C_;
  BigInt cn_, cd_;
  bool small_ok_ = false;
  i128 scn_ = 0, scd_ = 0, sDA_ = 0, sDB_ = 0;
  double Cd_, DAd_, DBd_;
};

using detail::resolve_workers;

template <class Job>
std::int64_t parallel_sum(int workers, Job&& job) {
  workers = resolve_workers(workers);
  if (workers == 1) return job(0, 1);
  std::vector<std::int64_t> part(workers, 0);
  std::vector<std::exception_ptr> err(workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        part[w] = job(w, workers);
      } catch (...) {
        err[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
  std::int64_t s = 0;
  for (auto v : part) s += v;
  return s;
}

std::int64_t exact_count(const ReducedSpec& r, int alpha, const Rational& C, int workers) {
  ExactKernel K(r, alpha, C);
  i128 bmax = K.outer_bound();
  return parallel_sum(workers, [&](int w, int W) {
    std::unordered_map<std::int64_t, std::int64_t> memo;
    std::int64_t total = 0, idx = 0;
    K.outer().for_each(bmax, [&](std::span<const std::int64_t> k2) {
      if (idx++ % W != w) return;
      i128 am = K.a_max(K.outer().value(k2));
      if (am < 0) return;
      if (am > static_cast<i128>(std::numeric_limits<std::int64_t>::max()))
        fail(Errc::overflow, "fiber bound exceeds 64 bits");
      auto key = static_cast<std::int64_t>(am);
      auto it = memo.find(key);
      if (it == memo.end()) it = memo.emplace(key, K.inner().count(am)).first;
      total += it->second;
    });
    return total;
  });
}

std::int64_t real_count(const ReducedSpec& r, double alpha, double R, int workers) {
  RealEllipsoid A = real_gram(r.Mt1), B = real_gram(r.Mt2);
  double Ra = std::pow(R, alpha);
  return parallel_sum(workers, [&](int w, int W) {
    std::unordered_map<double, std::int64_t> memo;
    std::int64_t total = 0, idx = 0;
    B.for_each(R * R * R * R, [&](std::span<const std::int64_t> k2) {
      if (idx++ % W != w) return;
      double b = B.value(k2);
      auto it = memo.find(b);
      if (it == memo.end()) {
        double rest = Ra - std::pow(b, alpha / 4);
        std::int64_t c = rest < 0 ? 0 : A.count(std::pow(rest, 2 / alpha));
        it = memo.emplace(b, c).first;
      }
      total += it->second;
    });
    return total;
  });
}

void guard_size(const ReducedSpec& r, double alpha, double R) {
  int q = static_cast<int>(r.Mt1.rows()), m = static_cast<int>(r.Mt2.rows());
  double est = unit_ball_volume(alpha, q, m) * std::pow(R + 2, q + 2 * m) / r.abs_det();
  if (!(est < std::ldexp(1.0, 62))) fail(Errc::overflow, "predicted count exceeds 2^62");
}

}  // namespace

void validate_problem(const Problem& p) {
  if (p.group.q() != p.norm.q() || p.group.m() != p.norm.m())
    fail(Errc::dimension_mismatch, "norm dimensions do not match the group");
  if (p.group.q() != p.lattice.q() || p.group.m() != p.lattice.m())
    fail(Errc::dimension_mismatch, "lattice dimensions do not match the group");
}

CountResult count_ball(const ReducedSpec& r, double alpha, const Radius& R, const CounterOptions& opt) {
  if (!(R.value() > 0)) fail(Errc::domain, "radius must be positive");
  guard_size(r, alpha, R.value());
  CountResult out;
  if (r.is_exact() && exact_alpha_supported(alpha)) {
    out.count = exact_count(r, static_cast<int>(alpha), R.squared(), opt.workers);
    out.exact = true;
    return out;
  }
  double tol = opt.boundary_tolerance;
  out.count = real_count(r, alpha, R.value() * (1 + tol), opt.workers);
  if (tol > 0) out.boundary_hits = out.count - real_count(r, alpha, R.value() * (1 - tol), opt.workers);
  return out;
}

namespace {

// Integer box around A^-1 v covering {j : |A j - v| <= rho}.
std::vector<std::pair<std::int64_t, std::int64_t>> box(const Matrix& A, const std::vector<double>& v, double rho) {
  Matrix Ad = A.inexact();
  Matrix inv = Ad.inverse();
  Matrix Ginv = inv * inv.transpose();
  auto c = inv.apply(v);
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (size_t i = 0; i < c.size(); ++i) {
    double r = rho * std::sqrt(std::max(Ginv(i, i), 0.0));
    double s = 1e-7 * (1 + r + std::abs(c[i]));
    double lo = std::ceil(c[i] - r - s), hi = std::floor(c[i] + r + s);
    if (std::abs(lo) > 1e15 || std::abs(hi) > 1e15) fail(Errc::overflow, "translated ball too large");
    out.emplace_back(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi));
  }
  return out;
}

template <class F>
void for_each_in_box(const std::vector<std::pair<std::int64_t, std::int64_t>>& b, F&& fn) {
  size_t n = b.size();
  for (auto& [lo, hi] : b)
    if (lo > hi) return;
  std::vector<std::int64_t> k(n);
  for (size_t i = 0; i < n; ++i) k[i] = b[i].first;
  while (true) {
    fn(std::span<const std::int64_t>(k));
    size_t i = 0;
    while (i < n && k[i] == b[i].second) {
      k[i] = b[i].first;
      ++i;
    }
    if (i == n) return;
    ++k[i];
  }
}

CountResult centered_count(const Problem& p, const Radius& R, const ExactElement& center, double tol) {
  const auto& L = p.lattice;
  const auto& N = p.norm;
  const auto& G = p.group;
  bool exact = L.is_exact() && N.is_exact() && G.is_exact() && exact_alpha_supported(N.alpha());
  GroupElement cd = center.approx();
  ExactElement cinv = inverse(G, center);
  GroupElement cinv_d = inverse(G, cd);
  double Rv = R.value() * (exact ? 1.0 : 1 + tol);
  CountResult out;
  out.exact = exact;
  Matrix A1 = N.M1() * L.L1(), A2 = N.M2() * L.L2();
  auto bx = box(A1, N.M1().apply(cd.x), Rv);
  double Ra = std::pow(Rv, N.alpha());
  double Rlo = R.value() * (1 - tol);
  for_each_in_box(bx, [&](std::span<const std::int64_t> j1) {
    std::vector<double> jd(j1.begin(), j1.end());
    auto x = L.L1().apply(jd);
    std::vector<double> gx(x.size());
    for (size_t i = 0; i < x.size(); ++i) gx[i] = x[i] - cd.x[i];
    double a = std::sqrt(norm2(N.M1().apply(gx)));
    double rest = Ra - std::pow(a, N.alpha());
    if (rest < -1e-9 * Ra) return;
    double rho = std::pow(std::max(rest, 0.0), 2 / N.alpha()) * (1 + 1e-9) + 1e-12;
    // Centre of the admissible t-ball: c_t + 1/2 <U c_x, x - c_x>.
    auto br = G.bracket(cd.x, gx);
    std::vector<double> s(cd.t.size());
    for (size_t l = 0; l < s.size(); ++l) s[l] = cd.t[l] + 0.5 * br[l];
    auto bt = box(A2, N.M2().apply(s), rho);
    if (exact) {
      for_each_in_box(bt, [&](std::span<const std::int64_t> j2) {
        if (ball_contains(N, R, compose(G, cinv, L.exact_point(j1, j2)))) ++out.count;
      });
    } else {
      for_each_in_box(bt, [&](std::span<const std::int64_t> j2) {
        GroupElement g = compose(G, cinv_d, L.point(j1, j2));
        double n = norm(N, g);
        if (n <= Rv) {
          ++out.count;
          if (n > Rlo) ++out.boundary_hits;
        }
      });
    }
  });
  return out;
}

}  // namespace

CountResult count_ball(const Problem& p, const BallQuery& q, const CounterOptions& opt) {
  validate_problem(p);
  if (!q.center) return count_ball(p.reduced(), p.alpha(), q.radius, opt);
  if (!(q.radius.value() > 0)) fail(Errc::domain, "radius must be positive");
  if (q.center->x.size() != static_cast<size_t>(p.group.q()) || q.center->t.size() != static_cast<size_t>(p.group.m()))
    fail(Errc::dimension_mismatch, "center has the wrong shape");
  guard_size(p.reduced(), p.alpha(), q.radius.value());
  return centered_count(p, q.radius, *q.center, opt.boundary_tolerance);
}

CountResult count_shell(const Problem& p, const BallQuery& q, const Rational& delta, const CounterOptions& opt) {
  validate_problem(p);
  if (delta <= 0 || to_double(delta) >= q.radius.value())
    fail(Errc::domain, "shell width must satisfy 0 < delta < R");
  Radius hi = q.radius.exact() ? q.radius.shifted(delta) : Radius::from_double(q.radius.value() + to_double(delta));
  Radius lo = q.radius.exact() ? q.radius.shifted(-delta) : Radius::from_double(q.radius.value() - to_double(delta));
  // The shell is B_(R+d) minus the open-boundary-inclusive B_(R-d).
  auto a = count_ball(p, {hi, q.center}, opt);
  auto b = count_ball(p, {lo, q.center}, opt);
  CountResult out{a.count - b.count, a.boundary_hits + b.boundary_hits, a.exact && b.exact};
  if (q.center && opt.cross_check) {
    bool lattice_center = p.lattice.is_exact() && p.lattice.coordinates(*q.center).has_value();
    if (lattice_center && is_subgroup(p.group, p.lattice).is_subgroup) {
      auto a0 = count_ball(p.reduced(), p.alpha(), hi, opt);
      auto b0 = count_ball(p.reduced(), p.alpha(), lo, opt);
      if (a0.count - b0.count != out.count)
        fail(Errc::assertion, "translated shell count differs from the origin-centred count");
    }
  }
  return out;
}

CountRecord make_record(const Problem& p, double R, const CountResult& c) {
  CountRecord rec;
  rec.R = R;
  rec.count = c.count;
  rec.leading = ball_volume(p.norm, R) / p.lattice.covolume();
  rec.abs_error = std::abs(static_cast<double>(c.count) - rec.leading);
  rec.rel_discrepancy = rec.abs_error / rec.leading;
  rec.boundary_hits = c.boundary_hits;
  rec.exact = c.exact;
  return rec;
}

double average_shell_count(const Problem& p, const Rational& T, double R, double delta, const CounterOptions& opt) {
  validate_problem(p);
  if (!(delta > 0) || !(R > 0)) fail(Errc::domain, "average shell count needs R > 0 and delta > 0");
  TruncatedLattice TL(p.lattice, T);
  std::int64_t n = TL.size();
  if (n > opt.average_budget)
    fail(Errc::budget, "truncated lattice has " + std::to_string(n) + " points, budget is " +
                           std::to_string(opt.average_budget));
  auto pts = TL.points();
  std::vector<GroupElement> inv;
  inv.reserve(pts.size());
  for (const auto& g : pts) inv.push_back(inverse(p.group, g));
  std::int64_t hits = parallel_sum(opt.workers, [&](int w, int W) {
    std::int64_t h = 0;
    for (size_t i = w; i < pts.size(); i += W)
      for (size_t j = 0; j < pts.size(); ++j)
        if (std::abs(norm(p.norm, compose(p.group, inv[i], pts[j])) - R) <= delta) ++h;
    return h;
  });
  return static_cast<double>(hits) / std::pow(to_double(T), p.group.homogeneous_dimension());
}

SharpnessReport sharpness_probe_alpha2(const ReducedSpec& r, int n_max, const CounterOptions& opt) {
  if (r.Mt2.rows() != 1) fail(Errc::invalid_argument, "the sharpness probe needs m = 1");
  if (!r.Mt1.is_integral() || !r.Mt2.is_integral())
    fail(Errc::invalid_argument, "the sharpness probe needs an integral reduced matrix; rescale with delta_rational");
  if (n_max < 1) fail(Errc::invalid_argument, "n_max must be positive");
  SharpnessReport rep;
  rep.n_max = n_max;
  int q = static_cast<int>(r.Mt1.rows());
  double vol1 = unit_ball_volume(2.0, q, 1) / r.abs_det();
  double Q = q + 2;
  for (int N = 1; N <= n_max; ++N) {
    SharpnessRow row;
    row.N = N;
    row.count = count_ball(r, 2.0, Radius::sqrt_of(Rational(N)), opt).count;
    row.count_shifted = count_ball(r, 2.0, Radius::sqrt_of(Rational(2 * N + 1, 2)), opt).count;
    row.volume_jump = vol1 * (std::pow(N + 0.5, Q / 2) - std::pow(N, Q / 2));
    if (row.count == row.count_shifted)
      ++rep.verified;
    else if (!rep.first_failure)
      rep.first_failure = N;
    rep.rows.push_back(row);
  }
  return rep;
}

std::optional<ReducedSpec> integral_rescaling(const ReducedSpec& r) {
  auto d = delta_rational(r.Mt1, r.Mt2);
  if (d.verdict != DeltaRational::Verdict::found) return std::nullopt;
  return ReducedSpec{r.Mt1.scaled(*d.c), r.Mt2.scaled(*d.c * *d.c)};
}

}  // namespace nilcount
