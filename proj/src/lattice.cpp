#include "nilcount/lattice.hpp"

#include <cmath>

#include "nilcount/ellipsoid.hpp"
#include "nilcount/error.hpp"

namespace nilcount {

LatticeSpec::LatticeSpec(Matrix L1, Matrix L2) : L1_(std::move(L1)), L2_(std::move(L2)) {
  if (!L1_.square() || !L2_.square()) fail(Errc::dimension_mismatch, "L1 and L2 must be square");
  if (L1_.determinant() == 0) fail(Errc::singular, "L1 is singular");
  if (L2_.determinant() == 0) fail(Errc::singular, "L2 is singular");
}

LatticeSpec LatticeSpec::identity(int q, int m) { return LatticeSpec(Matrix::identity(q), Matrix::identity(m)); }

LatticeSpec LatticeSpec::gamma_b(const std::vector<int>& b) {
  if (b.empty()) fail(Errc::invalid_argument, "gamma_b needs d >= 1 entries");
  for (size_t j = 0; j < b.size(); ++j) {
    if (b[j] < 1) fail(Errc::invalid_argument, "gamma_b entries must be positive integers");
    if (j + 1 < b.size() && b[j + 1] % b[j] != 0) fail(Errc::invalid_argument, "gamma_b needs b_j | b_(j+1)");
  }
  std::vector<Rational> d;
  for (int v : b) d.emplace_back(v);
  for (size_t j = 0; j < b.size(); ++j) d.emplace_back(1);
  return LatticeSpec(Matrix::diagonal(d), Matrix::identity(1));
}

bool LatticeSpec::is_identity() const {
  return is_exact() && L1_ == Matrix::identity(q()) && L2_ == Matrix::identity(m());
}

double LatticeSpec::covolume() const { return std::abs(L1_.determinant() * L2_.determinant()); }

GroupElement LatticeSpec::point(std::span<const std::int64_t> k1, std::span<const std::int64_t> k2) const {
  std::vector<double> a(k1.begin(), k1.end()), b(k2.begin(), k2.end());
  return {L1_.apply(a), L2_.apply(b)};
}

ExactElement LatticeSpec::exact_point(std::span<const std::int64_t> k1, std::span<const std::int64_t> k2) const {
  if (!is_exact()) fail(Errc::invalid_argument, "lattice has no exact entries");
  std::vector<Rational> a, b;
  for (auto v : k1) a.emplace_back(v);
  for (auto v : k2) b.emplace_back(v);
  return {L1_.apply_exact(a), L2_.apply_exact(b)};
}

std::optional<std::vector<std::int64_t>> LatticeSpec::coordinates(const ExactElement& g) const {
  if (!is_exact()) fail(Errc::invalid_argument, "lattice has no exact entries");
  auto a = L1_.inverse().apply_exact(g.x);
  auto b = L2_.inverse().apply_exact(g.t);
  std::vector<std::int64_t> out;
  for (const auto* v : {&a, &b})
    for (const auto& r : *v) {
      if (!is_integer(r)) return std::nullopt;
      out.push_back(numerator(r).convert_to<std::int64_t>());
    }
  return out;
}

SubgroupCertificate is_subgroup(const GroupSpec& g, const LatticeSpec& L, double tol) {
  if (g.q() != L.q() || g.m() != L.m()) fail(Errc::dimension_mismatch, "lattice and group dimensions differ");
  SubgroupCertificate cert;
  cert.exact = g.is_exact() && L.is_exact();
  int q = g.q(), m = g.m();
  if (cert.exact) {
    Matrix L2i = L.L2().inverse();
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) {
        std::vector<Rational> ei(q, Rational(0)), ej(q, Rational(0));
        ei[i] = 1;
        ej[j] = 1;
        auto v = L2i.apply_exact(g.bracket(std::span<const Rational>(L.L1().apply_exact(ei)),
                                           std::span<const Rational>(L.L1().apply_exact(ej))));
        for (int l = 0; l < m; ++l) {
          CertificateEntry e{l, i, j, 0, v[l] / 2, false};
          e.value = to_double(*e.exact_value);
          e.integral = is_integer(*e.exact_value);
          if (!e.integral && !cert.first_failure) cert.first_failure = cert.entries.size();
          cert.entries.push_back(std::move(e));
        }
      }
  } else {
    Matrix L1 = L.L1().inexact(), L2i = L.L2().inexact().inverse();
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) {
        std::vector<double> ei(q, 0.0), ej(q, 0.0);
        ei[i] = 1;
        ej[j] = 1;
        auto v = L2i.apply(g.bracket(L1.apply(ei), L1.apply(ej)));
        for (int l = 0; l < m; ++l) {
          CertificateEntry e{l, i, j, v[l] / 2, std::nullopt, false};
          e.integral = std::abs(e.value - std::round(e.value)) <= tol;
          if (!e.integral && !cert.first_failure) cert.first_failure = cert.entries.size();
          cert.entries.push_back(std::move(e));
        }
      }
  }
  cert.is_subgroup = !cert.first_failure.has_value();
  return cert;
}

DeltaRational delta_rational(const Matrix& A1, const Matrix& A2) {
  DeltaRational out;
  if (!A1.is_exact() || !A2.is_exact()) {
    out.reason = "entries are not exact rationals";
    return out;
  }
  BigInt Lc = 1;
  for (size_t i = 0; i < A1.rows(); ++i)
    for (size_t j = 0; j < A1.cols(); ++j)
      if (A1.exact(i, j) != 0) Lc = lcm(Lc, denominator(A1.exact(i, j)));
  BigInt Gc = 0;
  for (size_t i = 0; i < A1.rows(); ++i)
    for (size_t j = 0; j < A1.cols(); ++j) {
      const Rational& v = A1.exact(i, j);
      if (v != 0) Gc = gcd(Gc, boost::multiprecision::abs(numerator(v) * (Lc / denominator(v))));
    }
  if (Gc == 0) {
    out.verdict = DeltaRational::Verdict::none;
    out.reason = "A1 is zero";
    return out;
  }
  Rational cmin(Lc, Gc);
  out.c_min = cmin;
  Matrix B = A2.scaled(cmin * cmin);
  BigInt K = 1;
  for (size_t i = 0; i < B.rows(); ++i)
    for (size_t j = 0; j < B.cols(); ++j) K = lcm(K, denominator(B.exact(i, j)));
  // K | k^2 is necessary and sufficient; k = K always works.
  const BigInt cap = 10'000'000;
  for (BigInt k = 1; k <= K; ++k) {
    if (k > cap) fail(Errc::budget, "delta-rational search exceeds 10^7 candidates");
    if ((k * k) % K == 0) {
      out.verdict = DeltaRational::Verdict::found;
      out.c = cmin * Rational(k);
      return out;
    }
  }
  out.verdict = DeltaRational::Verdict::none;
  return out;
}

ReducedSpec reduce(const NormParams& p, const LatticeSpec& L) {
  if (p.q() != L.q() || p.m() != L.m()) fail(Errc::dimension_mismatch, "norm and lattice dimensions differ");
  return {p.M1() * L.L1(), p.M2() * L.L2()};
}

TruncatedLattice::TruncatedLattice(LatticeSpec L, const Rational& T) : L_(std::move(L)), T_(T) {
  if (T <= 0) fail(Errc::domain, "height T must be positive");
}

void TruncatedLattice::for_each(
    const std::function<void(std::span<const std::int64_t>, std::span<const std::int64_t>)>& fn) const {
  Rational T2 = T_ * T_;
  std::vector<std::vector<std::int64_t>> inner;
  for_each_in_ellipsoid(L_.L1(), T2, [&](std::span<const std::int64_t> k) { inner.emplace_back(k.begin(), k.end()); });
  for_each_in_ellipsoid(L_.L2(), T2 * T2, [&](std::span<const std::int64_t> k2) {
    for (const auto& k1 : inner) fn(k1, k2);
  });
}

std::int64_t TruncatedLattice::size() const {
  Rational T2 = T_ * T_;
  return count_ellipsoid(L_.L1(), T_) * count_ellipsoid(L_.L2(), T2);
}

std::vector<GroupElement> TruncatedLattice::points() const {
  std::vector<GroupElement> out;
  for_each([&](auto k1, auto k2) { out.push_back(L_.point(k1, k2)); });
  return out;
}

}  // namespace nilcount
