#pragma once

#include <functional>
#include <optional>

#include "nilcount/group.hpp"
#include "nilcount/norm.hpp"

namespace nilcount {

// Gamma_L = L Z^(q+m) with L = diag(L1, L2).
class LatticeSpec {
 public:
  LatticeSpec(Matrix L1, Matrix L2);
  static LatticeSpec identity(int q, int m);
  // Gamma_b on the polarized Heisenberg group: x' in b Z^d, x'' in Z^d, t in Z.
  static LatticeSpec gamma_b(const std::vector<int>& b);

  const Matrix& L1() const { return L1_; }
  const Matrix& L2() const { return L2_; }
  int q() const { return static_cast<int>(L1_.rows()); }
  int m() const { return static_cast<int>(L2_.rows()); }
  bool is_exact() const { return L1_.is_exact() && L2_.is_exact(); }
  bool is_identity() const;
  double covolume() const;

  GroupElement point(std::span<const std::int64_t> k1, std::span<const std::int64_t> k2) const;
  ExactElement exact_point(std::span<const std::int64_t> k1, std::span<const std::int64_t> k2) const;
  // Coordinates of g in the basis L, when g is a lattice point.
  std::optional<std::vector<std::int64_t>> coordinates(const ExactElement& g) const;

 private:
  Matrix L1_, L2_;
};

struct CertificateEntry {
  int l = 0, i = 0, j = 0;
  double value = 0;
  std::optional<Rational> exact_value;
  bool integral = false;
};

struct SubgroupCertificate {
  bool is_subgroup = false;
  bool exact = true;
  std::vector<CertificateEntry> entries;
  std::optional<size_t> first_failure;
};

// Checks 1/2 L2^-1 (<U^(l) L1 e_i, L1 e_j>)_l in Z^m for every basis pair.
SubgroupCertificate is_subgroup(const GroupSpec& g, const LatticeSpec& L, double tol = 1e-9);

struct DeltaRational {
  enum class Verdict { found, none, unknown };
  Verdict verdict = Verdict::unknown;
  std::optional<Rational> c;
  std::optional<Rational> c_min;
  std::string reason;
};

// Least c > 0 with (c A1, c^2 A2) integral, searched over c_min N*.
DeltaRational delta_rational(const Matrix& A1, const Matrix& A2);

struct ReducedSpec {
  Matrix Mt1, Mt2;
  bool is_exact() const { return Mt1.is_exact() && Mt2.is_exact(); }
  double abs_det() const { return std::abs(Mt1.determinant() * Mt2.determinant()); }
};

ReducedSpec reduce(const NormParams& p, const LatticeSpec& L);

// Gamma_L(T) = {(L1 j', L2 j'') : |L1 j'| <= T, |L2 j''| <= T^2}.
class TruncatedLattice {
 public:
  TruncatedLattice(LatticeSpec L, const Rational& T);

  std::int64_t size() const;
  void for_each(const std::function<void(std::span<const std::int64_t> k1, std::span<const std::int64_t> k2)>& fn) const;
  std::vector<GroupElement> points() const;
  const LatticeSpec& lattice() const { return L_; }
  const Rational& height() const { return T_; }

 private:
  LatticeSpec L_;
  Rational T_;
};

}  // namespace nilcount
