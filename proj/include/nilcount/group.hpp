#pragma once

#include <string>
#include <vector>

#include "nilcount/matrix.hpp"

namespace nilcount {

struct GroupElement {
  std::vector<double> x, t;
  bool operator==(const GroupElement&) const = default;
};

struct ExactElement {
  std::vector<Rational> x, t;
  GroupElement approx() const;
  bool operator==(const ExactElement&) const = default;
};

ExactElement exact_element(const GroupElement& g);

// G(q,m) = R^q x R^m with (x,t)o(x',t') = (x+x', t+t'+1/2<Ux,x'>),
// <Ux,x'>_l = <U^(l) x, x'>.
class GroupSpec {
 public:
  GroupSpec(int q, int m, std::vector<Matrix> U, std::string name = "explicit");

  int q() const { return q_; }
  int m() const { return m_; }
  int homogeneous_dimension() const { return q_ + 2 * m_; }
  const std::vector<Matrix>& U() const { return U_; }
  const std::string& name() const { return name_; }
  bool is_exact() const;

  // Bilinear form (<U^(l) x, y>)_l.
  std::vector<double> bracket(std::span<const double> x, std::span<const double> y) const;
  std::vector<Rational> bracket(std::span<const Rational> x, std::span<const Rational> y) const;

 private:
  int q_, m_;
  std::vector<Matrix> U_;
  std::string name_;
};

GroupElement identity(const GroupSpec& g);
GroupElement compose(const GroupSpec& g, const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupSpec& g, const GroupElement& a);
GroupElement dilate(const GroupSpec& g, double r, const GroupElement& a);

ExactElement exact_identity(const GroupSpec& g);
ExactElement compose(const GroupSpec& g, const ExactElement& a, const ExactElement& b);
ExactElement inverse(const GroupSpec& g, const ExactElement& a);
ExactElement dilate(const GroupSpec& g, const Rational& r, const ExactElement& a);

// c[k](i,j) = 1/2 (U^(k)_{j,i} - U^(k)_{i,j}), so [X_i, X_j] = sum_k c[k](i,j) T_k.
std::vector<Matrix> structure_constants(const GroupSpec& g);

struct HTypeReport {
  bool ok = true;
  bool exact = true;
  std::vector<std::string> violations;
};

HTypeReport validate_h_type(const std::vector<Matrix>& U, double tol = 1e-10);

namespace builtin {
GroupSpec heisenberg(int d);
GroupSpec polarized_heisenberg(int d);
GroupSpec h_type(std::vector<Matrix> U);
GroupSpec free_carnot(int q);
}  // namespace builtin

}  // namespace nilcount
