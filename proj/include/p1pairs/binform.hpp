#pragma once

#include "p1pairs/linalg.hpp"

#include <utility>
#include <vector>

namespace p1pairs {

/// Homogeneous polynomial in z0, z1. coeffs[i] multiplies z0^(d-i) z1^i.
/// The zero form carries an explicit flag; its degree is meaningless.
class BinForm {
 public:
  BinForm() = default;  // zero
  BinForm(int degree, std::vector<Rat> coeffs);

  static BinForm zero() { return BinForm(); }
  static BinForm constant(const Rat& c);
  /// z0^(d-i) z1^i.
  static BinForm monomial(int d, int i, const Rat& c = Rat(1));
  static BinForm z0() { return monomial(1, 0); }
  static BinForm z1() { return monomial(1, 1); }
  /// Zero form that still remembers a degree (used for matrix entries).
  static BinForm zero_of_degree(int d);

  bool is_zero() const { return zero_; }
  int degree() const { return degree_; }
  const std::vector<Rat>& coeffs() const { return coeffs_; }
  const Rat& coeff(int i) const { return coeffs_.at(static_cast<std::size_t>(i)); }

  /// Coefficient vector of length degree+1 (zeros for a degree-tagged zero form).
  QVec vector() const;
  static BinForm from_vector(int d, const QVec& v);

  /// Largest k with z1^k dividing f.
  int z1_valuation() const;
  int z0_valuation() const;

  friend bool operator==(const BinForm& a, const BinForm& b);
  friend bool operator!=(const BinForm& a, const BinForm& b) { return !(a == b); }

  std::string str() const;

 private:
  void normalize();

  bool zero_ = true;
  int degree_ = 0;
  std::vector<Rat> coeffs_;
};

BinForm mul(const BinForm& f, const BinForm& g);
BinForm add(const BinForm& f, const BinForm& g);
BinForm scale(const BinForm& f, const Rat& c);
BinForm operator*(const BinForm& f, const BinForm& g);
BinForm operator+(const BinForm& f, const BinForm& g);
BinForm operator-(const BinForm& f);
BinForm operator-(const BinForm& f, const BinForm& g);

/// Exact quotient f / g, or nullopt when g does not divide f.
std::optional<BinForm> divide_exact(const BinForm& f, const BinForm& g);

/// Monic (first nonzero coefficient 1) greatest common divisor.
BinForm gcd(const BinForm& f, const BinForm& g);
BinForm gcd(const std::vector<BinForm>& forms);

/// Scales so the first nonzero coefficient is 1.
BinForm monic(const BinForm& f);

/// Matrix of multiplication by f from W_d to W_{d + deg f}.
QMat mult_map(const BinForm& f, int d);

Rat eval(const BinForm& f, const std::pair<Rat, Rat>& p);

/// Random form of degree d with coefficients in [-bound, bound].
BinForm random_form(Rng& rng, int d, std::int64_t bound);

/// h^0(O(d)) = max(0, d + 1).
inline Index wdim(int d) { return d < 0 ? 0 : d + 1; }

}  // namespace p1pairs
