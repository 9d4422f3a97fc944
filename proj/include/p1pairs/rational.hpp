#pragma once

#include <gmpxx.h>

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace p1pairs {

/// Exact rational number. Always stored in lowest terms with a positive
/// denominator (GMP canonicalizes after every operation).
///
/// Thin value wrapper over mpq_class so that arithmetic returns plain values
/// rather than GMP expression templates, which keeps it usable as an Eigen
/// scalar.
class Rat {
 public:
  Rat() = default;
  Rat(int v) : q_(v) {}                  // NOLINT(google-explicit-constructor)
  Rat(long v) : q_(v) {}                 // NOLINT(google-explicit-constructor)
  Rat(long long v) : q_(static_cast<long>(v)) {}  // NOLINT
  Rat(const mpz_class& num) : q_(num) {}  // NOLINT
  Rat(const mpz_class& num, const mpz_class& den);
  explicit Rat(const mpq_class& q) : q_(q) { q_.canonicalize(); }

  /// Parses "p/q", "p", or "-p/q". Throws std::invalid_argument.
  static Rat parse(std::string_view text);

  const mpq_class& value() const { return q_; }
  mpz_class num() const { return q_.get_num(); }
  mpz_class den() const { return q_.get_den(); }

  bool is_zero() const { return sgn(q_) == 0; }
  bool is_integer() const { return q_.get_den() == 1; }
  int sign() const { return sgn(q_); }

  /// "p/q", or "p" when q = 1.
  std::string str() const;

  Rat& operator+=(const Rat& o) { q_ += o.q_; return *this; }
  Rat& operator-=(const Rat& o) { q_ -= o.q_; return *this; }
  Rat& operator*=(const Rat& o) { q_ *= o.q_; return *this; }
  Rat& operator/=(const Rat& o);

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }
  friend Rat operator-(const Rat& a) { return Rat(mpq_class(-a.q_)); }
  friend Rat operator+(const Rat& a) { return a; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.q_ == b.q_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return a.q_ != b.q_; }
  friend bool operator<(const Rat& a, const Rat& b) { return a.q_ < b.q_; }
  friend bool operator>(const Rat& a, const Rat& b) { return a.q_ > b.q_; }
  friend bool operator<=(const Rat& a, const Rat& b) { return a.q_ <= b.q_; }
  friend bool operator>=(const Rat& a, const Rat& b) { return a.q_ >= b.q_; }

  friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

 private:
  mpq_class q_{0};
};

Rat abs(const Rat& r);
Rat inverse(const Rat& r);

// Eigen requires these in the scalar's namespace for ADL.
inline const Rat& conj(const Rat& x) { return x; }
inline const Rat& real(const Rat& x) { return x; }
inline Rat imag(const Rat&) { return Rat(0); }
inline Rat abs2(const Rat& x) { return x * x; }

}  // namespace p1pairs

namespace Eigen {

template <>
struct NumTraits<p1pairs::Rat> : GenericNumTraits<p1pairs::Rat> {
  using Real = p1pairs::Rat;
  using NonInteger = p1pairs::Rat;
  using Nested = p1pairs::Rat;
  using Literal = p1pairs::Rat;

  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 40,
    MulCost = 60
  };

  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace p1pairs {

/// Dense exact matrix over the rationals.
using QMat = Eigen::Matrix<Rat, Eigen::Dynamic, Eigen::Dynamic>;
/// Dense exact column vector over the rationals.
using QVec = Eigen::Matrix<Rat, Eigen::Dynamic, 1>;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace p1pairs
