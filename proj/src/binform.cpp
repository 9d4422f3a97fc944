#include "p1pairs/binform.hpp"

#include <sstream>
#include <stdexcept>

namespace p1pairs {

BinForm::BinForm(int degree, std::vector<Rat> coeffs) : zero_(false), degree_(degree), coeffs_(std::move(coeffs)) {
  if (degree < 0) throw std::invalid_argument("BinForm: negative degree");
  if (coeffs_.size() != static_cast<std::size_t>(degree) + 1)
    throw std::invalid_argument("BinForm: coefficient count must be degree + 1");
  normalize();
}

void BinForm::normalize() {
  if (zero_) return;
  for (const auto& c : coeffs_)
    if (!c.is_zero()) return;
  zero_ = true;
  coeffs_.clear();
}

BinForm BinForm::constant(const Rat& c) { return BinForm(0, {c}); }

BinForm BinForm::monomial(int d, int i, const Rat& c) {
  if (i < 0 || i > d) throw std::out_of_range("BinForm::monomial: index out of range");
  std::vector<Rat> v(static_cast<std::size_t>(d) + 1);
  v[static_cast<std::size_t>(i)] = c;
  return BinForm(d, std::move(v));
}

BinForm BinForm::zero_of_degree(int d) {
  BinForm z;
  z.degree_ = d;
  return z;
}

QVec BinForm::vector() const {
  if (degree_ < 0) return QVec(0);
  QVec v = QVec::Zero(degree_ + 1);
  if (!zero_)
    for (int i = 0; i <= degree_; ++i) v(i) = coeffs_[static_cast<std::size_t>(i)];
  return v;
}

BinForm BinForm::from_vector(int d, const QVec& v) {
  if (d < 0) return zero_of_degree(d);
  if (v.size() != d + 1) throw std::invalid_argument("BinForm::from_vector: size mismatch");
  std::vector<Rat> c(v.data(), v.data() + v.size());
  BinForm f(d, std::move(c));
  if (f.is_zero()) return zero_of_degree(d);
  return f;
}

int BinForm::z1_valuation() const {
  if (zero_) throw std::domain_error("z1_valuation of zero form");
  int k = 0;
  while (coeffs_[static_cast<std::size_t>(k)].is_zero()) ++k;
  return k;
}

int BinForm::z0_valuation() const {
  if (zero_) throw std::domain_error("z0_valuation of zero form");
  int k = 0;
  while (coeffs_[static_cast<std::size_t>(degree_ - k)].is_zero()) ++k;
  return k;
}

bool operator==(const BinForm& a, const BinForm& b) {
  if (a.zero_ || b.zero_) return a.zero_ && b.zero_;
  return a.degree_ == b.degree_ && a.coeffs_ == b.coeffs_;
}

std::string BinForm::str() const {
  if (zero_) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i <= degree_; ++i) {
    const Rat& c = coeffs_[static_cast<std::size_t>(i)];
    if (c.is_zero()) continue;
    if (!first) os << (c.sign() > 0 ? " + " : " - ");
    else if (c.sign() < 0) os << "-";
    first = false;
    const Rat a = abs(c);
    const int e0 = degree_ - i, e1 = i;
    const bool unit = a == Rat(1);
    if (!unit || (e0 == 0 && e1 == 0)) os << a;
    if (e0 > 0) os << (unit ? "" : "*") << "z0" << (e0 > 1 ? "^" + std::to_string(e0) : "");
    if (e1 > 0) os << ((e0 > 0 || !unit) ? "*" : "") << "z1" << (e1 > 1 ? "^" + std::to_string(e1) : "");
  }
  return os.str();
}

BinForm mul(const BinForm& f, const BinForm& g) {
  if (f.is_zero() || g.is_zero()) return BinForm::zero_of_degree(f.degree() + g.degree());
  const int d = f.degree() + g.degree();
  std::vector<Rat> c(static_cast<std::size_t>(d) + 1);
  for (int i = 0; i <= f.degree(); ++i) {
    if (f.coeff(i).is_zero()) continue;
    for (int j = 0; j <= g.degree(); ++j) c[static_cast<std::size_t>(i + j)] += f.coeff(i) * g.coeff(j);
  }
  return BinForm(d, std::move(c));
}

BinForm add(const BinForm& f, const BinForm& g) {
  if (f.is_zero()) return g.is_zero() ? BinForm::zero_of_degree(std::max(f.degree(), g.degree())) : g;
  if (g.is_zero()) return f;
  if (f.degree() != g.degree()) throw std::invalid_argument("BinForm add: degree mismatch");
  std::vector<Rat> c = f.coeffs();
  for (int i = 0; i <= g.degree(); ++i) c[static_cast<std::size_t>(i)] += g.coeff(i);
  BinForm out(f.degree(), std::move(c));
  if (out.is_zero()) return BinForm::zero_of_degree(f.degree());
  return out;
}

BinForm scale(const BinForm& f, const Rat& c) {
  if (f.is_zero() || c.is_zero()) return BinForm::zero_of_degree(f.degree());
  std::vector<Rat> v = f.coeffs();
  for (auto& x : v) x *= c;
  return BinForm(f.degree(), std::move(v));
}

BinForm operator*(const BinForm& f, const BinForm& g) { return mul(f, g); }
BinForm operator+(const BinForm& f, const BinForm& g) { return add(f, g); }
BinForm operator-(const BinForm& f) { return scale(f, Rat(-1)); }
BinForm operator-(const BinForm& f, const BinForm& g) { return add(f, -g); }

std::optional<BinForm> divide_exact(const BinForm& f, const BinForm& g) {
  if (g.is_zero()) throw std::domain_error("divide_exact: division by zero form");
  if (f.is_zero()) return BinForm::zero_of_degree(f.degree() - g.degree());
  const int e = f.degree() - g.degree();
  if (e < 0) return std::nullopt;
  const int i0 = g.z1_valuation();
  std::vector<Rat> h(static_cast<std::size_t>(e) + 1);
  for (int j = 0; j <= e; ++j) {
    Rat acc = (j + i0 <= f.degree()) ? f.coeff(j + i0) : Rat(0);
    for (int i = i0 + 1; i <= g.degree(); ++i) {
      const int k = j + i0 - i;
      if (k < 0) break;
      acc -= g.coeff(i) * h[static_cast<std::size_t>(k)];
    }
    h[static_cast<std::size_t>(j)] = acc / g.coeff(i0);
  }
  BinForm q(e, std::move(h));
  if (mul(q, g) != f) return std::nullopt;
  return q;
}

BinForm monic(const BinForm& f) {
  if (f.is_zero()) return f;
  return scale(f, inverse(f.coeff(f.z1_valuation())));
}

namespace {

// Univariate polynomials, index = exponent.
using Poly = std::vector<Rat>;

void trim(Poly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

Poly poly_mod(Poly a, const Poly& b) {
  trim(a);
  const std::size_t db = b.size() - 1;
  while (a.size() >= b.size()) {
    const Rat f = a.back() / b.back();
    const std::size_t shift = a.size() - 1 - db;
    for (std::size_t i = 0; i <= db; ++i) a[shift + i] -= f * b[i];
    trim(a);
  }
  return a;
}

}  // namespace

BinForm gcd(const BinForm& f, const BinForm& g) {
  if (f.is_zero() && g.is_zero()) throw std::domain_error("gcd of two zero forms");
  if (f.is_zero()) return monic(g);
  if (g.is_zero()) return monic(f);
  const int kf = f.z1_valuation(), kg = g.z1_valuation();
  const int k = std::min(kf, kg);
  // f = z1^kf * f', and f'(z0, 1) has degree deg f' in z0.
  auto dehom = [](const BinForm& h, int v) {
    Poly p(static_cast<std::size_t>(h.degree() - v) + 1);
    for (int i = v; i <= h.degree(); ++i) p[static_cast<std::size_t>(h.degree() - i)] = h.coeff(i);
    return p;
  };
  Poly a = dehom(f, kf), b = dehom(g, kg);
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  const int e = static_cast<int>(a.size()) - 1;
  std::vector<Rat> c(static_cast<std::size_t>(e + k) + 1);
  for (int p = 0; p <= e; ++p) c[static_cast<std::size_t>(e - p + k)] = a[static_cast<std::size_t>(p)];
  return monic(BinForm(e + k, std::move(c)));
}

BinForm gcd(const std::vector<BinForm>& forms) {
  BinForm acc;
  for (const auto& f : forms) {
    if (f.is_zero()) continue;
    acc = acc.is_zero() ? monic(f) : gcd(acc, f);
  }
  if (acc.is_zero()) throw std::domain_error("gcd of zero forms");
  return acc;
}

QMat mult_map(const BinForm& f, int d) {
  if (f.is_zero()) throw std::domain_error("mult_map: zero form");
  if (d < 0) return QMat(wdim(d + f.degree()), 0);
  const int e = f.degree();
  QMat m = QMat::Zero(d + e + 1, d + 1);
  for (int j = 0; j <= d; ++j)
    for (int i = 0; i <= e; ++i) m(i + j, j) = f.coeff(i);
  return m;
}

Rat eval(const BinForm& f, const std::pair<Rat, Rat>& p) {
  if (f.is_zero()) return Rat(0);
  Rat acc(0);
  const int d = f.degree();
  for (int i = 0; i <= d; ++i) {
    if (f.coeff(i).is_zero()) continue;
    Rat term = f.coeff(i);
    for (int k = 0; k < d - i; ++k) term *= p.first;
    for (int k = 0; k < i; ++k) term *= p.second;
    acc += term;
  }
  return acc;
}

BinForm random_form(Rng& rng, int d, std::int64_t bound) {
  std::vector<Rat> c(static_cast<std::size_t>(d) + 1);
  for (auto& x : c) x = Rat(static_cast<long>(rng.uniform(-bound, bound)));
  BinForm f(d, std::move(c));
  if (f.is_zero()) return BinForm::zero_of_degree(d);
  return f;
}

}  // namespace p1pairs
