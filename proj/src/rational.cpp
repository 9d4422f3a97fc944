#include "p1pairs/rational.hpp"

#include <stdexcept>

namespace p1pairs {

Rat::Rat(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw std::domain_error("Rat: zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

Rat& Rat::operator/=(const Rat& o) {
  if (o.is_zero()) throw std::domain_error("Rat: division by zero");
  q_ /= o.q_;
  return *this;
}

Rat Rat::parse(std::string_view text) {
  std::string s(text);
  // Accept the unicode minus sign as well as '-'.
  const std::string uminus = "\xE2\x88\x92";
  if (s.rfind(uminus, 0) == 0) s = "-" + s.substr(uminus.size());
  if (s.empty()) throw std::invalid_argument("Rat::parse: empty string");
  const auto slash = s.find('/');
  auto parse_int = [](const std::string& t) {
    if (t.empty()) throw std::invalid_argument("Rat::parse: empty integer");
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) throw std::invalid_argument("Rat::parse: bad integer '" + t + "'");
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') throw std::invalid_argument("Rat::parse: bad integer '" + t + "'");
    return mpz_class(t[0] == '+' ? t.substr(1) : t, 10);
  };
  if (slash == std::string::npos) return Rat(parse_int(s));
  const mpz_class num = parse_int(s.substr(0, slash));
  const mpz_class den = parse_int(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("Rat::parse: zero denominator");
  return Rat(num, den);
}

std::string Rat::str() const {
  if (is_integer()) return q_.get_num().get_str();
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

Rat abs(const Rat& r) { return r.sign() < 0 ? -r : r; }

Rat inverse(const Rat& r) { return Rat(1) / r; }

}  // namespace p1pairs
