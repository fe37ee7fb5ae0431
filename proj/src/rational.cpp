#include "nds/rational.hpp"

#include <cctype>
#include <cstdio>
#include <ostream>
#include <vector>

#include "nds/errors.hpp"

namespace nds {

Rational::Rational(long num, long den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational::Rational(mpq_class value) : v_(std::move(value)) { v_.canonicalize(); }

namespace {

bool is_integer_text(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

mpz_class parse_integer(std::string_view s) {
  std::string t(s);
  if (!t.empty() && t[0] == '+') t.erase(0, 1);
  return mpz_class(t, 10);
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    if (!is_integer_text(text)) {
      throw UsageError("not an exact rational: '" + std::string(text) + "'");
    }
    return Rational(parse_integer(text), mpz_class(1));
  }
  const auto num = text.substr(0, slash);
  const auto den = text.substr(slash + 1);
  if (!is_integer_text(num) || !is_integer_text(den) || den[0] == '-' || den[0] == '+') {
    throw UsageError("not an exact rational: '" + std::string(text) + "'");
  }
  mpz_class d = parse_integer(den);
  if (d == 0) throw DomainError("rational with zero denominator: '" + std::string(text) + "'");
  return Rational(parse_integer(num), d);
}

Rational Rational::pow2(long e) {
  mpz_class p = 1;
  const unsigned long mag = static_cast<unsigned long>(e < 0 ? -e : e);
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), mag);
  return e >= 0 ? Rational(p, mpz_class(1)) : Rational(mpz_class(1), p);
}

Rational Rational::pow(const Rational& base, unsigned long e) {
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), base.v_.get_num_mpz_t(), e);
  mpz_pow_ui(d.get_mpz_t(), base.v_.get_den_mpz_t(), e);
  return Rational(n, d);
}

std::string Rational::str() const {
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::string Rational::decimal(int significant) const {
  // Enough binary precision for the requested digits regardless of magnitude.
  const mp_bitcnt_t bits = static_cast<mp_bitcnt_t>(significant * 4 + 64);
  mpf_class f(v_, bits);
  const int len = gmp_snprintf(nullptr, 0, "%.*Fg", significant, f.get_mpf_t());
  std::vector<char> buf(static_cast<std::size_t>(len) + 1);
  gmp_snprintf(buf.data(), buf.size(), "%.*Fg", significant, f.get_mpf_t());
  return std::string(buf.data());
}

mpz_class Rational::floor() const {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
  return q;
}

Rational Rational::frac() const { return *this - Rational(floor(), mpz_class(1)); }

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw DomainError("division by zero rational");
  v_ /= o.v_;
  return *this;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace nds
