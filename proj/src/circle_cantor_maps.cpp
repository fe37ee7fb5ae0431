#include "nds/circle_cantor_maps.hpp"

#include "nds/errors.hpp"

namespace nds {

namespace {

// Partial quotients a_0, a_1, ... of the supported irrationals (all periodic).
int partial_quotient(const std::string& name, int j) {
  if (name == "golden") return j == 0 ? 0 : 1;  // (sqrt 5 - 1) / 2
  if (name == "silver") return j == 0 ? 0 : 2;  // sqrt 2 - 1
  throw UsageError("unknown named irrational: " + name);
}

}  // namespace

RotationMap::RotationMap(const Rational& f, Exactness e, std::string name)
    : fraction(f.frac()), exactness(e), label(std::move(name)) {}

RotationMap RotationMap::irrational(const std::string& name) {
  mpz_class bound;
  mpz_ui_pow_ui(bound.get_mpz_t(), 10, 40);
  return RotationMap(irrational_surrogate(name, bound), Exactness::IrrationalApprox, name);
}

bool is_named_irrational(const std::string& name) { return name == "golden" || name == "silver"; }

std::vector<Rational> convergents(const std::string& name, int count) {
  if (count < 0) throw DomainError("convergent count must be nonnegative");
  std::vector<Rational> out;
  mpz_class p_prev = 1, q_prev = 0, p = partial_quotient(name, 0), q = 1;
  for (int j = 0; j < count; ++j) {
    if (j > 0) {
      const int a = partial_quotient(name, j);
      mpz_class p_next = a * p + p_prev;
      mpz_class q_next = a * q + q_prev;
      p_prev = p;
      q_prev = q;
      p = p_next;
      q = q_next;
    }
    out.emplace_back(p, q);
  }
  return out;
}

Rational irrational_surrogate(const std::string& name, const mpz_class& min_denominator) {
  for (int count = 8;; count *= 2) {
    for (const auto& c : convergents(name, count)) {
      if (c.denominator() > min_denominator) return c;
    }
  }
}

RotationMap then(const RotationMap& first, const RotationMap& second) {
  const bool exact = first.exact() && second.exact();
  std::string label = exact ? std::string() : (first.exact() ? second.label : first.label);
  return RotationMap(first.fraction + second.fraction,
                     exact ? Exactness::Rational : Exactness::IrrationalApprox, std::move(label));
}

RotationMap rotation_power(const RotationMap& r, long k) {
  return RotationMap(r.fraction * Rational(k), r.exactness, r.label);
}

bool rotation_has_fixed_points(const RotationMap& r) { return r.fraction.is_zero(); }

AddingMachineMap::AddingMachineMap(int length, std::optional<int> truncation)
    : word_length(length), first_n(truncation) {
  if (length < 1 || length > CantorWord::kMaxLength) {
    throw DomainError("word length must lie in [1, 64]");
  }
  if (truncation && (*truncation < 1 || *truncation > length)) {
    throw DomainError("truncation must lie in [1, word length]");
  }
}

AddingMachineMap::Step AddingMachineMap::step(const CantorWord& x) const {
  if (x.length() != word_length) throw UsageError("word length does not match the adding machine");
  const int n = active_length();
  const std::uint64_t mask = n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
  const std::uint64_t low = x.packed() & mask;
  const std::uint64_t next = (low + 1) & mask;
  // A carry out of the last symbol only loses information for the full map;
  // truncations act modulo 2^n by definition.
  const bool saturated = !first_n && low == mask;
  return {CantorWord((x.packed() & ~mask) | next, word_length), saturated};
}

}  // namespace nds
