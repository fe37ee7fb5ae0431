#include "nds/phase_spaces.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "nds/errors.hpp"

namespace nds {

std::string_view to_string(Space s) {
  switch (s) {
    case Space::Interval: return "interval";
    case Space::Circle: return "circle";
    case Space::Cantor: return "cantor";
  }
  return "?";
}

Space parse_space(std::string_view s) {
  if (s == "interval") return Space::Interval;
  if (s == "circle") return Space::Circle;
  if (s == "cantor") return Space::Cantor;
  throw UsageError("unknown space '" + std::string(s) + "'");
}

IntervalPoint::IntervalPoint(Rational v) : value(std::move(v)) {
  if (value < 0 || value > 1) throw DomainError("interval point outside [0,1]: " + value.str());
}

CantorWord::CantorWord(std::uint64_t packed, int length) : bits_(packed), length_(length) {
  if (length < 1 || length > kMaxLength) {
    throw DomainError("cantor word length must be in [1, 64], got " + std::to_string(length));
  }
  if (length < 64) bits_ &= (std::uint64_t{1} << length) - 1;
}

CantorWord CantorWord::parse(std::string_view symbols) {
  if (symbols.empty() || symbols.size() > kMaxLength) {
    throw DomainError("cantor word must have 1..64 symbols");
  }
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] == '1') {
      bits |= std::uint64_t{1} << i;
    } else if (symbols[i] != '0') {
      throw DomainError("cantor word symbols must be 0 or 1");
    }
  }
  return CantorWord(bits, static_cast<int>(symbols.size()));
}

int CantorWord::symbol(int i) const {
  if (i < 1 || i > length_) throw DomainError("cantor symbol index out of range");
  return static_cast<int>((bits_ >> (i - 1)) & 1U);
}

std::string CantorWord::str() const {
  std::string s(static_cast<std::size_t>(length_), '0');
  for (int i = 0; i < length_; ++i) {
    if ((bits_ >> i) & 1U) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

Space space_of(const Point& p) {
  switch (p.index()) {
    case 0: return Space::Interval;
    case 1: return Space::Circle;
    default: return Space::Cantor;
  }
}

std::string to_string(const Point& p) {
  if (const auto* ip = std::get_if<IntervalPoint>(&p)) return ip->value.str();
  if (const auto* cp = std::get_if<CirclePoint>(&p)) return cp->fraction.str();
  return std::get<CantorWord>(p).str();
}

RationalInterval::RationalInterval(Rational a, Rational b) : lo(std::move(a)), hi(std::move(b)) {
  if (hi < lo) throw DomainError("interval with lo > hi: [" + lo.str() + ", " + hi.str() + "]");
}

std::string RationalInterval::str() const { return "[" + lo.str() + ", " + hi.str() + "]"; }

RationalInterval unit_subinterval(Rational lo, Rational hi) {
  if (lo < 0 || hi > 1) throw DomainError("interval not inside [0,1]");
  return RationalInterval(std::move(lo), std::move(hi));
}

bool open_sets_meet(const RationalInterval& image, const RationalInterval& target) {
  if (target.degenerate()) return false;
  if (image.degenerate()) return target.lo < image.lo && image.lo < target.hi;
  return max(image.lo, target.lo) < min(image.hi, target.hi);
}

IntervalUnion::IntervalUnion(std::vector<RationalInterval> parts) : parts_(std::move(parts)) {
  normalize();
}

void IntervalUnion::add(const RationalInterval& iv) {
  parts_.push_back(iv);
  normalize();
}

void IntervalUnion::normalize() {
  if (parts_.size() < 2) return;
  std::sort(parts_.begin(), parts_.end(), [](const RationalInterval& a, const RationalInterval& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });
  std::vector<RationalInterval> merged;
  merged.reserve(parts_.size());
  for (auto& iv : parts_) {
    if (!merged.empty() && iv.lo <= merged.back().hi) {
      if (merged.back().hi < iv.hi) merged.back().hi = iv.hi;
    } else {
      merged.push_back(std::move(iv));
    }
  }
  parts_ = std::move(merged);
}

std::vector<Rational> IntervalUnion::points() const {
  std::vector<Rational> out;
  for (const auto& iv : parts_) {
    if (iv.degenerate()) out.push_back(iv.lo);
  }
  return out;
}

std::vector<RationalInterval> IntervalUnion::intervals() const {
  std::vector<RationalInterval> out;
  for (const auto& iv : parts_) {
    if (!iv.degenerate()) out.push_back(iv);
  }
  return out;
}

Rational IntervalUnion::measure() const {
  Rational total = 0;
  for (const auto& iv : parts_) total += iv.length();
  return total;
}

bool IntervalUnion::contains(const Rational& x) const {
  return std::any_of(parts_.begin(), parts_.end(),
                     [&](const RationalInterval& iv) { return iv.contains(x); });
}

bool IntervalUnion::subset_of(const IntervalUnion& outer) const {
  return std::all_of(parts_.begin(), parts_.end(), [&](const RationalInterval& iv) {
    return std::any_of(outer.parts_.begin(), outer.parts_.end(),
                       [&](const RationalInterval& o) { return o.contains(iv); });
  });
}

std::string IntervalUnion::str() const {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) os << ", ";
    if (parts_[i].degenerate()) {
      os << parts_[i].lo.str();
    } else {
      os << parts_[i].str();
    }
  }
  os << "}";
  return os.str();
}

Rational interval_metric(const Rational& x, const Rational& y) { return (x - y).abs(); }

Rational circle_metric(const Rational& x, const Rational& y) {
  const Rational d = (x - y).frac();
  const Rational other = Rational(1) - d;
  return min(d, other);
}

int first_difference(const CantorWord& x, const CantorWord& y) {
  const std::uint64_t diff = x.packed() ^ y.packed();
  if (diff == 0) return 0;
  return std::countr_zero(diff) + 1;
}

Rational cantor_metric(const CantorWord& x, const CantorWord& y) {
  if (x.length() != y.length()) throw UsageError("cantor words of different lengths");
  const int n = first_difference(x, y);
  return n == 0 ? Rational(0) : Rational(1, n);
}

Rational metric(const Point& x, const Point& y) {
  if (x.index() != y.index()) {
    throw UsageError(std::string("metric between points of different spaces: ") +
                     std::string(to_string(space_of(x))) + " vs " +
                     std::string(to_string(space_of(y))));
  }
  switch (x.index()) {
    case 0: return interval_metric(std::get<IntervalPoint>(x).value, std::get<IntervalPoint>(y).value);
    case 1: return circle_metric(std::get<CirclePoint>(x).fraction, std::get<CirclePoint>(y).fraction);
    default: return cantor_metric(std::get<CantorWord>(x), std::get<CantorWord>(y));
  }
}

bool ball_contains(const Point& center, const Rational& radius, const Point& x) {
  if (radius <= 0) throw DomainError("ball radius must be positive");
  return metric(center, x) < radius;
}

long grid_size(const Rational& eps) {
  if (eps <= 0) throw DomainError("eps must be positive, got " + eps.str());
  if (eps > 1) throw DomainError("eps must be at most 1, got " + eps.str());
  const Rational inv = Rational(1) / eps;
  mpz_class m = inv.floor();
  if (!inv.is_integer()) m += 1;
  if (!m.fits_slong_p() || m > 100'000'000) throw DomainError("eps too small for a finite grid");
  return m.get_si();
}

std::vector<Point> epsilon_net(Space space, const Rational& eps, int cantor_length) {
  const long m = grid_size(eps);
  std::vector<Point> net;
  switch (space) {
    case Space::Interval:
      net.reserve(static_cast<std::size_t>(m) + 1);
      for (long j = 0; j <= m; ++j) net.emplace_back(IntervalPoint(Rational(j, m)));
      break;
    case Space::Circle:
      net.reserve(static_cast<std::size_t>(m));
      for (long j = 0; j < m; ++j) net.emplace_back(CirclePoint(Rational(j, m)));
      break;
    case Space::Cantor: {
      // Agreeing on the first k symbols gives rho <= 1/(k+1) < 1/k <= eps.
      const long k = std::min<long>(m, cantor_length);
      if (k > 24) throw DomainError("cantor net prefix length " + std::to_string(k) + " too large");
      const std::uint64_t count = std::uint64_t{1} << k;
      net.reserve(count);
      for (std::uint64_t prefix = 0; prefix < count; ++prefix) {
        net.emplace_back(CantorWord(prefix, cantor_length));
      }
      break;
    }
  }
  return net;
}

std::vector<RationalInterval> interval_grid(const Rational& eps) {
  const long m = grid_size(eps);
  std::vector<RationalInterval> grid;
  grid.reserve(static_cast<std::size_t>(m));
  for (long i = 0; i < m; ++i) grid.emplace_back(Rational(i, m), Rational(i + 1, m));
  return grid;
}

}  // namespace nds
