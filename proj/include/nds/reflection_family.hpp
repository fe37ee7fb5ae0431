#pragma once

#include <optional>

#include "nds/lazy_pl_map.hpp"

namespace nds {

/// Transitive PL map f with infinitely many pieces: tent-like bumps of slope
/// +-2 on [a_n, c_n), a_n = (4^{n+1} - 4) / 2^{2n+3}, accumulating at 1/2
/// (where f = 1) and mirrored bumps accumulating at 1 (where f = 0). The
/// remaining pieces join neighbouring bumps linearly.
///
/// reflection_fiber_map(m) reflects every left bump with n >= m about the
/// line y = 2 a_n, so f and f_m differ on infinitely many pieces while
/// f o f = f_m o f_m there.
LazyPLMapPtr reflection_limit_map();
LazyPLMapPtr reflection_fiber_map(int m);

/// Modified piece [a_n, c_n] of the left sequence and its midpoint b_n.
struct ReflectionPiece {
  Rational start;  // a_n
  Rational peak;   // b_n
  Rational end;    // c_n
};
ReflectionPiece reflection_piece(int n);

}  // namespace nds
