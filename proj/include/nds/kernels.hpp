#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nds/exec.hpp"
#include "nds/map.hpp"

namespace nds::kernels {

/// Largest separation of two exact orbits started at one point.
struct Divergence {
  Rational value;  // max over k of d(g_k(x), f^k(x))
  int k = 0;       // first k attaining it (0 when value is 0)
};

/// For each sample x: max over k_from <= k <= K of |g_k(x) - f^k(x)| where g_k
/// applies fibers[0], ..., fibers[k-1] (window) or fibers[0] k times (fiber
/// power). A sample stops early once its value reaches `stop_at`.
std::vector<Divergence> interval_divergence(const std::vector<Map>& fibers, bool fiber_power,
                                            const Map& limit, const std::vector<Rational>& samples,
                                            int k_from, int K, const std::optional<Rational>& stop_at,
                                            Exec exec);

/// Cantor analogue on packed words: max over k_from <= k <= K of rho between
/// (f_n)^k(x) (or the window f_n^k(x)) and f^k(x), f the full odometer on L symbols. `saturated` is set
/// when some f^k(x) dropped a carry.
struct CantorDivergence {
  Rational value;
  int k = 0;
  bool saturated = false;
};
std::vector<CantorDivergence> cantor_divergence(const std::vector<std::uint64_t>& words, int L, int n,
                                                bool fiber_power, int k_from, int K, Exec exec);

/// For each net point, the first index (1-based) of `entries` strictly within
/// eps of it, or 0 if none.
std::vector<int> first_hits(const std::vector<Point>& net, const std::vector<Point>& entries,
                            const Rational& eps, Exec exec);

}  // namespace nds::kernels
