#include "nds/errors.hpp"
#include "nds/kernels.hpp"

namespace nds::kernels {

std::vector<Divergence> interval_divergence(const std::vector<Map>& fibers, bool fiber_power,
                                            const Map& limit, const std::vector<Rational>& samples,
                                            int k_from, int K, const std::optional<Rational>& stop_at,
                                            Exec exec) {
  if (fibers.empty()) throw UsageError("divergence needs at least one fiber");
  if (!fiber_power && static_cast<int>(fibers.size()) < K) {
    throw UsageError("window divergence needs K fibers");
  }
  std::vector<Divergence> out(samples.size());
  parallel_for(samples.size(), exec, [&](std::size_t i) {
    Rational g = samples[i];
    Rational f = samples[i];
    Divergence best{Rational(0), 0};
    for (int k = 1; k <= K; ++k) {
      const Map& fk = fiber_power ? fibers.front() : fibers[static_cast<std::size_t>(k - 1)];
      g = evaluate_interval(fk, g);
      f = evaluate_interval(limit, f);
      if (k < k_from) continue;
      Rational d = (g - f).abs();
      if (best.value < d) best = {std::move(d), k};
      if (stop_at && *stop_at <= best.value) break;
    }
    out[i] = std::move(best);
  });
  return out;
}

std::vector<CantorDivergence> cantor_divergence(const std::vector<std::uint64_t>& words, int L, int n,
                                                bool fiber_power, int k_from, int K, Exec exec) {
  if (L < 1 || L > 64 || n < 1) throw DomainError("cantor divergence needs 1 <= L <= 64, n >= 1");
  const AddingMachineMap full(L, std::nullopt);
  std::vector<CantorDivergence> out(words.size());
  parallel_for(words.size(), exec, [&](std::size_t i) {
    CantorWord g(words[i], L);
    CantorWord f(words[i], L);
    CantorDivergence best{Rational(0), 0, false};
    int best_index = 0;  // first differing symbol of the best pair; smaller is farther
    for (int k = 1; k <= K; ++k) {
      const int trunc = std::min(fiber_power ? n : n + k - 1, L);
      g = AddingMachineMap(L, trunc)(g);
      const auto step = full.step(f);
      f = step.word;
      best.saturated = best.saturated || step.saturated;
      if (k < k_from) continue;
      const int idx = first_difference(g, f);
      if (idx != 0 && (best_index == 0 || idx < best_index)) {
        best_index = idx;
        best.value = Rational(1, idx);
        best.k = k;
      }
    }
    out[i] = std::move(best);
  });
  return out;
}

std::vector<int> first_hits(const std::vector<Point>& net, const std::vector<Point>& entries,
                            const Rational& eps, Exec exec) {
  std::vector<int> out(net.size(), 0);
  parallel_for(net.size(), exec, [&](std::size_t i) {
    for (std::size_t j = 0; j < entries.size(); ++j) {
      if (ball_contains(net[i], eps, entries[j])) {
        out[i] = static_cast<int>(j) + 1;
        return;
      }
    }
  });
  return out;
}

}  // namespace nds::kernels
