#include "itact/rng.hpp"

#include <cmath>

namespace itact {

std::size_t CounterRng::below(std::size_t n) {
  if (n <= 1) return 0;
  // rejection keeps the draw exactly uniform
  const std::uint64_t limit = max() - max() % n;
  std::uint64_t r;
  do {
    r = (*this)();
  } while (r >= limit);
  return static_cast<std::size_t>(r % n);
}

std::size_t CounterRng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform() * total;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = i;
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return last;
}

std::vector<double> CounterRng::dirichlet(std::size_t k) {
  std::vector<double> out(k);
  double sum = 0.0;
  for (double& v : out) {
    v = -std::log1p(-uniform());
    sum += v;
  }
  if (sum <= 0.0) {
    for (double& v : out) v = 1.0 / static_cast<double>(k);
    return out;
  }
  for (double& v : out) v /= sum;
  return out;
}

}  // namespace itact
