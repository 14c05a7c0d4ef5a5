#pragma once

// Compares analytic encoder gradients with central finite differences over
// every weight.

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include "micol/encoder.hpp"
#include "micol/training.hpp"
#include "oracles/fd_oracle.hpp"

namespace oracle {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

/// `loss` must read the weights of `p` on every call.
inline GradCheckResult grad_check(micol::EncoderParams& p, const micol::EncoderWeights& analytic,
                                  const std::function<double()>& loss, double h = 1e-4) {
  GradCheckResult r;
  auto run = [&](std::vector<double>& xs, const std::vector<double>& gs) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double fd = central_difference(xs[i], h, loss);
      r.max_rel_error = std::max(r.max_rel_error, relative_error(fd, gs[i]));
      ++r.checked;
    }
  };
  run(p.weights.embedding.data, analytic.embedding.data);
  run(p.weights.projection.data, analytic.projection.data);
  run(p.weights.head, analytic.head);
  return r;
}

/// Random token sequence of length [1, max_len] over ids [1, vocab).
inline micol::TokenIds random_ids(std::mt19937_64& rng, std::size_t vocab, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<std::uint32_t> tok(1, static_cast<std::uint32_t>(vocab - 1));
  micol::TokenIds ids(len(rng));
  for (auto& t : ids) t = tok(rng);
  return ids;
}

}  // namespace oracle
