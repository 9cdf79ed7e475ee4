#pragma once

// Central finite differences over the valid cells of a reduced distance
// matrix, against any loss functional.

#include <functional>

#include "clews/loss.hpp"
#include "clews/reduction.hpp"
#include "clews/rng.hpp"

namespace fd {

using LossFn = std::function<double(const clews::ReducedDistanceMatrix&)>;

inline double central_difference(const clews::ReducedDistanceMatrix& d, std::size_t i,
                                 std::size_t j, const LossFn& loss, double step) {
  auto bump = [&](double delta) {
    clews::ReducedDistanceMatrix copy = d;
    copy.set(i, j, d.at(i, j) + delta, d.from_positive(i, j));
    return loss(copy);
  };
  return (bump(step) - bump(-step)) / (2.0 * step);
}

struct RandomInstance {
  clews::ReducedDistanceMatrix d;
  clews::AssignmentMatrix a;
};

// Valid random instance with at least one positive and one negative pair;
// distances in [0, 3].
inline RandomInstance random_instance(clews::Rng& rng, std::size_t max_side = 8) {
  while (true) {
    const std::size_t n = 2 + rng.bounded(max_side - 1);
    const std::size_t m = 2 + rng.bounded(max_side - 1);
    clews::AssignmentMatrix a(n, m);
    clews::ReducedDistanceMatrix d(n, m);
    std::size_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (rng.uniform() < 0.15) {
          a.set_valid(i, j, false);
          continue;
        }
        const bool positive = rng.uniform() < 0.4;
        a.set(i, j, positive);
        d.set(i, j, rng.uniform() * 3.0, positive);
        ++(positive ? pos : neg);
      }
    }
    if (pos > 0 && neg > 0) return {d, a};
  }
}

}  // namespace fd
