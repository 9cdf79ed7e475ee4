#pragma once

// Independent reference implementations used to check the production
// reductions. They follow the naive formulations directly (full re-scans,
// explicit mask copies, comparison-counted sorting) and instrument their
// operation counts so complexity growth can be measured. Nothing here may
// call into the production reduction code.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "clews/rng.hpp"
#include "clews/store.hpp"

namespace oracle {

struct OpCounter {
  std::uint64_t ops = 0;
};

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

// Mean over valid cells; one op per visited cell.
inline std::optional<double> mean(const clews::SegmentDistanceMatrix& d, OpCounter* counter) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t c = 0; c < d.cols(); ++c) {
      if (counter) ++counter->ops;
      if (!d.valid(r, c)) continue;
      sum += d.at(r, c);
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

// Full-scan min with first-hit (smallest row, then column) tie handling.
inline std::optional<Cell> min_cell(const clews::SegmentDistanceMatrix& d, OpCounter* counter) {
  std::optional<Cell> best;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t c = 0; c < d.cols(); ++c) {
      if (counter) ++counter->ops;
      if (!d.valid(r, c)) continue;
      if (!best || d.at(r, c) < best->value) best = Cell{r, c, d.at(r, c)};
    }
  }
  return best;
}

inline std::optional<double> min(const clews::SegmentDistanceMatrix& d, OpCounter* counter) {
  const auto cell = min_cell(d, counter);
  if (!cell) return std::nullopt;
  return cell->value;
}

// Row-by-row minimum then average; O(uv + u).
inline std::optional<double> meanmin(const clews::SegmentDistanceMatrix& d, OpCounter* counter) {
  double sum = 0.0;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t c = 0; c < d.cols(); ++c) {
      if (counter) ++counter->ops;
      if (!d.valid(r, c)) continue;
      if (!found || d.at(r, c) < best) {
        best = d.at(r, c);
        found = true;
      }
    }
    if (!found) return std::nullopt;
    if (counter) ++counter->ops;  // row finalization
    sum += best;
  }
  return sum / static_cast<double>(d.rows());
}

// Collect-sort-average; the sort comparator is counted, giving the
// O(uv log uv) term, plus uv collection ops and r averaging ops.
inline std::optional<double> best_r(const clews::SegmentDistanceMatrix& d, std::size_t r,
                                    OpCounter* counter) {
  std::vector<double> cells;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) {
      if (counter) ++counter->ops;
      if (d.valid(i, j)) cells.push_back(d.at(i, j));
    }
  }
  if (r < 1 || r > cells.size()) return std::nullopt;
  std::sort(cells.begin(), cells.end(), [&](double a, double b) {
    if (counter) ++counter->ops;
    return a < b;
  });
  double sum = 0.0;
  for (std::size_t k = 0; k < r; ++k) {
    if (counter) ++counter->ops;
    sum += cells[k];
  }
  return sum / static_cast<double>(r);
}

// Greedy best-pair-without-replacement on an explicit mask copy: re-scan
// the whole matrix each iteration, then mask the picked row and column
// cell by cell. O(r (uv + u + v)).
inline std::vector<Cell> bpwr_picks(const clews::SegmentDistanceMatrix& d, std::size_t r,
                                    OpCounter* counter) {
  clews::SegmentDistanceMatrix work = d;
  std::vector<Cell> picks;
  for (std::size_t q = 0; q < r; ++q) {
    const auto best = min_cell(work, counter);
    if (!best) break;
    picks.push_back(*best);
    for (std::size_t c = 0; c < work.cols(); ++c) {
      if (counter) ++counter->ops;
      work.set_mask(best->row, c, false);
    }
    for (std::size_t rr = 0; rr < work.rows(); ++rr) {
      if (counter) ++counter->ops;
      work.set_mask(rr, best->col, false);
    }
  }
  return picks;
}

inline std::optional<double> bpwr(const clews::SegmentDistanceMatrix& d, std::size_t r,
                                  OpCounter* counter) {
  const auto picks = bpwr_picks(d, r, counter);
  if (picks.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& p : picks) sum += p.value;
  return sum / static_cast<double>(picks.size());
}

// Uniform random matrix in [0, 1), optionally with a random mask that is
// guaranteed to keep at least one valid cell in every row and column.
inline clews::SegmentDistanceMatrix random_matrix(clews::Rng& rng, std::size_t rows,
                                                  std::size_t cols, bool with_mask) {
  clews::SegmentDistanceMatrix d(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) d.set(r, c, rng.uniform());
  if (with_mask) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        if (rng.uniform() < 0.25) d.set_mask(r, c, false);
    for (std::size_t r = 0; r < rows; ++r) d.set_mask(r, rng.bounded(cols), true);
    for (std::size_t c = 0; c < cols; ++c) d.set_mask(rng.bounded(rows), c, true);
  }
  return d;
}

}  // namespace oracle
