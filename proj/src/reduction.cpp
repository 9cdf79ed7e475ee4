#include "clews/reduction.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

#include "clews/parallel.hpp"

namespace clews {

void ReductionSpec::validate() const {
  const bool needs_r = kind == ReductionKind::BestR || kind == ReductionKind::BpwrR;
  if (needs_r && r == 0) throw ParamError("reduction '" + name() + "' requires r >= 1");
  if (!needs_r && r != 0) throw ParamError("reduction '" + name() + "' takes no r");
}

std::string ReductionSpec::name() const {
  switch (kind) {
    case ReductionKind::Mean:
      return "mean";
    case ReductionKind::Min:
      return "min";
    case ReductionKind::MeanMin:
      return "meanmin";
    case ReductionKind::BestR:
      return "best-" + std::to_string(r);
    case ReductionKind::BpwrR:
      return "bpwr-" + std::to_string(r);
  }
  return "?";
}

ReductionSpec ReductionSpec::parse(std::string_view text) {
  ReductionSpec spec;
  if (text == "mean") {
    spec.kind = ReductionKind::Mean;
    return spec;
  }
  if (text == "min") {
    spec.kind = ReductionKind::Min;
    return spec;
  }
  if (text == "meanmin") {
    spec.kind = ReductionKind::MeanMin;
    return spec;
  }
  const auto parse_r = [&](std::string_view tail) {
    std::size_t value = 0;
    const auto* begin = tail.data();
    const auto* end = tail.data() + tail.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || value == 0)
      throw ParamError("bad reduction spec '" + std::string(text) + "'");
    return value;
  };
  if (text.starts_with("best-")) {
    spec.kind = ReductionKind::BestR;
    spec.r = parse_r(text.substr(5));
    return spec;
  }
  if (text.starts_with("bpwr-")) {
    spec.kind = ReductionKind::BpwrR;
    spec.r = parse_r(text.substr(5));
    return spec;
  }
  throw ParamError("unknown reduction '" + std::string(text) + "'");
}

double reduce_mean(const SegmentDistanceMatrix& d) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t c = 0; c < d.cols(); ++c) {
      if (!d.valid(r, c)) continue;
      sum += d.at(r, c);
      ++count;
    }
  }
  if (count == 0) throw EmptyReductionError("mean over an all-masked matrix");
  return sum / static_cast<double>(count);
}

double reduce_best_r(const SegmentDistanceMatrix& d, std::size_t r) {
  if (r < 1) throw ParamError("best-r requires r >= 1");
  std::vector<double> cells;
  cells.reserve(d.rows() * d.cols());
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j)
      if (d.valid(i, j)) cells.push_back(d.at(i, j));
  if (r > cells.size())
    throw ParamError("best-r with r=" + std::to_string(r) + " but only " +
                     std::to_string(cells.size()) + " valid cells");
  // Summing the r smallest in ascending order keeps the floating-point
  // ordering chain against bpwr exact (see reduce_bpwr).
  std::vector<double> smallest(r);
  std::partial_sort_copy(cells.begin(), cells.end(), smallest.begin(), smallest.end());
  double sum = 0.0;
  for (double v : smallest) sum += v;
  return sum / static_cast<double>(r);
}

namespace {

// Smallest valid cell, ties broken by smallest row then smallest column.
// Returns false when no valid cell exists.
bool find_min_cell(const SegmentDistanceMatrix& d, const std::vector<std::uint8_t>& row_dead,
                   const std::vector<std::uint8_t>& col_dead, std::size_t& out_r,
                   std::size_t& out_c) {
  bool found = false;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < d.rows(); ++r) {
    if (!row_dead.empty() && row_dead[r]) continue;
    for (std::size_t c = 0; c < d.cols(); ++c) {
      if (!col_dead.empty() && col_dead[c]) continue;
      if (!d.valid(r, c)) continue;
      const double v = d.at(r, c);
      if (!found || v < best) {
        found = true;
        best = v;
        out_r = r;
        out_c = c;
      }
    }
  }
  return found;
}

}  // namespace

double reduce_min(const SegmentDistanceMatrix& d) {
  std::size_t r = 0, c = 0;
  if (!find_min_cell(d, {}, {}, r, c))
    throw EmptyReductionError("min over an all-masked matrix");
  return d.at(r, c);
}

double reduce_meanmin(const SegmentDistanceMatrix& d) {
  if (d.rows() == 0) throw EmptyReductionError("meanmin over an empty matrix");
  double sum = 0.0;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    bool found = false;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < d.cols(); ++c) {
      if (!d.valid(r, c)) continue;
      if (!found || d.at(r, c) < best) {
        found = true;
        best = d.at(r, c);
      }
    }
    if (!found)
      throw EmptyReductionError("meanmin: row " + std::to_string(r) + " is fully masked");
    sum += best;
  }
  return sum / static_cast<double>(d.rows());
}

std::vector<BpwrPick> bpwr_picks(const SegmentDistanceMatrix& d, std::size_t r) {
  if (r < 1) throw ParamError("bpwr-r requires r >= 1");
  // Feasibility bound: rows and columns that hold at least one valid cell.
  std::vector<std::uint8_t> row_nonempty(d.rows(), 0), col_nonempty(d.cols(), 0);
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j)
      if (d.valid(i, j)) row_nonempty[i] = col_nonempty[j] = 1;
  const auto nonempty_rows =
      static_cast<std::size_t>(std::count(row_nonempty.begin(), row_nonempty.end(), 1));
  const auto nonempty_cols =
      static_cast<std::size_t>(std::count(col_nonempty.begin(), col_nonempty.end(), 1));
  if (nonempty_rows == 0) throw EmptyReductionError("bpwr over an all-masked matrix");
  if (r > std::min(nonempty_rows, nonempty_cols))
    throw ParamError("bpwr with r=" + std::to_string(r) + " exceeds min(" +
                     std::to_string(nonempty_rows) + ", " + std::to_string(nonempty_cols) +
                     ")");

  // The input mask is never mutated; picked rows/columns live in side arrays.
  std::vector<std::uint8_t> row_dead(d.rows(), 0), col_dead(d.cols(), 0);
  std::vector<BpwrPick> picks;
  picks.reserve(r);
  for (std::size_t q = 0; q < r; ++q) {
    std::size_t pr = 0, pc = 0;
    if (!find_min_cell(d, row_dead, col_dead, pr, pc)) break;  // early exhaustion
    picks.push_back({pr, pc, d.at(pr, pc)});
    row_dead[pr] = 1;
    col_dead[pc] = 1;
  }
  return picks;
}

double reduce_bpwr(const SegmentDistanceMatrix& d, std::size_t r) {
  const auto picks = bpwr_picks(d, r);
  double sum = 0.0;
  for (const auto& p : picks) sum += p.value;  // picks are nondecreasing
  return sum / static_cast<double>(picks.size());
}

double reduce(const SegmentDistanceMatrix& d, const ReductionSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case ReductionKind::Mean:
      return reduce_mean(d);
    case ReductionKind::Min:
      return reduce_min(d);
    case ReductionKind::MeanMin:
      return reduce_meanmin(d);
    case ReductionKind::BestR:
      return reduce_best_r(d, spec.r);
    case ReductionKind::BpwrR:
      return reduce_bpwr(d, spec.r);
  }
  throw ParamError("unhandled reduction kind");
}

ReductionResult reduce_with_selection(const SegmentDistanceMatrix& d,
                                      const ReductionSpec& spec) {
  spec.validate();
  ReductionResult result;
  switch (spec.kind) {
    case ReductionKind::Mean: {
      result.value = reduce_mean(d);
      const double w = 1.0 / static_cast<double>(d.valid_count());
      for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j)
          if (d.valid(i, j)) result.cells.push_back({i, j, w});
      return result;
    }
    case ReductionKind::Min: {
      std::size_t r = 0, c = 0;
      if (!find_min_cell(d, {}, {}, r, c))
        throw EmptyReductionError("min over an all-masked matrix");
      result.value = d.at(r, c);
      result.cells.push_back({r, c, 1.0});
      return result;
    }
    case ReductionKind::MeanMin: {
      const double w = 1.0 / static_cast<double>(d.rows());
      double sum = 0.0;
      for (std::size_t r = 0; r < d.rows(); ++r) {
        bool found = false;
        std::size_t bc = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < d.cols(); ++c) {
          if (!d.valid(r, c)) continue;
          if (!found || d.at(r, c) < best) {
            found = true;
            best = d.at(r, c);
            bc = c;
          }
        }
        if (!found)
          throw EmptyReductionError("meanmin: row " + std::to_string(r) + " is fully masked");
        sum += best;
        result.cells.push_back({r, bc, w});
      }
      result.value = sum / static_cast<double>(d.rows());
      return result;
    }
    case ReductionKind::BestR: {
      // Selection needs cell coordinates, so sort indices rather than values.
      std::vector<std::pair<double, std::size_t>> cells;
      for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j)
          if (d.valid(i, j)) cells.emplace_back(d.at(i, j), i * d.cols() + j);
      if (spec.r > cells.size())
        throw ParamError("best-r with r=" + std::to_string(spec.r) + " but only " +
                         std::to_string(cells.size()) + " valid cells");
      std::partial_sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(spec.r),
                        cells.end());
      const double w = 1.0 / static_cast<double>(spec.r);
      double sum = 0.0;
      for (std::size_t k = 0; k < spec.r; ++k) {
        sum += cells[k].first;
        result.cells.push_back({cells[k].second / d.cols(), cells[k].second % d.cols(), w});
      }
      result.value = sum / static_cast<double>(spec.r);
      return result;
    }
    case ReductionKind::BpwrR: {
      const auto picks = bpwr_picks(d, spec.r);
      const double w = 1.0 / static_cast<double>(picks.size());
      double sum = 0.0;
      for (const auto& p : picks) {
        sum += p.value;
        result.cells.push_back({p.row, p.col, w});
      }
      result.value = sum / static_cast<double>(picks.size());
      return result;
    }
  }
  throw ParamError("unhandled reduction kind");
}

ReducedDistanceMatrix combine_reductions(const DistanceGrid& grid, const AssignmentMatrix& a,
                                         const ReductionSpec& pos, const ReductionSpec& neg) {
  pos.validate();
  neg.validate();
  if (grid.n != a.n() || grid.m != a.m())
    throw DataError("distance grid shape does not match the assignment matrix");

  ReducedDistanceMatrix out(a.n(), a.m());
  out.set_specs(pos, neg);
  parallel_for(a.n() * a.m(), [&](std::size_t idx) {
    const std::size_t i = idx / a.m();
    const std::size_t j = idx % a.m();
    if (!a.is_valid(i, j)) return;
    const auto& cell = grid.at(i, j);
    if (cell.rows() == 0 || cell.cols() == 0)
      throw DataError("missing sub-rectangle for valid pair (" + std::to_string(i) + ", " +
                      std::to_string(j) + ")");
    const bool positive = a.is_positive(i, j);
    out.set(i, j, reduce(cell, positive ? pos : neg), positive);
  });
  return out;
}

}  // namespace clews
