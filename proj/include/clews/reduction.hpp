#pragma once

#include <string>
#include <string_view>

#include "clews/distance.hpp"
#include "clews/store.hpp"

namespace clews {

enum class ReductionKind { Mean, BestR, Min, MeanMin, BpwrR };

// Selector for one reduction operator; r is required exactly for best-r
// and bpwr-r.
struct ReductionSpec {
  ReductionKind kind = ReductionKind::Min;
  std::size_t r = 0;

  void validate() const;
  std::string name() const;  // "mean", "min", "meanmin", "best-5", "bpwr-10"

  // Parses the name() format.
  static ReductionSpec parse(std::string_view text);

  bool operator==(const ReductionSpec&) const = default;
};

// Mean over the valid cells.
double reduce_mean(const SegmentDistanceMatrix& d);

// Mean of the r smallest valid cells. 1 <= r <= valid cell count.
double reduce_best_r(const SegmentDistanceMatrix& d, std::size_t r);

// Minimum valid cell.
double reduce_min(const SegmentDistanceMatrix& d);

// Per-query-row minimum, averaged over rows. Every row must have at least
// one valid cell.
double reduce_meanmin(const SegmentDistanceMatrix& d);

struct BpwrPick {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

// Best pair without replacement: greedily take the minimum valid cell,
// mask its row and column, repeat up to r times. Ties break on the
// smallest row index, then the smallest column index. With irregular
// masks the matrix can be exhausted before r picks; the picks made so
// far are returned.
std::vector<BpwrPick> bpwr_picks(const SegmentDistanceMatrix& d, std::size_t r);

// Mean of the bpwr picks (of the achieved picks under early exhaustion).
double reduce_bpwr(const SegmentDistanceMatrix& d, std::size_t r);

double reduce(const SegmentDistanceMatrix& d, const ReductionSpec& spec);

// One reduced cell's contributing segment pairs, with the weight of each
// pair in the reduced value (d = sum of weight * cell). Used to route
// gradients through a reduction with the selection held fixed.
struct SelectedCell {
  std::size_t row = 0;
  std::size_t col = 0;
  double weight = 0.0;
};

struct ReductionResult {
  double value = 0.0;
  std::vector<SelectedCell> cells;
};

ReductionResult reduce_with_selection(const SegmentDistanceMatrix& d,
                                      const ReductionSpec& spec);

// Track-level distances after applying the positive/negative reductions,
// with per-cell provenance (which operator class produced it).
class ReducedDistanceMatrix {
 public:
  ReducedDistanceMatrix() = default;
  ReducedDistanceMatrix(std::size_t n, std::size_t m)
      : n_(n), m_(m), values_(n * m, 0.0), valid_(n * m, 0), from_pos_(n * m, 0) {}

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }

  double at(std::size_t i, std::size_t j) const { return values_[i * m_ + j]; }
  bool is_valid(std::size_t i, std::size_t j) const { return valid_[i * m_ + j] != 0; }
  bool from_positive(std::size_t i, std::size_t j) const {
    return from_pos_[i * m_ + j] != 0;
  }

  void set(std::size_t i, std::size_t j, double value, bool positive) {
    values_[i * m_ + j] = value;
    valid_[i * m_ + j] = 1;
    from_pos_[i * m_ + j] = positive ? 1 : 0;
  }

  const ReductionSpec& pos_spec() const { return pos_spec_; }
  const ReductionSpec& neg_spec() const { return neg_spec_; }
  void set_specs(const ReductionSpec& pos, const ReductionSpec& neg) {
    pos_spec_ = pos;
    neg_spec_ = neg;
  }

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
  std::vector<std::uint8_t> from_pos_;
  ReductionSpec pos_spec_;
  ReductionSpec neg_spec_;
};

// D = A (.) R+(D~) + (1 - A) (.) R-(D~), over the valid cells of A.
ReducedDistanceMatrix combine_reductions(const DistanceGrid& grid, const AssignmentMatrix& a,
                                         const ReductionSpec& pos, const ReductionSpec& neg);

}  // namespace clews
