#pragma once

#include <cmath>
#include <span>
#include <string_view>

#include "clews/store.hpp"

namespace clews {

// rms_diff is the dimension-normalized Euclidean distance; msd is its
// square (the mean squared difference). rms_diff(a,b)^2 == msd(a,b).
enum class DistanceKind { RmsDiff, Msd };

DistanceKind parse_distance_kind(std::string_view name);

namespace detail {

template <typename A, typename B>
double mean_squared_difference(std::span<const A> a, std::span<const B> b) {
  if (a.size() != b.size())
    throw ShapeError("segment dimensions differ: " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  if (a.empty()) throw ShapeError("segments must have at least one component");
  double acc = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double diff = static_cast<double>(a[t]) - static_cast<double>(b[t]);
    acc += diff * diff;
  }
  return acc / static_cast<double>(a.size());
}

}  // namespace detail

template <typename A, typename B>
double segment_distance(std::span<const A> a, std::span<const B> b, DistanceKind kind) {
  const double msd = detail::mean_squared_difference(a, b);
  return kind == DistanceKind::Msd ? msd : std::sqrt(msd);
}

// All pairs of segments between two tracks; the mask is all-true (masking
// for unequal lengths is applied by reductions, not here).
SegmentDistanceMatrix pairwise_track_distances(const TrackEntry& query,
                                               const TrackEntry& candidate,
                                               DistanceKind kind);

// n x m grid of per-track-pair sub-rectangles.
struct DistanceGrid {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<SegmentDistanceMatrix> cells;

  const SegmentDistanceMatrix& at(std::size_t i, std::size_t j) const {
    return cells[i * m + j];
  }
  SegmentDistanceMatrix& at(std::size_t i, std::size_t j) { return cells[i * m + j]; }
};

DistanceGrid batch_pairwise(const SegmentEmbeddingStore& queries,
                            const SegmentEmbeddingStore& candidates, DistanceKind kind);

}  // namespace clews
