#pragma once

#include <cstdint>

#include "clews/metrics.hpp"
#include "clews/reduction.hpp"
#include "clews/store.hpp"

namespace clews {

// Windowing geometry in abstract time units: one stored segment is one
// unit of the track's timeline. A window spanning several units emits the
// mean of the covered segment vectors; short content is repeat-padded
// (tiled) up to the target length before averaging.
struct WindowingConfig {
  std::size_t segment_len = 20;  // native window length, units
  std::size_t hop = 5;           // window stride, units
  std::vector<std::size_t> tau_grid = {5, 10, 20, 30, 40, 60, 90};

  void validate() const;
};

// Overlapping windows of `window_len` every `hop` units. Window starts are
// 0, hop, ..., so a track of length L yields ceil((L - W) / hop) + 1
// windows (one, when L <= W); a final short window, and any content shorter
// than `pad_to`, is repeat-padded before the mean is taken.
TrackEntry window_track(const TrackEntry& track, std::size_t window_len, std::size_t hop,
                        std::size_t pad_to);

struct ReportRow {
  std::string protocol;
  std::size_t tau = 0;
  std::string metric;  // "nar" or "map"
  double value = 0.0;
  double ci95 = 0.0;
  std::size_t n_queries = 0;
  std::size_t n_excluded = 0;
  std::size_t n_fallback = 0;  // random protocol: windows longer than the track
};

struct MetricsReport {
  std::vector<ReportRow> rows;

  std::string to_csv() const;
  std::string to_json() const;
};

// Windows both sides at the native length, reduces each query-candidate
// sub-rectangle with `red` (bpwr/best r is clamped to what the rectangle
// can support), ranks candidates by ascending distance with lexicographic
// id tie-break, and reports NAR and MAP.
MetricsReport track_level_eval(const SegmentEmbeddingStore& queries,
                               const SegmentEmbeddingStore& candidates,
                               const VersionCliqueTable& cliques, const WindowingConfig& cfg,
                               const ReductionSpec& red);

// Best-match protocol: for each tau in cfg.tau_grid, query windows of
// length tau (repeat-padded to the native length) against native candidate
// windows, reduced with min.
MetricsReport segment_level_eval(const SegmentEmbeddingStore& queries,
                                 const SegmentEmbeddingStore& candidates,
                                 const VersionCliqueTable& cliques,
                                 const WindowingConfig& cfg);

// Random-segment protocol: one uniformly-random contiguous cut of length
// tau per query track (per tau), evaluated as in segment_level_eval.
// Deterministic for a fixed seed. Windows longer than the track fall back
// to the repeat-padded full track and are counted in n_fallback.
MetricsReport random_segment_eval(const SegmentEmbeddingStore& queries,
                                  const SegmentEmbeddingStore& candidates,
                                  const VersionCliqueTable& cliques,
                                  const WindowingConfig& cfg, std::uint64_t seed);

// Ranked lists underlying the protocols; exposed for tests and bindings.
std::vector<RankedRetrieval> rank_queries(const SegmentEmbeddingStore& queries,
                                          const SegmentEmbeddingStore& candidates,
                                          const VersionCliqueTable& cliques,
                                          const WindowingConfig& cfg,
                                          const ReductionSpec& red, std::size_t query_len);

}  // namespace clews
