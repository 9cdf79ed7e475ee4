#include "clews/distance.hpp"

#include <algorithm>

#include "clews/parallel.hpp"

namespace clews {

DistanceKind parse_distance_kind(std::string_view name) {
  if (name == "rms" || name == "rms_diff") return DistanceKind::RmsDiff;
  if (name == "msd") return DistanceKind::Msd;
  throw ParamError("unknown distance kind '" + std::string(name) + "'");
}

SegmentDistanceMatrix pairwise_track_distances(const TrackEntry& query,
                                               const TrackEntry& candidate,
                                               DistanceKind kind) {
  if (query.dim != candidate.dim)
    throw ShapeError("track dims differ: " + std::to_string(query.dim) + " vs " +
                     std::to_string(candidate.dim));
  const std::size_t u = query.num_segments();
  const std::size_t v = candidate.num_segments();
  if (u == 0 || v == 0) throw DataError("tracks must be nonempty");

  // Blocked over segment pairs for cache locality. The per-cell inner sum
  // runs in the same order as the naive loop, so blocking only reorders
  // cells, not the accumulation within a cell.
  constexpr std::size_t kBlock = 32;
  SegmentDistanceMatrix out(u, v);
  for (std::size_t kb = 0; kb < u; kb += kBlock) {
    const std::size_t kend = std::min(u, kb + kBlock);
    for (std::size_t lb = 0; lb < v; lb += kBlock) {
      const std::size_t lend = std::min(v, lb + kBlock);
      for (std::size_t k = kb; k < kend; ++k) {
        for (std::size_t l = lb; l < lend; ++l) {
          out.set(k, l, segment_distance(query.segment(k), candidate.segment(l), kind));
        }
      }
    }
  }
  return out;
}

DistanceGrid batch_pairwise(const SegmentEmbeddingStore& queries,
                            const SegmentEmbeddingStore& candidates, DistanceKind kind) {
  if (queries.tracks.empty() || candidates.tracks.empty())
    throw DataError("batch_pairwise requires nonempty stores");
  if (queries.dim != candidates.dim)
    throw ShapeError("store dims differ: " + std::to_string(queries.dim) + " vs " +
                     std::to_string(candidates.dim));

  DistanceGrid grid;
  grid.n = queries.tracks.size();
  grid.m = candidates.tracks.size();
  grid.cells.resize(grid.n * grid.m);
  parallel_for(grid.n * grid.m, [&](std::size_t idx) {
    const std::size_t i = idx / grid.m;
    const std::size_t j = idx % grid.m;
    grid.cells[idx] =
        pairwise_track_distances(queries.tracks[i], candidates.tracks[j], kind);
  });
  return grid;
}

}  // namespace clews
