#include "clews/protocols.hpp"

#include <algorithm>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "clews/distance.hpp"
#include "clews/parallel.hpp"
#include "clews/rng.hpp"

namespace clews {

void WindowingConfig::validate() const {
  if (segment_len == 0) throw ParamError("segment_len must be positive");
  if (hop == 0) throw ParamError("hop must be positive");
  for (std::size_t tau : tau_grid)
    if (tau == 0) throw ParamError("tau values must be positive");
}

namespace {

// Mean over `content` tiled up to `target` cells.
std::vector<float> tiled_mean(const TrackEntry& track, std::size_t begin, std::size_t count,
                              std::size_t target, std::size_t dim) {
  std::vector<double> acc(dim, 0.0);
  for (std::size_t k = 0; k < target; ++k) {
    const auto seg = track.segment(begin + (k % count));
    for (std::size_t t = 0; t < dim; ++t) acc[t] += static_cast<double>(seg[t]);
  }
  std::vector<float> out(dim);
  for (std::size_t t = 0; t < dim; ++t)
    out[t] = static_cast<float>(acc[t] / static_cast<double>(target));
  return out;
}

std::size_t window_count(std::size_t length, std::size_t window_len, std::size_t hop) {
  if (length <= window_len) return 1;
  return (length - window_len + hop - 1) / hop + 1;
}

TrackEntry windows_from_starts(const TrackEntry& track, const std::vector<std::size_t>& starts,
                               std::size_t window_len, std::size_t pad_to) {
  const std::size_t length = track.num_segments();
  const std::size_t target = std::max(window_len, pad_to);
  TrackEntry out;
  out.track_id = track.track_id;
  out.clique_id = track.clique_id;
  out.dim = track.dim;
  out.data.reserve(starts.size() * track.dim);
  for (std::size_t start : starts) {
    const std::size_t count = std::min(window_len, length - start);
    const auto window = tiled_mean(track, start, count, target, track.dim);
    out.data.insert(out.data.end(), window.begin(), window.end());
  }
  return out;
}

// One window of `count` cells at `start`, repeat-padded to at least pad_to.
TrackEntry single_cut(const TrackEntry& track, std::size_t start, std::size_t count,
                      std::size_t pad_to) {
  TrackEntry out;
  out.track_id = track.track_id;
  out.clique_id = track.clique_id;
  out.dim = track.dim;
  out.data = tiled_mean(track, start, count, std::max(count, pad_to), track.dim);
  return out;
}

}  // namespace

TrackEntry window_track(const TrackEntry& track, std::size_t window_len, std::size_t hop,
                        std::size_t pad_to) {
  if (window_len == 0 || hop == 0) throw ParamError("window length and hop must be positive");
  const std::size_t length = track.num_segments();
  if (length == 0) throw DataError("cannot window an empty track");

  std::vector<std::size_t> starts;
  const std::size_t count = window_count(length, window_len, hop);
  for (std::size_t w = 0; w < count; ++w) starts.push_back(w * hop);
  return windows_from_starts(track, starts, window_len, pad_to);
}

namespace {

SegmentEmbeddingStore window_store(const SegmentEmbeddingStore& store, std::size_t window_len,
                                   std::size_t hop, std::size_t pad_to) {
  SegmentEmbeddingStore out;
  out.dim = store.dim;
  out.tracks.resize(store.tracks.size());
  parallel_for(store.tracks.size(), [&](std::size_t i) {
    out.tracks[i] = window_track(store.tracks[i], window_len, hop, pad_to);
  });
  return out;
}

// bpwr/best r cannot exceed what a sub-rectangle supports; at evaluation
// time the reduction is clamped per pair instead of failing, so a single
// spec covers tracks of any length.
ReductionSpec clamp_for(const ReductionSpec& red, std::size_t u, std::size_t v) {
  ReductionSpec spec = red;
  if (spec.kind == ReductionKind::BpwrR) spec.r = std::min(spec.r, std::min(u, v));
  if (spec.kind == ReductionKind::BestR) spec.r = std::min(spec.r, u * v);
  return spec;
}

std::vector<RankedRetrieval> rank_windowed(const SegmentEmbeddingStore& query_windows,
                                           const SegmentEmbeddingStore& candidate_windows,
                                           const VersionCliqueTable& cliques,
                                           const ReductionSpec& red) {
  for (const auto& t : query_windows.tracks)
    if (!cliques.contains(t.track_id))
      throw DataError("query track '" + t.track_id + "' missing from the clique table");
  for (const auto& t : candidate_windows.tracks)
    if (!cliques.contains(t.track_id))
      throw DataError("candidate track '" + t.track_id + "' missing from the clique table");

  std::vector<RankedRetrieval> out(query_windows.tracks.size());
  parallel_for(query_windows.tracks.size(), [&](std::size_t qi) {
    const auto& query = query_windows.tracks[qi];
    const std::string& query_clique = cliques.clique_of(query.track_id);
    RankedRetrieval rr;
    rr.query_id = query.track_id;
    rr.ranked.reserve(candidate_windows.tracks.size());
    for (const auto& cand : candidate_windows.tracks) {
      if (cand.track_id == query.track_id) continue;  // self-exclusion
      const auto dists = pairwise_track_distances(query, cand, DistanceKind::RmsDiff);
      const auto spec = clamp_for(red, dists.rows(), dists.cols());
      rr.ranked.push_back({cand.track_id, reduce(dists, spec),
                           cliques.clique_of(cand.track_id) == query_clique});
    }
    std::sort(rr.ranked.begin(), rr.ranked.end(),
              [](const RankedCandidate& a, const RankedCandidate& b) {
                if (a.distance != b.distance) return a.distance < b.distance;
                return a.id < b.id;
              });
    out[qi] = std::move(rr);
  });
  return out;
}

ReportRow make_row(std::string protocol, std::size_t tau, std::string metric,
                   const MetricAggregate& agg, std::size_t n_fallback = 0) {
  ReportRow row;
  row.protocol = std::move(protocol);
  row.tau = tau;
  row.metric = std::move(metric);
  row.value = agg.value;
  row.ci95 = agg.ci95;
  row.n_queries = agg.n_used;
  row.n_excluded = agg.n_excluded;
  row.n_fallback = n_fallback;
  return row;
}

void append_metric_rows(MetricsReport& report, const std::string& protocol, std::size_t tau,
                        const std::vector<RankedRetrieval>& rrs, std::size_t n_fallback = 0) {
  report.rows.push_back(make_row(protocol, tau, "nar", nar(rrs), n_fallback));
  report.rows.push_back(make_row(protocol, tau, "map", mean_average_precision(rrs), n_fallback));
}

}  // namespace

std::vector<RankedRetrieval> rank_queries(const SegmentEmbeddingStore& queries,
                                          const SegmentEmbeddingStore& candidates,
                                          const VersionCliqueTable& cliques,
                                          const WindowingConfig& cfg,
                                          const ReductionSpec& red, std::size_t query_len) {
  cfg.validate();
  red.validate();
  const auto query_windows = window_store(queries, query_len, cfg.hop, cfg.segment_len);
  const auto candidate_windows =
      window_store(candidates, cfg.segment_len, cfg.hop, cfg.segment_len);
  return rank_windowed(query_windows, candidate_windows, cliques, red);
}

MetricsReport track_level_eval(const SegmentEmbeddingStore& queries,
                               const SegmentEmbeddingStore& candidates,
                               const VersionCliqueTable& cliques, const WindowingConfig& cfg,
                               const ReductionSpec& red) {
  const auto rrs = rank_queries(queries, candidates, cliques, cfg, red, cfg.segment_len);
  MetricsReport report;
  append_metric_rows(report, "track", cfg.segment_len, rrs);
  return report;
}

MetricsReport segment_level_eval(const SegmentEmbeddingStore& queries,
                                 const SegmentEmbeddingStore& candidates,
                                 const VersionCliqueTable& cliques,
                                 const WindowingConfig& cfg) {
  cfg.validate();
  if (cfg.tau_grid.empty()) throw ParamError("segment-level evaluation needs a tau grid");
  const ReductionSpec min_spec{ReductionKind::Min, 0};
  const auto candidate_windows =
      window_store(candidates, cfg.segment_len, cfg.hop, cfg.segment_len);

  MetricsReport report;
  for (std::size_t tau : cfg.tau_grid) {
    const auto query_windows = window_store(queries, tau, cfg.hop, cfg.segment_len);
    const auto rrs = rank_windowed(query_windows, candidate_windows, cliques, min_spec);
    append_metric_rows(report, "segment", tau, rrs);
  }
  return report;
}

MetricsReport random_segment_eval(const SegmentEmbeddingStore& queries,
                                  const SegmentEmbeddingStore& candidates,
                                  const VersionCliqueTable& cliques,
                                  const WindowingConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (cfg.tau_grid.empty()) throw ParamError("random-segment evaluation needs a tau grid");
  const ReductionSpec min_spec{ReductionKind::Min, 0};
  const auto candidate_windows =
      window_store(candidates, cfg.segment_len, cfg.hop, cfg.segment_len);

  MetricsReport report;
  for (std::size_t tau : cfg.tau_grid) {
    // One seeded cut per query track; the stream is restarted per tau so a
    // report row does not depend on the rest of the grid.
    Rng rng(seed ^ (0x9e3779b97f4a7c15ULL * (tau + 1)));
    std::size_t n_fallback = 0;
    SegmentEmbeddingStore query_windows;
    query_windows.dim = queries.dim;
    query_windows.tracks.reserve(queries.tracks.size());
    for (const auto& track : queries.tracks) {
      const std::size_t length = track.num_segments();
      std::size_t start = 0;
      std::size_t cut = tau;
      if (tau >= length) {
        cut = length;  // repeat-padded full track
        if (tau > length) ++n_fallback;
      } else {
        start = rng.bounded(length - tau + 1);
      }
      query_windows.tracks.push_back(single_cut(track, start, cut, cfg.segment_len));
    }
    const auto rrs = rank_windowed(query_windows, candidate_windows, cliques, min_spec);
    append_metric_rows(report, "random", tau, rrs, n_fallback);
  }
  return report;
}

namespace {

char* format_double(char* buf, std::size_t n, double v) {
  std::snprintf(buf, n, "%.10g", v);
  return buf;
}

}  // namespace

std::string MetricsReport::to_csv() const {
  std::string out = "protocol,tau,metric,value,ci95,n_queries\n";
  char buf[64];
  for (const auto& row : rows) {
    out += row.protocol;
    out += ',';
    out += std::to_string(row.tau);
    out += ',';
    out += row.metric;
    out += ',';
    out += format_double(buf, sizeof(buf), row.value);
    out += ',';
    out += format_double(buf, sizeof(buf), row.ci95);
    out += ',';
    out += std::to_string(row.n_queries);
    out += '\n';
  }
  return out;
}

std::string MetricsReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows) {
    rows_json.push_back({{"protocol", row.protocol},
                         {"tau", row.tau},
                         {"metric", row.metric},
                         {"value", row.value},
                         {"ci95", row.ci95},
                         {"n_queries", row.n_queries},
                         {"n_excluded", row.n_excluded},
                         {"n_fallback", row.n_fallback}});
  }
  return nlohmann::json{{"rows", rows_json}}.dump(2) + "\n";
}

}  // namespace clews
