#include "clews/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "clews/rng.hpp"

namespace clews {

namespace {

std::string format_id(const char* prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%04zu", prefix, index);
  return std::string(buf);
}

}  // namespace

SegmentEmbeddingStore generate_synthetic_corpus(const SyntheticParams& params) {
  if (params.cliques < 1 || params.tracks_per_clique < 1 || params.segments_per_track < 1 ||
      params.dim < 1)
    throw ParamError("all corpus counts must be at least 1");
  if (!(params.shared_fraction >= 0.0 && params.shared_fraction <= 1.0))
    throw ParamError("shared_fraction must lie in [0, 1]");
  if (!(params.noise_sigma >= 0.0)) throw ParamError("noise_sigma must be nonnegative");

  const std::size_t spt = params.segments_per_track;
  const auto shared = static_cast<std::size_t>(
      std::lround(params.shared_fraction * static_cast<double>(spt)));

  Rng rng(params.seed);
  SegmentEmbeddingStore store;
  store.dim = params.dim;
  store.tracks.reserve(params.cliques * params.tracks_per_clique);

  std::vector<double> motifs(spt * params.dim);
  for (std::size_t c = 0; c < params.cliques; ++c) {
    const std::string clique_id = format_id("c", c);
    for (auto& v : motifs) v = rng.normal();

    for (std::size_t t = 0; t < params.tracks_per_clique; ++t) {
      std::vector<std::size_t> motif_order(spt);
      std::iota(motif_order.begin(), motif_order.end(), std::size_t{0});
      rng.shuffle(motif_order);

      // Shared slots first, then distractors, then shuffle slot positions.
      std::vector<std::vector<double>> slots;
      slots.reserve(spt);
      for (std::size_t k = 0; k < shared; ++k) {
        std::vector<double> seg(params.dim);
        const double* motif = motifs.data() + motif_order[k] * params.dim;
        for (std::size_t d = 0; d < params.dim; ++d)
          seg[d] = motif[d] + params.noise_sigma * rng.normal();
        slots.push_back(std::move(seg));
      }
      for (std::size_t k = shared; k < spt; ++k) {
        std::vector<double> seg(params.dim);
        for (auto& v : seg) v = rng.normal();
        slots.push_back(std::move(seg));
      }
      rng.shuffle(slots);

      TrackEntry entry;
      entry.clique_id = clique_id;
      entry.track_id = clique_id + "_t" + std::to_string(t);
      entry.dim = params.dim;
      entry.data.reserve(spt * params.dim);
      for (const auto& seg : slots)
        for (double v : seg) entry.data.push_back(static_cast<float>(v));
      store.tracks.push_back(std::move(entry));
    }
  }

  store.validate();
  return store;
}

}  // namespace clews
