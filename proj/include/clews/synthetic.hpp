#pragma once

#include <cstdint>

#include "clews/store.hpp"

namespace clews {

// Desk-scale corpus: version cliques that share only part of their content.
// Each clique owns a pool of `segments_per_track` latent motif vectors; each
// track reuses a random subset of them (plus isotropic noise) and fills the
// remaining slots from a global distractor distribution.
struct SyntheticParams {
  std::size_t cliques = 50;
  std::size_t tracks_per_clique = 3;
  std::size_t segments_per_track = 8;
  std::size_t dim = 32;
  double shared_fraction = 0.5;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
};

SegmentEmbeddingStore generate_synthetic_corpus(const SyntheticParams& params);

}  // namespace clews
