#pragma once

#include <cstdint>

#include "clews/loss.hpp"
#include "clews/protocols.hpp"
#include "clews/reduction.hpp"
#include "clews/rng.hpp"
#include "clews/store.hpp"

namespace clews {

// Desk-scale training setup: free embeddings (one vector per stored
// segment) optimized by plain fixed-step gradient descent on the stable
// contrastive loss.
struct TrainConfig {
  std::size_t anchors_per_batch = 25;
  std::size_t positives_per_anchor = 3;
  std::size_t segments_per_track = 8;  // segments of each track used per batch
  ReductionSpec pos_reduction{ReductionKind::BpwrR, 5};
  ReductionSpec neg_reduction{ReductionKind::Min, 0};
  LossParams loss;
  double step_size = 0.05;
  std::size_t steps = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

// A batch of track slots (indices into the store; duplicates allowed) with
// the pairwise assignment over slots. Same-track cells are invalid.
struct Batch {
  std::vector<std::size_t> slots;
  AssignmentMatrix assignment;
};

// 25-anchors / 3-positives sampling: anchors drawn without replacement from
// tracks whose clique has another member, positives drawn uniformly with
// replacement from the anchor's clique excluding the anchor itself.
Batch sample_batch(const SegmentEmbeddingStore& store, const VersionCliqueTable& cliques,
                   const TrainConfig& cfg, Rng& rng);

// 64-bit working copy of the store's embeddings.
struct EmbeddingState {
  std::size_t dim = 0;
  std::vector<std::string> track_ids;
  std::vector<std::string> clique_ids;
  std::vector<std::vector<double>> values;  // per track, u * dim row-major

  static EmbeddingState from_store(const SegmentEmbeddingStore& store);
  SegmentEmbeddingStore to_store() const;
};

// One selected reduction per valid ordered pair, kept for the backward pass
// (the selection is treated as fixed within a step).
struct PairSelection {
  std::size_t i = 0;  // slot indices
  std::size_t j = 0;
  bool positive = false;
  double reduced = 0.0;
  std::vector<SelectedCell> cells;
};

struct StepComputation {
  double loss_value = 0.0;
  std::vector<std::vector<double>> grads;  // same layout as EmbeddingState::values
  std::vector<PairSelection> selections;
};

// Forward + backward for one batch at the current state. Exposed so the
// composed gradient can be checked against finite differences.
StepComputation compute_step(const EmbeddingState& state, const Batch& batch,
                             const TrainConfig& cfg);

struct TrainResult {
  SegmentEmbeddingStore store;
  std::vector<double> trace;  // per-step loss values
};

// Optimizes the store's embeddings in place (functionally); deterministic
// for a fixed seed. The input store's values are the initial values.
TrainResult train_free_embeddings(const SegmentEmbeddingStore& initial,
                                  const VersionCliqueTable& cliques, const TrainConfig& cfg);

// Same geometry and ids as `like`, embeddings drawn isotropically at
// `scale`. The usual entry point for training from scratch.
SegmentEmbeddingStore randomize_embeddings(const SegmentEmbeddingStore& like, double scale,
                                           std::uint64_t seed);

struct SweepGrids {
  std::vector<ReductionSpec> pos_reductions;
  std::vector<ReductionSpec> neg_reductions;
  std::vector<double> gammas;
  std::vector<double> epsilons;
};

struct SweepRow {
  ReductionSpec pos_reduction;
  ReductionSpec neg_reduction;
  double gamma = 0.0;
  double epsilon = 0.0;
  double nar = 0.0;
  double map = 0.0;
};

// Trains one model per grid point (same seeded random init each time) and
// evaluates with track_level_eval.
std::vector<SweepRow> ablation_sweep(const SegmentEmbeddingStore& corpus,
                                     const VersionCliqueTable& cliques, const SweepGrids& grids,
                                     const TrainConfig& base, const WindowingConfig& eval_cfg,
                                     const ReductionSpec& eval_red);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace clews
