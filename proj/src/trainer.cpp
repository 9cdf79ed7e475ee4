#include "clews/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "clews/distance.hpp"

namespace clews {

void TrainConfig::validate() const {
  if (anchors_per_batch < 2)
    throw ParamError("anchors_per_batch must be at least 2 (no negatives otherwise)");
  if (positives_per_anchor < 1) throw ParamError("positives_per_anchor must be at least 1");
  if (segments_per_track < 1) throw ParamError("segments_per_track must be at least 1");
  if (!(step_size >= 0.0)) throw ParamError("step_size must be nonnegative");
  pos_reduction.validate();
  neg_reduction.validate();
  loss.validate();
}

Batch sample_batch(const SegmentEmbeddingStore& store, const VersionCliqueTable& cliques,
                   const TrainConfig& cfg, Rng& rng) {
  cfg.validate();

  // Tracks per clique, in store order.
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t t = 0; t < store.tracks.size(); ++t)
    members[cliques.clique_of(store.tracks[t].track_id)].push_back(t);

  std::vector<std::size_t> eligible;  // anchors need a positive to sample
  for (std::size_t t = 0; t < store.tracks.size(); ++t) {
    const auto& group = members[cliques.clique_of(store.tracks[t].track_id)];
    if (group.size() >= 2) eligible.push_back(t);
  }
  if (eligible.empty())
    throw SamplingError("no clique has two members; nothing can serve as an anchor");

  const std::size_t anchors = std::min(cfg.anchors_per_batch, eligible.size());

  // A draw can land every anchor in one clique (no negatives) on tiny
  // corpora; retry on the same deterministic stream.
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<std::size_t> pool = eligible;
    rng.shuffle(pool);
    pool.resize(anchors);

    Batch batch;
    batch.slots.reserve(anchors * (1 + cfg.positives_per_anchor));
    for (std::size_t anchor : pool) {
      batch.slots.push_back(anchor);
      const auto& group = members[cliques.clique_of(store.tracks[anchor].track_id)];
      for (std::size_t k = 0; k < cfg.positives_per_anchor; ++k) {
        // Uniform with replacement over the clique, excluding the anchor.
        std::size_t pick;
        do {
          pick = group[rng.bounded(group.size())];
        } while (pick == anchor);
        batch.slots.push_back(pick);
      }
    }

    const std::size_t b = batch.slots.size();
    batch.assignment = AssignmentMatrix(b, b);
    std::size_t positives = 0, negatives = 0;
    for (std::size_t i = 0; i < b; ++i) {
      const auto& ti = store.tracks[batch.slots[i]];
      for (std::size_t j = 0; j < b; ++j) {
        const auto& tj = store.tracks[batch.slots[j]];
        // Self-comparisons and duplicate samples of one track are invalid.
        if (i == j || batch.slots[i] == batch.slots[j]) {
          batch.assignment.set_valid(i, j, false);
          continue;
        }
        const bool positive = ti.clique_id == tj.clique_id;
        batch.assignment.set(i, j, positive);
        ++(positive ? positives : negatives);
      }
    }
    if (positives > 0 && negatives > 0) return batch;
  }
  throw SamplingError("could not draw a batch with both positive and negative pairs");
}

EmbeddingState EmbeddingState::from_store(const SegmentEmbeddingStore& store) {
  store.validate();
  EmbeddingState state;
  state.dim = store.dim;
  state.track_ids.reserve(store.tracks.size());
  state.values.reserve(store.tracks.size());
  for (const auto& t : store.tracks) {
    state.track_ids.push_back(t.track_id);
    state.clique_ids.push_back(t.clique_id);
    state.values.emplace_back(t.data.begin(), t.data.end());
  }
  return state;
}

SegmentEmbeddingStore EmbeddingState::to_store() const {
  SegmentEmbeddingStore store;
  store.dim = dim;
  store.tracks.reserve(values.size());
  for (std::size_t t = 0; t < values.size(); ++t) {
    TrackEntry entry;
    entry.track_id = track_ids[t];
    entry.clique_id = clique_ids[t];
    entry.dim = dim;
    entry.data.reserve(values[t].size());
    for (double v : values[t]) entry.data.push_back(static_cast<float>(v));
    store.tracks.push_back(std::move(entry));
  }
  return store;
}

namespace {

// rms distances between the leading segments of two tracks, in 64-bit.
SegmentDistanceMatrix state_pair_distances(const EmbeddingState& state, std::size_t track_a,
                                           std::size_t track_b, std::size_t max_segments) {
  const auto segs = [&](std::size_t track) {
    return std::min(state.values[track].size() / state.dim, max_segments);
  };
  const std::size_t u = segs(track_a);
  const std::size_t v = segs(track_b);
  SegmentDistanceMatrix out(u, v);
  for (std::size_t k = 0; k < u; ++k) {
    std::span<const double> a(state.values[track_a].data() + k * state.dim, state.dim);
    for (std::size_t l = 0; l < v; ++l) {
      std::span<const double> b(state.values[track_b].data() + l * state.dim, state.dim);
      out.set(k, l, segment_distance(a, b, DistanceKind::RmsDiff));
    }
  }
  return out;
}

}  // namespace

StepComputation compute_step(const EmbeddingState& state, const Batch& batch,
                             const TrainConfig& cfg) {
  const std::size_t b = batch.slots.size();

  // One distance matrix per ordered distinct track pair in the batch.
  std::map<std::pair<std::size_t, std::size_t>, SegmentDistanceMatrix> matrices;
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      if (!batch.assignment.is_valid(i, j)) continue;
      const auto key = std::make_pair(batch.slots[i], batch.slots[j]);
      if (matrices.count(key)) continue;
      const auto rev = std::make_pair(key.second, key.first);
      if (auto it = matrices.find(rev); it != matrices.end()) {
        matrices.emplace(key, it->second.transposed());
      } else {
        matrices.emplace(
            key, state_pair_distances(state, key.first, key.second, cfg.segments_per_track));
      }
    }
  }

  StepComputation step;
  ReducedDistanceMatrix reduced(b, b);
  reduced.set_specs(cfg.pos_reduction, cfg.neg_reduction);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      if (!batch.assignment.is_valid(i, j)) continue;
      const bool positive = batch.assignment.is_positive(i, j);
      const auto& matrix = matrices.at({batch.slots[i], batch.slots[j]});
      // bpwr r is clamped to the rectangle like at evaluation time, so short
      // tracks train with the same spec as long ones.
      ReductionSpec spec = positive ? cfg.pos_reduction : cfg.neg_reduction;
      if (spec.kind == ReductionKind::BpwrR)
        spec.r = std::min(spec.r, std::min(matrix.rows(), matrix.cols()));
      if (spec.kind == ReductionKind::BestR)
        spec.r = std::min(spec.r, matrix.rows() * matrix.cols());
      auto selected = reduce_with_selection(matrix, spec);
      reduced.set(i, j, selected.value, positive);
      step.selections.push_back(
          {i, j, positive, selected.value, std::move(selected.cells)});
    }
  }

  const LossReport report = clews_loss_stable(reduced, batch.assignment, cfg.loss);
  step.loss_value = report.value;

  step.grads.resize(state.values.size());
  for (std::size_t t = 0; t < state.values.size(); ++t)
    step.grads[t].assign(state.values[t].size(), 0.0);

  // d loss / d embedding through the frozen selection and the rms formula:
  // for d = rms(a, b), dd/da_t = (a_t - b_t) / (dim * d).
  const auto dim = static_cast<double>(state.dim);
  for (const auto& sel : step.selections) {
    const double g = report.grad_at(sel.i, sel.j);
    if (g == 0.0) continue;
    const std::size_t track_a = batch.slots[sel.i];
    const std::size_t track_b = batch.slots[sel.j];
    const auto& matrix = matrices.at({track_a, track_b});
    for (const auto& cell : sel.cells) {
      const double dist = matrix.at(cell.row, cell.col);
      if (dist <= 0.0) continue;  // zero subgradient at coincident segments
      const double coeff = g * cell.weight / (dim * dist);
      const double* a = state.values[track_a].data() + cell.row * state.dim;
      const double* b = state.values[track_b].data() + cell.col * state.dim;
      double* ga = step.grads[track_a].data() + cell.row * state.dim;
      double* gb = step.grads[track_b].data() + cell.col * state.dim;
      for (std::size_t t = 0; t < state.dim; ++t) {
        const double delta = coeff * (a[t] - b[t]);
        ga[t] += delta;
        gb[t] -= delta;
      }
    }
  }
  return step;
}

TrainResult train_free_embeddings(const SegmentEmbeddingStore& initial,
                                  const VersionCliqueTable& cliques, const TrainConfig& cfg) {
  cfg.validate();
  EmbeddingState state = EmbeddingState::from_store(initial);
  Rng rng(cfg.seed);

  TrainResult result;
  result.trace.reserve(cfg.steps);
  for (std::size_t step_idx = 0; step_idx < cfg.steps; ++step_idx) {
    const Batch batch = sample_batch(initial, cliques, cfg, rng);
    const StepComputation step = compute_step(state, batch, cfg);
    if (!std::isfinite(step.loss_value))
      throw NumericalRangeError("non-finite loss at step " + std::to_string(step_idx));
    for (std::size_t t = 0; t < state.values.size(); ++t) {
      for (std::size_t k = 0; k < state.values[t].size(); ++k) {
        const double g = step.grads[t][k];
        if (!std::isfinite(g))
          throw NumericalRangeError("non-finite gradient at step " + std::to_string(step_idx));
        state.values[t][k] -= cfg.step_size * g;
      }
    }
    result.trace.push_back(step.loss_value);
  }
  result.store = state.to_store();
  return result;
}

SegmentEmbeddingStore randomize_embeddings(const SegmentEmbeddingStore& like, double scale,
                                           std::uint64_t seed) {
  if (!(scale >= 0.0)) throw ParamError("scale must be nonnegative");
  Rng rng(seed);
  SegmentEmbeddingStore out;
  out.dim = like.dim;
  out.tracks.reserve(like.tracks.size());
  for (const auto& t : like.tracks) {
    TrackEntry entry;
    entry.track_id = t.track_id;
    entry.clique_id = t.clique_id;
    entry.dim = t.dim;
    entry.data.reserve(t.data.size());
    for (std::size_t k = 0; k < t.data.size(); ++k)
      entry.data.push_back(static_cast<float>(scale * rng.normal()));
    out.tracks.push_back(std::move(entry));
  }
  return out;
}

std::vector<SweepRow> ablation_sweep(const SegmentEmbeddingStore& corpus,
                                     const VersionCliqueTable& cliques, const SweepGrids& grids,
                                     const TrainConfig& base, const WindowingConfig& eval_cfg,
                                     const ReductionSpec& eval_red) {
  if (grids.pos_reductions.empty() || grids.neg_reductions.empty() || grids.gammas.empty() ||
      grids.epsilons.empty())
    throw ParamError("every sweep grid needs at least one entry");

  const SegmentEmbeddingStore init = randomize_embeddings(corpus, 0.1, base.seed);
  std::vector<SweepRow> rows;
  for (const auto& pos : grids.pos_reductions) {
    for (const auto& neg : grids.neg_reductions) {
      for (double gamma : grids.gammas) {
        for (double epsilon : grids.epsilons) {
          TrainConfig cfg = base;
          cfg.pos_reduction = pos;
          cfg.neg_reduction = neg;
          cfg.loss.gamma = gamma;
          cfg.loss.epsilon = epsilon;
          const TrainResult trained = train_free_embeddings(init, cliques, cfg);
          const MetricsReport report =
              track_level_eval(trained.store, trained.store, cliques, eval_cfg, eval_red);
          SweepRow row;
          row.pos_reduction = pos;
          row.neg_reduction = neg;
          row.gamma = gamma;
          row.epsilon = epsilon;
          for (const auto& r : report.rows) {
            if (r.metric == "nar") row.nar = r.value;
            if (r.metric == "map") row.map = r.value;
          }
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "pos_reduction,neg_reduction,gamma,epsilon,nar,map\n";
  char buf[64];
  for (const auto& row : rows) {
    out += row.pos_reduction.name();
    out += ',';
    out += row.neg_reduction.name();
    std::snprintf(buf, sizeof(buf), ",%.10g,%.10g,%.10g,%.10g\n", row.gamma, row.epsilon,
                  row.nar, row.map);
    out += buf;
  }
  return out;
}

}  // namespace clews
