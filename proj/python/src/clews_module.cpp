// Python bindings for the core operations: reductions, losses, metrics,
// the synthetic generator, the CLWS store, evaluation protocols, and the
// free-embedding trainer.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "clews/distance.hpp"
#include "clews/loss.hpp"
#include "clews/metrics.hpp"
#include "clews/protocols.hpp"
#include "clews/reduction.hpp"
#include "clews/storage.hpp"
#include "clews/synthetic.hpp"
#include "clews/trainer.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using MaskArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

clews::SegmentDistanceMatrix to_matrix(const Array& values, const py::object& mask) {
  if (values.ndim() != 2) throw clews::ShapeError("expected a 2-d matrix");
  const auto rows = static_cast<std::size_t>(values.shape(0));
  const auto cols = static_cast<std::size_t>(values.shape(1));
  clews::SegmentDistanceMatrix d(rows, cols);
  const auto v = values.unchecked<2>();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) d.set(r, c, v(r, c));
  if (!mask.is_none()) {
    const MaskArray m = mask.cast<MaskArray>();
    if (m.ndim() != 2 || static_cast<std::size_t>(m.shape(0)) != rows ||
        static_cast<std::size_t>(m.shape(1)) != cols)
      throw clews::ShapeError("mask shape must match the matrix");
    const auto mm = m.unchecked<2>();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) d.set_mask(r, c, mm(r, c));
  }
  return d;
}

struct LossInputs {
  clews::ReducedDistanceMatrix d;
  clews::AssignmentMatrix a;
};

LossInputs to_loss_inputs(const Array& distances, const MaskArray& assignment,
                          const py::object& valid) {
  if (distances.ndim() != 2 || assignment.ndim() != 2)
    throw clews::ShapeError("distances and assignment must be 2-d");
  const auto n = static_cast<std::size_t>(distances.shape(0));
  const auto m = static_cast<std::size_t>(distances.shape(1));
  if (static_cast<std::size_t>(assignment.shape(0)) != n ||
      static_cast<std::size_t>(assignment.shape(1)) != m)
    throw clews::ShapeError("assignment shape must match distances");
  LossInputs inputs{clews::ReducedDistanceMatrix(n, m), clews::AssignmentMatrix(n, m)};
  const auto dv = distances.unchecked<2>();
  const auto av = assignment.unchecked<2>();
  std::optional<MaskArray> valid_arr;
  if (!valid.is_none()) valid_arr = valid.cast<MaskArray>();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (valid_arr && !valid_arr->unchecked<2>()(i, j)) {
        inputs.a.set_valid(i, j, false);
        continue;
      }
      inputs.a.set(i, j, av(i, j));
      inputs.d.set(i, j, dv(i, j), av(i, j));
    }
  }
  return inputs;
}

py::dict report_to_dict(const clews::LossReport& report) {
  py::array_t<double> grad({report.n(), report.m()});
  py::array_t<bool> valid({report.n(), report.m()});
  auto g = grad.mutable_unchecked<2>();
  auto v = valid.mutable_unchecked<2>();
  for (std::size_t i = 0; i < report.n(); ++i) {
    for (std::size_t j = 0; j < report.m(); ++j) {
      g(i, j) = report.grad_at(i, j);
      v(i, j) = report.is_valid(i, j);
    }
  }
  py::dict out;
  out["value"] = report.value;
  out["pos_term"] = report.pos_term;
  out["neg_term"] = report.neg_term;
  out["grad"] = grad;
  out["valid"] = valid;
  return out;
}

clews::RankedRetrieval to_ranked(const std::vector<bool>& match_flags) {
  clews::RankedRetrieval rr;
  rr.query_id = "q";
  rr.ranked.resize(match_flags.size());
  for (std::size_t i = 0; i < match_flags.size(); ++i) {
    rr.ranked[i].id = std::to_string(i);
    rr.ranked[i].distance = static_cast<double>(i);
    rr.ranked[i].is_match = match_flags[i];
  }
  return rr;
}

py::list report_rows(const clews::MetricsReport& report) {
  py::list rows;
  for (const auto& row : report.rows) {
    py::dict r;
    r["protocol"] = row.protocol;
    r["tau"] = row.tau;
    r["metric"] = row.metric;
    r["value"] = row.value;
    r["ci95"] = row.ci95;
    r["n_queries"] = row.n_queries;
    r["n_excluded"] = row.n_excluded;
    r["n_fallback"] = row.n_fallback;
    rows.append(r);
  }
  return rows;
}

clews::WindowingConfig make_cfg(std::size_t segment_len, std::size_t hop,
                                const std::vector<std::size_t>& taus) {
  clews::WindowingConfig cfg;
  cfg.segment_len = segment_len;
  cfg.hop = hop;
  if (!taus.empty()) cfg.tau_grid = taus;
  return cfg;
}

clews::VersionCliqueTable cliques_or_default(const py::object& cliques,
                                             const clews::SegmentEmbeddingStore& store) {
  if (cliques.is_none()) return clews::cliques_from_store(store);
  clews::VersionCliqueTable table;
  for (const auto& [key, value] : cliques.cast<py::dict>())
    table.entries[key.cast<std::string>()] = value.cast<std::string>();
  return table;
}

}  // namespace

PYBIND11_MODULE(_clews, m) {
  m.doc() = "Segment-distance reductions, contrastive loss, retrieval metrics, and "
            "evaluation protocols for version matching experiments";

  py::register_exception<clews::Error>(m, "ClewsError", PyExc_RuntimeError);

  py::class_<clews::TrackEntry>(m, "Track")
      .def_property_readonly("track_id", [](const clews::TrackEntry& t) { return t.track_id; })
      .def_property_readonly("clique_id",
                             [](const clews::TrackEntry& t) { return t.clique_id; })
      .def_property_readonly("num_segments",
                             [](const clews::TrackEntry& t) { return t.num_segments(); })
      .def("embeddings", [](const clews::TrackEntry& t) {
        py::array_t<float> out({t.num_segments(), t.dim});
        auto v = out.mutable_unchecked<2>();
        for (std::size_t k = 0; k < t.num_segments(); ++k)
          for (std::size_t d = 0; d < t.dim; ++d) v(k, d) = t.segment(k)[d];
        return out;
      });

  py::class_<clews::SegmentEmbeddingStore>(m, "Store")
      .def_property_readonly("dim", [](const clews::SegmentEmbeddingStore& s) { return s.dim; })
      .def_property_readonly("tracks",
                             [](const clews::SegmentEmbeddingStore& s) { return s.tracks; })
      .def("save", &clews::save_store, py::arg("path"))
      .def("cliques", [](const clews::SegmentEmbeddingStore& s) {
        py::dict out;
        for (const auto& t : s.tracks) out[py::str(t.track_id)] = t.clique_id;
        return out;
      });

  m.def("load_store", &clews::load_store, py::arg("path"));

  m.def(
      "generate_corpus",
      [](std::size_t cliques, std::size_t tracks_per_clique, std::size_t segments_per_track,
         std::size_t dim, double shared_fraction, double noise_sigma, std::uint64_t seed) {
        clews::SyntheticParams p;
        p.cliques = cliques;
        p.tracks_per_clique = tracks_per_clique;
        p.segments_per_track = segments_per_track;
        p.dim = dim;
        p.shared_fraction = shared_fraction;
        p.noise_sigma = noise_sigma;
        p.seed = seed;
        return clews::generate_synthetic_corpus(p);
      },
      py::arg("cliques") = 50, py::arg("tracks_per_clique") = 3,
      py::arg("segments_per_track") = 8, py::arg("dim") = 32,
      py::arg("shared_fraction") = 0.5, py::arg("noise_sigma") = 0.1, py::arg("seed") = 0);

  m.def(
      "segment_distance",
      [](const Array& a, const Array& b, const std::string& kind) {
        if (a.ndim() != 1 || b.ndim() != 1)
          throw clews::ShapeError("segment_distance expects 1-d vectors");
        std::span<const double> sa(a.data(), static_cast<std::size_t>(a.shape(0)));
        std::span<const double> sb(b.data(), static_cast<std::size_t>(b.shape(0)));
        return clews::segment_distance(sa, sb, clews::parse_distance_kind(kind));
      },
      py::arg("a"), py::arg("b"), py::arg("kind") = "rms");

  m.def(
      "pairwise_distances",
      [](const clews::SegmentEmbeddingStore& store, std::size_t i, std::size_t j,
         const std::string& kind) {
        const auto d = clews::pairwise_track_distances(store.tracks.at(i), store.tracks.at(j),
                                                       clews::parse_distance_kind(kind));
        py::array_t<double> out({d.rows(), d.cols()});
        auto v = out.mutable_unchecked<2>();
        for (std::size_t r = 0; r < d.rows(); ++r)
          for (std::size_t c = 0; c < d.cols(); ++c) v(r, c) = d.at(r, c);
        return out;
      },
      py::arg("store"), py::arg("i"), py::arg("j"), py::arg("kind") = "rms");

  m.def(
      "reduce",
      [](const Array& matrix, const std::string& spec, const py::object& mask) {
        return clews::reduce(to_matrix(matrix, mask), clews::ReductionSpec::parse(spec));
      },
      py::arg("matrix"), py::arg("spec"), py::arg("mask") = py::none(),
      "Reduce a distance matrix with 'mean', 'min', 'meanmin', 'best-R', or 'bpwr-R'");

  m.def(
      "bpwr_picks",
      [](const Array& matrix, std::size_t r, const py::object& mask) {
        py::list out;
        for (const auto& pick : clews::bpwr_picks(to_matrix(matrix, mask), r))
          out.append(py::make_tuple(pick.row, pick.col, pick.value));
        return out;
      },
      py::arg("matrix"), py::arg("r"), py::arg("mask") = py::none());

  m.def(
      "clews_loss",
      [](const Array& distances, const MaskArray& assignment, double gamma, double epsilon,
         bool stable, double stable_b, const py::object& valid) {
        auto inputs = to_loss_inputs(distances, assignment, valid);
        clews::LossParams p;
        p.gamma = gamma;
        p.epsilon = epsilon;
        p.stable_b = stable_b;
        return report_to_dict(stable ? clews::clews_loss_stable(inputs.d, inputs.a, p)
                                     : clews::clews_loss(inputs.d, inputs.a, p));
      },
      py::arg("distances"), py::arg("assignment"), py::arg("gamma") = 5.0,
      py::arg("epsilon") = 1e-6, py::arg("stable") = false, py::arg("stable_b") = 10.0,
      py::arg("valid") = py::none());

  m.def(
      "au_loss",
      [](const Array& distances, const MaskArray& assignment, double alpha, double lambda,
         double gamma, const py::object& valid) {
        auto inputs = to_loss_inputs(distances, assignment, valid);
        clews::BaselineAUParams p;
        p.alpha = alpha;
        p.lambda = lambda;
        p.gamma = gamma;
        return report_to_dict(clews::au_decoupled_loss(inputs.d, inputs.a, p));
      },
      py::arg("distances"), py::arg("assignment"), py::arg("alpha") = 2.0,
      py::arg("lambda") = 1.0, py::arg("gamma") = 3.0, py::arg("valid") = py::none());

  m.def(
      "gradient_curve",
      [](double gamma, double epsilon, std::size_t set_size, std::size_t points) {
        clews::LossParams p;
        p.gamma = gamma;
        p.epsilon = epsilon;
        const auto distances = clews::default_curve_distances(p, points);
        const auto curve = clews::gradient_curve(p, set_size, distances);
        py::list out;
        for (const auto& pt : curve)
          out.append(py::make_tuple(pt.potential, pt.grad, pt.distance));
        return out;
      },
      py::arg("gamma") = 5.0, py::arg("epsilon") = 1e-6, py::arg("set_size") = 128,
      py::arg("points") = 512);

  m.def(
      "nar",
      [](const std::vector<std::vector<bool>>& queries) {
        std::vector<clews::RankedRetrieval> rrs;
        rrs.reserve(queries.size());
        for (const auto& flags : queries) rrs.push_back(to_ranked(flags));
        const auto agg = clews::nar(rrs);
        return py::make_tuple(agg.value, agg.ci95, agg.n_used, agg.n_excluded);
      },
      py::arg("queries"),
      "Corrected NAR over queries given per-rank match flags; returns "
      "(value, ci95, n_used, n_excluded)");

  m.def(
      "nar_q",
      [](const std::vector<bool>& flags) { return clews::nar_q(to_ranked(flags)); },
      py::arg("match_flags"));

  m.def(
      "mean_average_precision",
      [](const std::vector<std::vector<bool>>& queries) {
        std::vector<clews::RankedRetrieval> rrs;
        rrs.reserve(queries.size());
        for (const auto& flags : queries) rrs.push_back(to_ranked(flags));
        const auto agg = clews::mean_average_precision(rrs);
        return py::make_tuple(agg.value, agg.ci95, agg.n_used, agg.n_excluded);
      },
      py::arg("queries"));

  m.def(
      "average_precision",
      [](const std::vector<bool>& flags) { return clews::average_precision(to_ranked(flags)); },
      py::arg("match_flags"));

  m.def(
      "track_level_eval",
      [](const clews::SegmentEmbeddingStore& queries,
         const clews::SegmentEmbeddingStore& candidates, const std::string& reduction,
         std::size_t segment_len, std::size_t hop, const py::object& cliques) {
        const auto table = cliques_or_default(cliques, candidates);
        return report_rows(clews::track_level_eval(queries, candidates, table,
                                                   make_cfg(segment_len, hop, {}),
                                                   clews::ReductionSpec::parse(reduction)));
      },
      py::arg("queries"), py::arg("candidates"), py::arg("reduction") = "bpwr-10",
      py::arg("segment_len") = 20, py::arg("hop") = 5, py::arg("cliques") = py::none());

  m.def(
      "segment_level_eval",
      [](const clews::SegmentEmbeddingStore& queries,
         const clews::SegmentEmbeddingStore& candidates, const std::vector<std::size_t>& taus,
         std::size_t segment_len, std::size_t hop, const py::object& cliques) {
        const auto table = cliques_or_default(cliques, candidates);
        return report_rows(clews::segment_level_eval(queries, candidates, table,
                                                     make_cfg(segment_len, hop, taus)));
      },
      py::arg("queries"), py::arg("candidates"), py::arg("taus"), py::arg("segment_len") = 20,
      py::arg("hop") = 5, py::arg("cliques") = py::none());

  m.def(
      "random_segment_eval",
      [](const clews::SegmentEmbeddingStore& queries,
         const clews::SegmentEmbeddingStore& candidates, const std::vector<std::size_t>& taus,
         std::size_t segment_len, std::size_t hop, std::uint64_t seed,
         const py::object& cliques) {
        const auto table = cliques_or_default(cliques, candidates);
        return report_rows(clews::random_segment_eval(queries, candidates, table,
                                                      make_cfg(segment_len, hop, taus), seed));
      },
      py::arg("queries"), py::arg("candidates"), py::arg("taus"), py::arg("segment_len") = 20,
      py::arg("hop") = 5, py::arg("seed") = 0, py::arg("cliques") = py::none());

  m.def("randomize_embeddings", &clews::randomize_embeddings, py::arg("like"),
        py::arg("scale") = 0.1, py::arg("seed") = 0);

  m.def(
      "train_free_embeddings",
      [](const clews::SegmentEmbeddingStore& initial, std::size_t anchors,
         std::size_t positives, std::size_t segments, const std::string& pos_reduction,
         const std::string& neg_reduction, double gamma, double epsilon, double step_size,
         std::size_t steps, std::uint64_t seed, const py::object& cliques) {
        clews::TrainConfig cfg;
        cfg.anchors_per_batch = anchors;
        cfg.positives_per_anchor = positives;
        cfg.segments_per_track = segments;
        cfg.pos_reduction = clews::ReductionSpec::parse(pos_reduction);
        cfg.neg_reduction = clews::ReductionSpec::parse(neg_reduction);
        cfg.loss.gamma = gamma;
        cfg.loss.epsilon = epsilon;
        cfg.step_size = step_size;
        cfg.steps = steps;
        cfg.seed = seed;
        const auto table = cliques_or_default(cliques, initial);
        auto result = clews::train_free_embeddings(initial, table, cfg);
        return py::make_tuple(result.store, result.trace);
      },
      py::arg("initial"), py::arg("anchors") = 25, py::arg("positives") = 3,
      py::arg("segments") = 8, py::arg("pos_reduction") = "bpwr-5",
      py::arg("neg_reduction") = "min", py::arg("gamma") = 5.0, py::arg("epsilon") = 1e-6,
      py::arg("step_size") = 10.0, py::arg("steps") = 1000, py::arg("seed") = 0,
      py::arg("cliques") = py::none());
}
