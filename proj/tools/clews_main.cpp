// clews: reproducible command-line runs over the library. Every command
// resolves its flags into a manifest (config + seed + artifact hashes) so
// reruns can be compared byte for byte.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "clews/loss.hpp"
#include "clews/manifest.hpp"
#include "clews/protocols.hpp"
#include "clews/reduction.hpp"
#include "clews/storage.hpp"
#include "clews/synthetic.hpp"
#include "clews/trainer.hpp"

namespace {

using clews::ReductionSpec;

constexpr int kExitSuccess = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw clews::IoError("cannot write '" + path.string() + "'");
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Headerless CSV of reals; "M" (or "m") marks a masked cell.
clews::SegmentDistanceMatrix load_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw clews::IoError("cannot open '" + path.string() + "'");
  std::vector<std::vector<std::pair<double, bool>>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::pair<double, bool>> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto begin = cell.find_first_not_of(" \t");
      const auto end = cell.find_last_not_of(" \t");
      if (begin == std::string::npos) throw clews::FormatError("empty cell in matrix CSV");
      const std::string token = cell.substr(begin, end - begin + 1);
      if (token == "M" || token == "m") {
        row.emplace_back(0.0, false);
      } else {
        try {
          row.emplace_back(std::stod(token), true);
        } catch (const std::exception&) {
          throw clews::FormatError("bad matrix cell '" + token + "'");
        }
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw clews::FormatError("matrix CSV is empty");
  const std::size_t cols = rows.front().size();
  for (const auto& row : rows)
    if (row.size() != cols) throw clews::FormatError("ragged matrix CSV");
  clews::SegmentDistanceMatrix d(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      d.set(r, c, rows[r][c].first);
      d.set_mask(r, c, rows[r][c].second);
    }
  }
  return d;
}

clews::VersionCliqueTable resolve_cliques(const std::string& cliques_path,
                                          const clews::SegmentEmbeddingStore& store) {
  if (cliques_path.empty()) return clews::cliques_from_store(store);
  return clews::load_clique_tsv(cliques_path);
}

// -------- generate --------

struct GenerateArgs {
  clews::SyntheticParams params;
  std::string out = "corpus";
};

int run_generate(const GenerateArgs& args) {
  const auto store = clews::generate_synthetic_corpus(args.params);
  const auto clws = args.out + ".clws";
  const auto tsv = args.out + ".tsv";
  clews::save_store(store, clws);
  clews::save_clique_tsv(clews::cliques_from_store(store), tsv);

  clews::RunManifest manifest;
  manifest.command = "generate";
  manifest.seed = args.params.seed;
  manifest.config = {
      {"cliques", std::to_string(args.params.cliques)},
      {"tracks", std::to_string(args.params.tracks_per_clique)},
      {"segments", std::to_string(args.params.segments_per_track)},
      {"dim", std::to_string(args.params.dim)},
      {"shared", format_value(args.params.shared_fraction)},
      {"noise", format_value(args.params.noise_sigma)},
      {"out", args.out},
  };
  manifest.add_artifact(clws);
  manifest.add_artifact(tsv);
  manifest.write(args.out + ".manifest.json");
  std::printf("wrote %s (%zu tracks), %s\n", clws.c_str(), store.tracks.size(), tsv.c_str());
  return kExitSuccess;
}

// -------- reduce --------

struct ReduceArgs {
  std::string matrix_path;
  std::string kind = "min";
  std::size_t r = 0;
  std::string out;
};

int run_reduce(const ReduceArgs& args) {
  const auto matrix = load_matrix_csv(args.matrix_path);
  ReductionSpec spec;
  if (args.kind == "best" || args.kind == "bpwr") {
    spec = ReductionSpec::parse(args.kind + "-" + std::to_string(args.r));
  } else {
    spec = ReductionSpec::parse(args.kind);
  }
  const double value = clews::reduce(matrix, spec);
  std::printf("%.4f\n", value);

  if (!args.out.empty()) {
    char body[64];
    std::snprintf(body, sizeof(body), "%.17g\n", value);
    write_text(args.out + ".txt", body);
    clews::RunManifest manifest;
    manifest.command = "reduce";
    manifest.config = {{"matrix", args.matrix_path},
                       {"reduction", spec.name()},
                       {"out", args.out}};
    manifest.add_artifact(args.out + ".txt");
    manifest.write(args.out + ".manifest.json");
  }
  return kExitSuccess;
}

// -------- loss-eval --------

struct LossEvalArgs {
  std::string batch_path;
  std::string loss;  // empty: take from the batch file (default clews)
  std::string out = "loss";
};

int run_loss_eval(const LossEvalArgs& args) {
  std::ifstream in(args.batch_path);
  if (!in) throw clews::IoError("cannot open '" + args.batch_path + "'");
  nlohmann::json batch;
  try {
    in >> batch;
  } catch (const nlohmann::json::exception& e) {
    throw clews::FormatError("bad batch JSON: " + std::string(e.what()));
  }

  const auto& dists = batch.at("distances");
  const std::size_t n = dists.size();
  if (n == 0) throw clews::FormatError("batch has no distance rows");
  const std::size_t m = dists.at(0).size();
  clews::ReducedDistanceMatrix d(n, m);
  clews::AssignmentMatrix a(n, m);
  const auto& assign = batch.at("assignment");
  const bool has_valid = batch.contains("valid");
  for (std::size_t i = 0; i < n; ++i) {
    if (dists.at(i).size() != m || assign.at(i).size() != m)
      throw clews::FormatError("ragged batch matrices");
    for (std::size_t j = 0; j < m; ++j) {
      if (has_valid && batch["valid"].at(i).at(j).get<int>() == 0) {
        a.set_valid(i, j, false);
        continue;
      }
      const bool positive = assign.at(i).at(j).get<int>() != 0;
      a.set(i, j, positive);
      d.set(i, j, dists.at(i).at(j).get<double>(), positive);
    }
  }

  std::string loss_name = args.loss;
  if (loss_name.empty()) loss_name = batch.value("loss", "clews");

  clews::LossReport report;
  if (loss_name == "clews" || loss_name == "clews-stable") {
    clews::LossParams p;
    p.gamma = batch.value("gamma", p.gamma);
    p.epsilon = batch.value("epsilon", p.epsilon);
    p.stable_b = batch.value("b", p.stable_b);
    report =
        loss_name == "clews" ? clews::clews_loss(d, a, p) : clews::clews_loss_stable(d, a, p);
  } else if (loss_name == "au") {
    clews::BaselineAUParams p;
    p.alpha = batch.value("alpha", p.alpha);
    p.lambda = batch.value("lambda", p.lambda);
    p.gamma = batch.value("gamma", p.gamma);
    report = clews::au_decoupled_loss(d, a, p);
  } else {
    throw clews::ParamError("unknown loss '" + loss_name + "'");
  }

  nlohmann::json grad = nlohmann::json::array();
  for (const auto& entry : report.entries())
    grad.push_back({{"i", entry.i}, {"j", entry.j}, {"g", entry.grad}});
  const nlohmann::json out{{"loss", loss_name},
                           {"value", report.value},
                           {"pos_term", report.pos_term},
                           {"neg_term", report.neg_term},
                           {"grad", grad}};
  const auto json_path = args.out + ".json";
  write_text(json_path, out.dump(2) + "\n");
  std::printf("%s value = %s -> %s\n", loss_name.c_str(), format_value(report.value).c_str(),
              json_path.c_str());

  clews::RunManifest manifest;
  manifest.command = "loss-eval";
  manifest.config = {{"batch", args.batch_path}, {"loss", loss_name}, {"out", args.out}};
  manifest.add_artifact(json_path);
  manifest.write(args.out + ".manifest.json");
  return kExitSuccess;
}

// -------- grad-curve --------

struct GradCurveArgs {
  double gamma = 5.0;
  double epsilon = 1e-6;
  std::size_t set_size = 128;
  std::size_t points = 512;
  std::string out = "grad-curve";
};

int run_grad_curve(const GradCurveArgs& args) {
  clews::LossParams p;
  p.gamma = args.gamma;
  p.epsilon = args.epsilon;
  const auto distances = clews::default_curve_distances(p, args.points);
  const auto curve = clews::gradient_curve(p, args.set_size, distances);

  std::string csv = "potential,grad,distance\n";
  char buf[128];
  for (const auto& pt : curve) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g\n", pt.potential, pt.grad, pt.distance);
    csv += buf;
  }
  const auto csv_path = args.out + ".csv";
  write_text(csv_path, csv);
  std::printf("wrote %s (%zu points)\n", csv_path.c_str(), curve.size());

  clews::RunManifest manifest;
  manifest.command = "grad-curve";
  manifest.config = {{"gamma", format_value(args.gamma)},
                     {"epsilon", format_value(args.epsilon)},
                     {"set_size", std::to_string(args.set_size)},
                     {"points", std::to_string(args.points)},
                     {"out", args.out}};
  manifest.add_artifact(csv_path);
  manifest.write(args.out + ".manifest.json");
  return kExitSuccess;
}

// -------- evaluate --------

struct EvaluateArgs {
  std::string queries_path;
  std::string candidates_path;
  std::string cliques_path;
  std::string protocol = "track";
  std::string reduction = "bpwr-10";
  std::vector<std::size_t> taus;
  std::size_t segment_len = 20;
  std::size_t hop = 5;
  std::uint64_t seed = 0;
  std::string out = "eval";
};

int run_evaluate(const EvaluateArgs& args) {
  const auto queries = clews::load_store(args.queries_path);
  const auto candidates =
      args.candidates_path.empty() || args.candidates_path == args.queries_path
          ? queries
          : clews::load_store(args.candidates_path);
  const auto cliques = resolve_cliques(args.cliques_path, candidates);

  clews::WindowingConfig cfg;
  cfg.segment_len = args.segment_len;
  cfg.hop = args.hop;
  if (!args.taus.empty()) cfg.tau_grid = args.taus;

  clews::MetricsReport report;
  if (args.protocol == "track") {
    report = clews::track_level_eval(queries, candidates, cliques, cfg,
                                     ReductionSpec::parse(args.reduction));
  } else if (args.protocol == "segment") {
    report = clews::segment_level_eval(queries, candidates, cliques, cfg);
  } else {
    report = clews::random_segment_eval(queries, candidates, cliques, cfg, args.seed);
  }

  const auto csv_path = args.out + ".csv";
  const auto json_path = args.out + ".json";
  write_text(csv_path, report.to_csv());
  write_text(json_path, report.to_json());
  for (const auto& row : report.rows)
    std::printf("%s tau=%zu %s = %s (ci95 %s, n=%zu)\n", row.protocol.c_str(), row.tau,
                row.metric.c_str(), format_value(row.value).c_str(),
                format_value(row.ci95).c_str(), row.n_queries);

  clews::RunManifest manifest;
  manifest.command = "evaluate";
  manifest.seed = args.seed;
  std::string tau_list;
  for (std::size_t t : cfg.tau_grid)
    tau_list += (tau_list.empty() ? "" : ",") + std::to_string(t);
  manifest.config = {{"queries", args.queries_path},
                     {"candidates", args.candidates_path.empty() ? args.queries_path
                                                                 : args.candidates_path},
                     {"cliques", args.cliques_path},
                     {"protocol", args.protocol},
                     {"reduction", args.reduction},
                     {"taus", tau_list},
                     {"segment_len", std::to_string(args.segment_len)},
                     {"hop", std::to_string(args.hop)},
                     {"out", args.out}};
  manifest.add_artifact(csv_path);
  manifest.add_artifact(json_path);
  manifest.write(args.out + ".manifest.json");
  return kExitSuccess;
}

// -------- train-toy --------

struct TrainArgs {
  std::string store_path;
  std::string cliques_path;
  clews::TrainConfig cfg;
  bool init_from_store = false;
  double init_scale = 0.1;
  std::uint64_t init_seed = 0;
  std::string out = "trained";
};

int run_train(const TrainArgs& args) {
  const auto corpus = clews::load_store(args.store_path);
  const auto cliques = resolve_cliques(args.cliques_path, corpus);
  const auto init = args.init_from_store
                        ? corpus
                        : clews::randomize_embeddings(corpus, args.init_scale, args.init_seed);

  const auto result = clews::train_free_embeddings(init, cliques, args.cfg);

  const auto store_path = args.out + ".clws";
  clews::save_store(result.store, store_path);
  std::string trace = "step,loss\n";
  char buf[64];
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, result.trace[i]);
    trace += buf;
  }
  const auto trace_path = args.out + ".trace.csv";
  write_text(trace_path, trace);
  std::printf("trained %zu steps; final loss %s; wrote %s, %s\n", result.trace.size(),
              result.trace.empty() ? "n/a" : format_value(result.trace.back()).c_str(),
              store_path.c_str(), trace_path.c_str());

  clews::RunManifest manifest;
  manifest.command = "train-toy";
  manifest.seed = args.cfg.seed;
  manifest.config = {
      {"store", args.store_path},
      {"cliques", args.cliques_path},
      {"anchors", std::to_string(args.cfg.anchors_per_batch)},
      {"positives", std::to_string(args.cfg.positives_per_anchor)},
      {"segments", std::to_string(args.cfg.segments_per_track)},
      {"pos_reduction", args.cfg.pos_reduction.name()},
      {"neg_reduction", args.cfg.neg_reduction.name()},
      {"gamma", format_value(args.cfg.loss.gamma)},
      {"epsilon", format_value(args.cfg.loss.epsilon)},
      {"stable_b", format_value(args.cfg.loss.stable_b)},
      {"step_size", format_value(args.cfg.step_size)},
      {"steps", std::to_string(args.cfg.steps)},
      {"init", args.init_from_store ? "store" : "random"},
      {"init_scale", format_value(args.init_scale)},
      {"init_seed", std::to_string(args.init_seed)},
      {"out", args.out},
  };
  manifest.add_artifact(store_path);
  manifest.add_artifact(trace_path);
  manifest.write(args.out + ".manifest.json");
  return kExitSuccess;
}

// -------- sweep --------

struct SweepArgs {
  std::string store_path;
  std::string cliques_path;
  std::vector<std::string> pos_reductions{"bpwr-5"};
  std::vector<std::string> neg_reductions{"min"};
  std::vector<double> gammas{5.0};
  std::vector<double> epsilons{1e-6};
  clews::TrainConfig base;
  std::size_t eval_segment_len = 1;
  std::size_t eval_hop = 1;
  std::string eval_reduction = "bpwr-10";
  std::string out = "sweep";
};

int run_sweep(const SweepArgs& args) {
  const auto corpus = clews::load_store(args.store_path);
  const auto cliques = resolve_cliques(args.cliques_path, corpus);

  clews::SweepGrids grids;
  for (const auto& name : args.pos_reductions)
    grids.pos_reductions.push_back(ReductionSpec::parse(name));
  for (const auto& name : args.neg_reductions)
    grids.neg_reductions.push_back(ReductionSpec::parse(name));
  grids.gammas = args.gammas;
  grids.epsilons = args.epsilons;

  clews::WindowingConfig eval_cfg;
  eval_cfg.segment_len = args.eval_segment_len;
  eval_cfg.hop = args.eval_hop;

  const auto rows = clews::ablation_sweep(corpus, cliques, grids, args.base, eval_cfg,
                                          ReductionSpec::parse(args.eval_reduction));
  const auto csv_path = args.out + ".csv";
  write_text(csv_path, clews::sweep_to_csv(rows));
  for (const auto& row : rows)
    std::printf("pos=%s neg=%s gamma=%s eps=%s -> NAR=%s MAP=%s\n",
                row.pos_reduction.name().c_str(), row.neg_reduction.name().c_str(),
                format_value(row.gamma).c_str(), format_value(row.epsilon).c_str(),
                format_value(row.nar).c_str(), format_value(row.map).c_str());

  clews::RunManifest manifest;
  manifest.command = "sweep";
  manifest.seed = args.base.seed;
  auto join_strings = [](const std::vector<std::string>& items) {
    std::string s;
    for (const auto& item : items) s += (s.empty() ? "" : ",") + item;
    return s;
  };
  auto join_doubles = [](const std::vector<double>& items) {
    std::string s;
    for (double item : items) s += (s.empty() ? "" : ",") + format_value(item);
    return s;
  };
  manifest.config = {
      {"store", args.store_path},
      {"pos_reductions", join_strings(args.pos_reductions)},
      {"neg_reductions", join_strings(args.neg_reductions)},
      {"gammas", join_doubles(args.gammas)},
      {"epsilons", join_doubles(args.epsilons)},
      {"steps", std::to_string(args.base.steps)},
      {"step_size", format_value(args.base.step_size)},
      {"out", args.out},
  };
  manifest.add_artifact(csv_path);
  manifest.write(args.out + ".manifest.json");
  return kExitSuccess;
}

void add_train_flags(CLI::App* cmd, clews::TrainConfig& cfg) {
  cmd->add_option("--anchors", cfg.anchors_per_batch, "Anchors per batch")
      ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
  cmd->add_option("--positives", cfg.positives_per_anchor, "Positives sampled per anchor")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--segments", cfg.segments_per_track,
                  "Segments of each track used per batch")
      ->check(CLI::PositiveNumber);
  cmd->add_option_function<std::string>(
      "--pos-reduction",
      [&cfg](const std::string& v) { cfg.pos_reduction = ReductionSpec::parse(v); },
      "Positive reduction (mean|min|meanmin|best-R|bpwr-R)");
  cmd->add_option_function<std::string>(
      "--neg-reduction",
      [&cfg](const std::string& v) { cfg.neg_reduction = ReductionSpec::parse(v); },
      "Negative reduction (mean|min|meanmin|best-R|bpwr-R)");
  cmd->add_option("--gamma", cfg.loss.gamma, "Loss gamma")->check(CLI::PositiveNumber);
  cmd->add_option("--epsilon", cfg.loss.epsilon, "Loss epsilon")->check(CLI::PositiveNumber);
  cmd->add_option("--stable-b", cfg.loss.stable_b, "log1p-form exponent cap");
  cmd->add_option("--step-size", cfg.step_size, "Gradient-descent step size")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--steps", cfg.steps, "Training steps");
  cmd->add_option("--seed", cfg.seed, "Training seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segment-level version matching: reductions, contrastive loss, metrics, "
               "evaluation protocols, and a desk-scale trainer"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand("generate", "Generate a synthetic version-clique corpus");
  cmd_gen->add_option("--cliques", gen.params.cliques, "Clique count")
      ->check(CLI::PositiveNumber);
  cmd_gen->add_option("--tracks", gen.params.tracks_per_clique, "Tracks per clique")
      ->check(CLI::PositiveNumber);
  cmd_gen->add_option("--segments", gen.params.segments_per_track, "Segments per track")
      ->check(CLI::PositiveNumber);
  cmd_gen->add_option("--dim", gen.params.dim, "Embedding dimension")
      ->check(CLI::PositiveNumber);
  cmd_gen->add_option("--shared", gen.params.shared_fraction, "Shared motif fraction in [0,1]")
      ->check(CLI::Range(0.0, 1.0));
  cmd_gen->add_option("--noise", gen.params.noise_sigma, "Motif noise sigma")
      ->check(CLI::NonNegativeNumber);
  cmd_gen->add_option("--seed", gen.params.seed, "Generator seed");
  cmd_gen->add_option("--out", gen.out, "Output prefix");

  ReduceArgs red;
  auto* cmd_red = app.add_subcommand("reduce", "Reduce a masked distance matrix to a scalar");
  cmd_red->add_option("--matrix", red.matrix_path, "Headerless CSV; M marks masked cells")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_red->add_option("--kind", red.kind, "mean|min|meanmin|best|bpwr")
      ->check(CLI::IsMember({"mean", "min", "meanmin", "best", "bpwr"}));
  cmd_red->add_option("--r", red.r, "r for best/bpwr");
  cmd_red->add_option("--out", red.out, "Optional output prefix");

  LossEvalArgs loss;
  auto* cmd_loss = app.add_subcommand("loss-eval", "Evaluate a loss on a batch JSON file");
  cmd_loss->add_option("--batch", loss.batch_path, "Batch JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_loss->add_option("--loss", loss.loss, "clews|clews-stable|au (overrides the batch file)")
      ->check(CLI::IsMember({"clews", "clews-stable", "au"}));
  cmd_loss->add_option("--out", loss.out, "Output prefix");

  GradCurveArgs curve;
  auto* cmd_curve = app.add_subcommand("grad-curve", "Emit the negative-gradient curve CSV");
  cmd_curve->add_option("--gamma", curve.gamma, "Loss gamma")->check(CLI::PositiveNumber);
  cmd_curve->add_option("--epsilon", curve.epsilon, "Loss epsilon")->check(CLI::PositiveNumber);
  cmd_curve->add_option("--set-size", curve.set_size, "Negative set size |A-|")
      ->check(CLI::PositiveNumber);
  cmd_curve->add_option("--points", curve.points, "Curve sample count");
  cmd_curve->add_option("--out", curve.out, "Output prefix");

  EvaluateArgs eval;
  auto* cmd_eval = app.add_subcommand("evaluate", "Run a retrieval evaluation protocol");
  cmd_eval->add_option("--queries", eval.queries_path, "Query CLWS store")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_eval->add_option("--candidates", eval.candidates_path,
                       "Candidate CLWS store (defaults to the queries)");
  cmd_eval->add_option("--cliques", eval.cliques_path,
                       "Clique TSV (defaults to the store's clique ids)");
  cmd_eval->add_option("--protocol", eval.protocol, "track|segment|random")
      ->check(CLI::IsMember({"track", "segment", "random"}));
  cmd_eval->add_option("--reduction", eval.reduction, "Track-protocol reduction");
  cmd_eval->add_option("--taus", eval.taus, "Query lengths for segment/random protocols")
      ->delimiter(',');
  cmd_eval->add_option("--segment-len", eval.segment_len, "Native window length (units)")
      ->check(CLI::PositiveNumber);
  cmd_eval->add_option("--hop", eval.hop, "Window hop (units)")->check(CLI::PositiveNumber);
  cmd_eval->add_option("--seed", eval.seed, "Random-protocol seed");
  cmd_eval->add_option("--out", eval.out, "Output prefix");

  TrainArgs train;
  auto* cmd_train = app.add_subcommand("train-toy", "Optimize free embeddings on a corpus");
  cmd_train->add_option("--store", train.store_path, "Corpus CLWS store")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_train->add_option("--cliques", train.cliques_path, "Clique TSV");
  add_train_flags(cmd_train, train.cfg);
  cmd_train->add_flag("--init-from-store", train.init_from_store,
                      "Start from the store's values instead of a random init");
  cmd_train->add_option("--init-scale", train.init_scale, "Random init scale")
      ->check(CLI::NonNegativeNumber);
  cmd_train->add_option("--init-seed", train.init_seed, "Random init seed");
  cmd_train->add_option("--out", train.out, "Output prefix");

  SweepArgs sweep;
  auto* cmd_sweep =
      app.add_subcommand("sweep", "Train and evaluate over a hyper-parameter grid");
  cmd_sweep->add_option("--store", sweep.store_path, "Corpus CLWS store")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_sweep->add_option("--cliques", sweep.cliques_path, "Clique TSV");
  cmd_sweep->add_option("--pos-reductions", sweep.pos_reductions, "Positive reduction grid")
      ->delimiter(',');
  cmd_sweep->add_option("--neg-reductions", sweep.neg_reductions, "Negative reduction grid")
      ->delimiter(',');
  cmd_sweep->add_option("--gammas", sweep.gammas, "Gamma grid")->delimiter(',');
  cmd_sweep->add_option("--epsilons", sweep.epsilons, "Epsilon grid")->delimiter(',');
  add_train_flags(cmd_sweep, sweep.base);
  cmd_sweep->add_option("--eval-segment-len", sweep.eval_segment_len, "Eval window length");
  cmd_sweep->add_option("--eval-hop", sweep.eval_hop, "Eval hop");
  cmd_sweep->add_option("--eval-reduction", sweep.eval_reduction, "Eval reduction");
  cmd_sweep->add_option("--out", sweep.out, "Output prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(cmd_gen)) return run_generate(gen);
    if (app.got_subcommand(cmd_red)) return run_reduce(red);
    if (app.got_subcommand(cmd_loss)) return run_loss_eval(loss);
    if (app.got_subcommand(cmd_curve)) return run_grad_curve(curve);
    if (app.got_subcommand(cmd_eval)) {
      // The segment and random protocols fix the min reduction.
      if (eval.protocol != "track" && cmd_eval->count("--reduction") > 0 &&
          eval.reduction != "min") {
        std::fprintf(stderr, "error: the %s protocol uses the min reduction\n",
                     eval.protocol.c_str());
        return kExitUsage;
      }
      return run_evaluate(eval);
    }
    if (app.got_subcommand(cmd_train)) return run_train(train);
    if (app.got_subcommand(cmd_sweep)) return run_sweep(sweep);
  } catch (const clews::ParamError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const clews::FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const clews::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
