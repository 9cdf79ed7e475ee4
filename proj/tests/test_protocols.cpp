#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "clews/protocols.hpp"
#include "clews/rng.hpp"
#include "clews/synthetic.hpp"
#include "support/testutil.hpp"

using namespace clews;

namespace {

TrackEntry counting_track(std::size_t length) {
  // Segment k holds the constant vector (k, k).
  TrackEntry t;
  t.track_id = "t";
  t.clique_id = "c";
  t.dim = 2;
  for (std::size_t k = 0; k < length; ++k) {
    t.data.push_back(static_cast<float>(k));
    t.data.push_back(static_cast<float>(k));
  }
  return t;
}

double row_value(const MetricsReport& report, const std::string& metric, std::size_t tau) {
  for (const auto& row : report.rows)
    if (row.metric == metric && row.tau == tau) return row.value;
  throw std::runtime_error("missing report row");
}

SyntheticParams standard_params() {
  SyntheticParams p;
  p.cliques = 50;
  p.tracks_per_clique = 3;
  p.segments_per_track = 8;
  p.dim = 32;
  p.shared_fraction = 0.5;
  p.noise_sigma = 0.1;
  p.seed = 7;
  return p;
}

}  // namespace

TEST_CASE("windowing: track of exactly one window") {
  const auto track = counting_track(4);
  const auto one = window_track(track, 4, 2, 4);
  REQUIRE(one.num_segments() == 1);
  // The single window is the mean of the four cells.
  CHECK(one.segment(0)[0] == doctest::Approx(1.5));

  // Identity windowing leaves segments untouched.
  const auto identity = window_track(track, 1, 1, 1);
  REQUIRE(identity.num_segments() == 4);
  CHECK(identity.data == track.data);
}

TEST_CASE("windowing: length 30, window 20, hop 5 gives starts 0/5/10") {
  const auto track = counting_track(30);
  const auto windows = window_track(track, 20, 5, 20);
  REQUIRE(windows.num_segments() == 3);
  // Full windows: means of 0..19, 5..24, 10..29.
  CHECK(windows.segment(0)[0] == doctest::Approx(9.5));
  CHECK(windows.segment(1)[0] == doctest::Approx(14.5));
  CHECK(windows.segment(2)[0] == doctest::Approx(19.5));
}

TEST_CASE("windowing: non-overlapping cut repeat-pads the short tail") {
  // 150 cells cut into 20-cell windows at hop 20: 8 windows, the last one
  // covering only cells 140..149 and tiled to full length.
  const auto track = counting_track(150);
  const auto windows = window_track(track, 20, 20, 20);
  REQUIRE(windows.num_segments() == 8);
  CHECK(windows.segment(6)[0] == doctest::Approx((120.0 + 139.0) / 2.0));
  // Tiling 10 cells to 20 repeats each exactly twice: mean of 140..149.
  CHECK(windows.segment(7)[0] == doctest::Approx((140.0 + 149.0) / 2.0));
}

TEST_CASE("windowing: short query is repeat-padded up to the native length") {
  const auto track = counting_track(5);
  const auto padded = window_track(track, 5, 5, 20);
  REQUIRE(padded.num_segments() == 1);
  // 5 cells tiled x4: the mean equals the plain mean of the five cells.
  CHECK(padded.segment(0)[0] == doctest::Approx(2.0));

  CHECK_THROWS_AS(window_track(track, 0, 5, 20), ParamError);
  CHECK_THROWS_AS(window_track(track, 5, 0, 20), ParamError);
}

TEST_CASE("track-level eval on a perfect-duplicate corpus") {
  SyntheticParams p = standard_params();
  p.cliques = 10;
  p.shared_fraction = 1.0;
  p.noise_sigma = 0.0;
  const auto store = generate_synthetic_corpus(p);
  const auto cliques = cliques_from_store(store);

  WindowingConfig cfg;
  cfg.segment_len = 1;
  cfg.hop = 1;
  const auto report =
      track_level_eval(store, store, cliques, cfg, ReductionSpec{ReductionKind::Min, 0});
  CHECK(row_value(report, "map", 1) == doctest::Approx(1.0));
  CHECK(row_value(report, "nar", 1) == doctest::Approx(0.0));

  // bpwr-10 gets clamped to the 8x8 rectangles and still ranks duplicates
  // first.
  const auto bpwr_report =
      track_level_eval(store, store, cliques, cfg, ReductionSpec{ReductionKind::BpwrR, 10});
  CHECK(row_value(bpwr_report, "map", 1) == doctest::Approx(1.0));
}

TEST_CASE("zero-shared cliques score like random retrieval") {
  SyntheticParams p = standard_params();
  p.cliques = 30;
  p.shared_fraction = 0.0;
  const auto store = generate_synthetic_corpus(p);
  const auto cliques = cliques_from_store(store);

  WindowingConfig cfg;
  cfg.segment_len = 1;
  cfg.hop = 1;
  const auto report =
      track_level_eval(store, store, cliques, cfg, ReductionSpec{ReductionKind::Min, 0});

  // Monte Carlo baseline: E[AP] for 2 matches among 89 candidates.
  Rng rng(99);
  double baseline = 0.0;
  const int trials = 4000;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<std::size_t> ranks(89);
    std::iota(ranks.begin(), ranks.end(), std::size_t{1});
    rng.shuffle(ranks);
    const auto r1 = std::min(ranks[0], ranks[1]);
    const auto r2 = std::max(ranks[0], ranks[1]);
    baseline += 0.5 * (1.0 / static_cast<double>(r1) + 2.0 / static_cast<double>(r2));
  }
  baseline /= trials;

  const double map_value = row_value(report, "map", 1);
  // Indistinguishable from chance at this sample size (90 queries).
  CHECK(map_value < baseline + 0.05);
  CHECK(map_value > baseline - 0.05);
  CHECK(map_value < 0.3);
}

TEST_CASE("min distances never exceed clamped bpwr-10 distances per query") {
  SyntheticParams p = standard_params();
  p.cliques = 8;
  const auto store = generate_synthetic_corpus(p);
  const auto cliques = cliques_from_store(store);
  WindowingConfig cfg;
  cfg.segment_len = 1;
  cfg.hop = 1;

  const auto min_ranked =
      rank_queries(store, store, cliques, cfg, ReductionSpec{ReductionKind::Min, 0}, 1);
  const auto bpwr_ranked =
      rank_queries(store, store, cliques, cfg, ReductionSpec{ReductionKind::BpwrR, 10}, 1);
  REQUIRE(min_ranked.size() == bpwr_ranked.size());
  for (std::size_t q = 0; q < min_ranked.size(); ++q) {
    // Compare per candidate id (orders can differ).
    std::map<std::string, double> min_by_id;
    for (const auto& c : min_ranked[q].ranked) min_by_id[c.id] = c.distance;
    for (const auto& c : bpwr_ranked[q].ranked) CHECK(min_by_id.at(c.id) <= c.distance);
  }
}

TEST_CASE("segment protocol degenerates to track protocol on single-window tracks") {
  SyntheticParams p = standard_params();
  p.cliques = 6;
  const auto store = generate_synthetic_corpus(p);
  const auto cliques = cliques_from_store(store);

  WindowingConfig cfg;
  cfg.segment_len = 8;  // track length: everything is one window
  cfg.hop = 8;
  cfg.tau_grid = {8};
  const auto seg = segment_level_eval(store, store, cliques, cfg);
  const auto track = track_level_eval(store, store, cliques, cfg,
                                      ReductionSpec{ReductionKind::Min, 0});
  CHECK(row_value(seg, "map", 8) == row_value(track, "map", 8));
  CHECK(row_value(seg, "nar", 8) == row_value(track, "nar", 8));
}

TEST_CASE("segment-level map does not improve as the query shrinks") {
  SyntheticParams p = standard_params();
  const auto store = generate_synthetic_corpus(p);
  const auto cliques = cliques_from_store(store);

  // Queries shorter than the native window degrade monotonically, the
  // analogue of the decline below the trained segment length. (At the
  // native length itself the mean-composed windows dilute the motifs, so
  // tau = segment_len is not part of the monotone claim.)
  WindowingConfig cfg;
  cfg.segment_len = 4;
  cfg.hop = 1;
  cfg.tau_grid = {1, 2, 3};
  const auto report = segment_level_eval(store, store, cliques, cfg);
  const double map1 = row_value(report, "map", 1);
  const double map2 = row_value(report, "map", 2);
  const double map3 = row_value(report, "map", 3);
  CHECK(map1 <= map2);
  CHECK(map2 <= map3);

  // Perfect duplicates stay perfect at every tau.
  SyntheticParams dup = standard_params();
  dup.cliques = 8;
  dup.shared_fraction = 1.0;
  dup.noise_sigma = 0.0;
  const auto dup_store = generate_synthetic_corpus(dup);
  const auto dup_cliques = cliques_from_store(dup_store);
  WindowingConfig dup_cfg;
  dup_cfg.segment_len = 1;
  dup_cfg.hop = 1;
  dup_cfg.tau_grid = {1};
  const auto dup_report = segment_level_eval(dup_store, dup_store, dup_cliques, dup_cfg);
  CHECK(row_value(dup_report, "map", 1) == doctest::Approx(1.0));
}

TEST_CASE("random-segment protocol is seeded, reported, and falls back") {
  SyntheticParams p = standard_params();
  p.cliques = 6;
  const auto store = generate_synthetic_corpus(p);
  const auto cliques = cliques_from_store(store);

  WindowingConfig cfg;
  cfg.segment_len = 4;
  cfg.hop = 1;
  cfg.tau_grid = {2, 12};  // 12 > track length 8: fallback path
  const auto a = random_segment_eval(store, store, cliques, cfg, 5);
  const auto b = random_segment_eval(store, store, cliques, cfg, 5);
  CHECK(a.to_csv() == b.to_csv());
  CHECK(a.to_json() == b.to_json());

  const auto c = random_segment_eval(store, store, cliques, cfg, 6);
  CHECK(a.to_csv() != c.to_csv());

  for (const auto& row : a.rows) {
    if (row.tau == 12) CHECK(row.n_fallback == store.tracks.size());
    if (row.tau == 2) CHECK(row.n_fallback == 0);
  }
}

TEST_CASE("reports carry the spec columns") {
  SyntheticParams p = standard_params();
  p.cliques = 4;
  const auto store = generate_synthetic_corpus(p);
  const auto cliques = cliques_from_store(store);
  WindowingConfig cfg;
  cfg.segment_len = 2;
  cfg.hop = 1;
  cfg.tau_grid = {1, 2};

  const auto report = segment_level_eval(store, store, cliques, cfg);
  REQUIRE(report.rows.size() == 4);  // two taus x two metrics
  const auto csv = report.to_csv();
  CHECK(csv.rfind("protocol,tau,metric,value,ci95,n_queries\n", 0) == 0);
  CHECK(csv.find("segment,1,nar,") != std::string::npos);
  CHECK(csv.find("segment,2,map,") != std::string::npos);
  const auto json = report.to_json();
  CHECK(json.find("\"n_excluded\"") != std::string::npos);
}

TEST_CASE("evaluation is deterministic and excludes the query") {
  SyntheticParams p = standard_params();
  p.cliques = 5;
  const auto store = generate_synthetic_corpus(p);
  const auto cliques = cliques_from_store(store);
  WindowingConfig cfg;
  cfg.segment_len = 1;
  cfg.hop = 1;

  const auto ranked =
      rank_queries(store, store, cliques, cfg, ReductionSpec{ReductionKind::Min, 0}, 1);
  for (const auto& rr : ranked) {
    CHECK(rr.ranked.size() == store.tracks.size() - 1);
    for (const auto& c : rr.ranked) CHECK(c.id != rr.query_id);
  }

  const auto again = track_level_eval(store, store, cliques, cfg,
                                      ReductionSpec{ReductionKind::Min, 0});
  const auto first = track_level_eval(store, store, cliques, cfg,
                                      ReductionSpec{ReductionKind::Min, 0});
  CHECK(again.to_csv() == first.to_csv());
}

TEST_CASE("queries with singleton cliques are excluded and counted") {
  SyntheticParams p = standard_params();
  p.cliques = 4;
  auto store = generate_synthetic_corpus(p);
  // Detach one track into its own clique.
  store.tracks[0].clique_id = "solo";
  const auto cliques = cliques_from_store(store);

  WindowingConfig cfg;
  cfg.segment_len = 1;
  cfg.hop = 1;
  const auto report =
      track_level_eval(store, store, cliques, cfg, ReductionSpec{ReductionKind::Min, 0});
  for (const auto& row : report.rows) {
    CHECK(row.n_excluded == 1);
    CHECK(row.n_queries == store.tracks.size() - 1);
  }
}
