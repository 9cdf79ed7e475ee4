#include <doctest.h>

#include <numeric>

#include "clews/metrics.hpp"
#include "clews/rng.hpp"
#include "support/testutil.hpp"

using namespace clews;

namespace {

// Retrieval with |R| candidates whose match positions (1-based ranks) are
// given explicitly.
RankedRetrieval at_ranks(std::size_t total, const std::vector<std::size_t>& match_ranks) {
  RankedRetrieval rr;
  rr.query_id = "q";
  rr.ranked.resize(total);
  for (std::size_t pos = 0; pos < total; ++pos) {
    rr.ranked[pos].id = "c" + std::to_string(pos);
    rr.ranked[pos].distance = static_cast<double>(pos);
  }
  for (std::size_t rank : match_ranks) rr.ranked[rank - 1].is_match = true;
  return rr;
}

}  // namespace

TEST_CASE("nar_q hits the corrected bounds") {
  CHECK(nar_q(at_ranks(5, {1, 2})) == 0.0);
  CHECK(nar_q(at_ranks(5, {4, 5})) == 100.0);
  CHECK(nar_q(at_ranks(5, {1, 3})) == doctest::Approx(100.0 / 6.0));

  CHECK_THROWS_AS(nar_q(at_ranks(5, {})), UndefinedMetricError);
  CHECK_THROWS_AS(nar_q(at_ranks(3, {1, 2, 3})), UndefinedMetricError);
}

TEST_CASE("nar extremes are exact for every match-set size up to |R| = 7") {
  for (std::size_t total = 2; total <= 7; ++total) {
    for (std::size_t m = 1; m <= total - 1; ++m) {
      std::vector<std::size_t> best(m), worst(m);
      std::iota(best.begin(), best.end(), std::size_t{1});
      std::iota(worst.begin(), worst.end(), total - m + 1);
      CHECK(nar_q(at_ranks(total, best)) == 0.0);
      CHECK(nar_q(at_ranks(total, worst)) == 100.0);
    }
  }
}

TEST_CASE("nar is invariant to non-match permutations and monotone transforms") {
  // Only match ranks matter: any candidate list with matches at ranks 2, 4
  // out of 6 scores the same.
  const double expected = nar_q(at_ranks(6, {2, 4}));
  auto shuffled = at_ranks(6, {2, 4});
  std::swap(shuffled.ranked[0].id, shuffled.ranked[4].id);
  CHECK(nar_q(shuffled) == expected);

  // Distances transformed monotonically; the ranking (and NAR) is fixed.
  auto transformed = at_ranks(6, {2, 4});
  for (auto& c : transformed.ranked) c.distance = std::exp(c.distance);
  CHECK(nar_q(transformed) == expected);
}

TEST_CASE("nar aggregates means and counts undefined queries") {
  std::vector<RankedRetrieval> rrs = {at_ranks(5, {1, 2}), at_ranks(5, {4, 5})};
  auto agg = nar(rrs);
  CHECK(agg.value == doctest::Approx(50.0));
  CHECK(agg.n_used == 2);
  CHECK(agg.n_excluded == 0);

  rrs.push_back(at_ranks(4, {}));  // undefined: no matches
  agg = nar(rrs);
  CHECK(agg.n_used == 2);
  CHECK(agg.n_excluded == 1);

  const std::vector<RankedRetrieval> none = {at_ranks(4, {})};
  CHECK_THROWS_AS(nar(none), UndefinedMetricError);
}

TEST_CASE("random rankings average near 50") {
  Rng rng(41);
  std::vector<RankedRetrieval> rrs;
  for (int trial = 0; trial < 1200; ++trial) {
    const std::size_t total = 6 + rng.bounded(10);
    const std::size_t m = 1 + rng.bounded(total - 1);
    std::vector<std::size_t> positions(total);
    std::iota(positions.begin(), positions.end(), std::size_t{1});
    rng.shuffle(positions);
    positions.resize(m);
    rrs.push_back(at_ranks(total, positions));
  }
  const auto agg = nar(rrs);
  CHECK(agg.value > 47.0);
  CHECK(agg.value < 53.0);
}

TEST_CASE("average precision on the spec instances") {
  CHECK(average_precision(at_ranks(6, {1, 2, 3})) == 1.0);
  CHECK(average_precision(at_ranks(4, {2})) == doctest::Approx(0.5));
  CHECK(average_precision(at_ranks(5, {2, 5})) == doctest::Approx(0.45));
  CHECK_THROWS_AS(average_precision(at_ranks(4, {})), UndefinedMetricError);
}

TEST_CASE("map aggregates and is rank-only") {
  std::vector<RankedRetrieval> rrs = {at_ranks(4, {1}), at_ranks(4, {2})};
  const auto agg = mean_average_precision(rrs);
  CHECK(agg.value == doctest::Approx(0.75));
  CHECK(agg.n_used == 2);

  // Strictly monotone distance transforms leave AP unchanged.
  auto transformed = at_ranks(5, {2, 5});
  for (auto& c : transformed.ranked) c.distance = 3.0 * c.distance + 7.0;
  CHECK(average_precision(transformed) == doctest::Approx(0.45));
}
