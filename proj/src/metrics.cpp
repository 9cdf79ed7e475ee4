#include "clews/metrics.hpp"

#include <cmath>
#include <functional>

namespace clews {

std::size_t RankedRetrieval::match_count() const {
  std::size_t m = 0;
  for (const auto& c : ranked) m += c.is_match;
  return m;
}

double nar_q(const RankedRetrieval& rr) {
  const std::size_t total = rr.ranked.size();
  const std::size_t matches = rr.match_count();
  if (matches == 0)
    throw UndefinedMetricError("query '" + rr.query_id + "' has no matches");
  if (matches == total)
    throw UndefinedMetricError("query '" + rr.query_id + "' has only matches");

  // Integer rank sum keeps the 0 and 100 extremes exact.
  long long rank_excess = 0;
  long long seen = 0;
  for (std::size_t pos = 0; pos < total; ++pos) {
    if (!rr.ranked[pos].is_match) continue;
    ++seen;
    rank_excess += static_cast<long long>(pos + 1) - seen;
  }
  const auto denom = static_cast<double>(matches) * static_cast<double>(total - matches);
  return 100.0 * static_cast<double>(rank_excess) / denom;
}

double average_precision(const RankedRetrieval& rr) {
  const std::size_t matches = rr.match_count();
  if (matches == 0)
    throw UndefinedMetricError("query '" + rr.query_id + "' has no matches");
  double ap = 0.0;
  std::size_t seen = 0;
  for (std::size_t pos = 0; pos < rr.ranked.size(); ++pos) {
    if (!rr.ranked[pos].is_match) continue;
    ++seen;
    ap += static_cast<double>(seen) / static_cast<double>(pos + 1);
  }
  return ap / static_cast<double>(matches);
}

namespace {

MetricAggregate aggregate(std::span<const RankedRetrieval> rrs,
                          const std::function<double(const RankedRetrieval&)>& per_query,
                          const char* metric_name) {
  MetricAggregate agg;
  std::vector<double> values;
  values.reserve(rrs.size());
  for (const auto& rr : rrs) {
    try {
      values.push_back(per_query(rr));
    } catch (const UndefinedMetricError&) {
      ++agg.n_excluded;
    }
  }
  if (values.empty())
    throw UndefinedMetricError(std::string(metric_name) + " is undefined for every query");

  agg.n_used = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  agg.value = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - agg.value) * (v - agg.value);
    const double stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    agg.ci95 = 1.96 * stddev / std::sqrt(static_cast<double>(values.size()));
  }
  return agg;
}

}  // namespace

MetricAggregate nar(std::span<const RankedRetrieval> rrs) {
  return aggregate(rrs, nar_q, "NAR");
}

MetricAggregate mean_average_precision(std::span<const RankedRetrieval> rrs) {
  return aggregate(rrs, average_precision, "MAP");
}

}  // namespace clews
