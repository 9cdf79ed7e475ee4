#pragma once

#include <span>
#include <string>
#include <vector>

#include "clews/errors.hpp"

namespace clews {

struct RankedCandidate {
  std::string id;
  double distance = 0.0;
  bool is_match = false;
};

// One query's candidate list, already sorted by ascending distance with the
// query itself excluded.
struct RankedRetrieval {
  std::string query_id;
  std::vector<RankedCandidate> ranked;

  std::size_t match_count() const;
};

// Corrected normalized average rank, in percent:
//   NAR_q = 100 / (|M| (|R| - |M|)) * sum_i (rank(m_i, R) - i),
// 0 for perfect retrieval and 100 for worst-case retrieval, for every |M|.
// Requires 1 <= |M| <= |R| - 1.
double nar_q(const RankedRetrieval& rr);

struct MetricAggregate {
  double value = 0.0;
  double ci95 = 0.0;  // 1.96 * stderr over per-query values
  std::size_t n_used = 0;
  std::size_t n_excluded = 0;  // queries where the metric is undefined
};

MetricAggregate nar(std::span<const RankedRetrieval> rrs);

// Average precision: (1/|M|) sum_i precision at rank(m_i).
double average_precision(const RankedRetrieval& rr);

MetricAggregate mean_average_precision(std::span<const RankedRetrieval> rrs);

}  // namespace clews
