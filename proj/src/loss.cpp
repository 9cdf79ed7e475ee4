#include "clews/loss.hpp"

#include <cmath>

namespace clews {

void LossParams::validate() const {
  if (!(gamma > 0.0)) throw ParamError("gamma must be positive");
  if (!(epsilon > 0.0)) throw ParamError("epsilon must be positive");
  if (!(stable_b >= 0.0)) throw ParamError("stable_b must be nonnegative");
}

void BaselineAUParams::validate() const {
  if (!(alpha > 0.0)) throw ParamError("alpha must be positive");
  if (!(lambda >= 0.0)) throw ParamError("lambda must be nonnegative");
  if (!(gamma > 0.0)) throw ParamError("gamma must be positive");
}

std::vector<LossReport::Entry> LossReport::entries() const {
  std::vector<Entry> out;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < m_; ++j)
      if (is_valid(i, j)) out.push_back({i, j, grad_at(i, j)});
  return out;
}

namespace {

struct Pair {
  std::size_t i, j;
  double d;
};

struct SplitBatch {
  std::vector<Pair> positives;
  std::vector<Pair> negatives;
};

SplitBatch split_batch(const ReducedDistanceMatrix& d, const AssignmentMatrix& a) {
  if (d.n() != a.n() || d.m() != a.m())
    throw ShapeError("reduced distances and assignments have different shapes");
  SplitBatch batch;
  for (std::size_t i = 0; i < a.n(); ++i) {
    for (std::size_t j = 0; j < a.m(); ++j) {
      if (!a.is_valid(i, j)) continue;
      if (!d.is_valid(i, j))
        throw DataError("no reduced distance for valid pair (" + std::to_string(i) + ", " +
                        std::to_string(j) + ")");
      const double dist = d.at(i, j);
      if (!std::isfinite(dist)) throw DataError("non-finite reduced distance");
      (a.is_positive(i, j) ? batch.positives : batch.negatives).push_back({i, j, dist});
    }
  }
  if (batch.positives.empty()) throw DegenerateBatchError("batch has no positive pairs");
  if (batch.negatives.empty()) throw DegenerateBatchError("batch has no negative pairs");
  return batch;
}

}  // namespace

LossReport clews_loss(const ReducedDistanceMatrix& d, const AssignmentMatrix& a,
                      const LossParams& p) {
  p.validate();
  const auto batch = split_batch(d, a);
  const auto np = static_cast<double>(batch.positives.size());
  const auto nn = static_cast<double>(batch.negatives.size());

  LossReport report(a.n(), a.m());
  double pos_sum = 0.0;
  for (const auto& pair : batch.positives) pos_sum += pair.d * pair.d;
  report.pos_term = pos_sum / np;

  double potential_sum = 0.0;
  for (const auto& pair : batch.negatives)
    potential_sum += std::exp(-p.gamma * pair.d * pair.d);
  report.neg_term = std::log(p.epsilon + potential_sum / nn);
  report.value = report.pos_term + report.neg_term;

  for (const auto& pair : batch.positives)
    report.set_grad(pair.i, pair.j, 2.0 * pair.d / np);
  // The denominator |A-| eps + c + exp(-gamma d^2) equals |A-| eps plus the
  // sum of all negative potentials.
  const double denom = nn * p.epsilon + potential_sum;
  for (const auto& pair : batch.negatives) {
    const double potential = std::exp(-p.gamma * pair.d * pair.d);
    report.set_grad(pair.i, pair.j, -2.0 * p.gamma * pair.d * potential / denom);
  }
  return report;
}

LossReport clews_loss_stable(const ReducedDistanceMatrix& d, const AssignmentMatrix& a,
                             const LossParams& p) {
  p.validate();
  const auto batch = split_batch(d, a);
  const auto np = static_cast<double>(batch.positives.size());
  const auto nn = static_cast<double>(batch.negatives.size());

  LossReport report(a.n(), a.m());
  double pos_sum = 0.0;
  for (const auto& pair : batch.positives) pos_sum += pair.d * pair.d;
  report.pos_term = pos_sum / np;

  const double beta = 1.0 / (p.epsilon * nn * std::exp(p.stable_b));
  double capped_sum = 0.0;  // sum of exp(b - gamma d^2)
  for (const auto& pair : batch.negatives)
    capped_sum += std::exp(p.stable_b - p.gamma * pair.d * pair.d);
  report.neg_term = std::log1p(beta * capped_sum);
  report.value = report.pos_term + report.neg_term;

  for (const auto& pair : batch.positives)
    report.set_grad(pair.i, pair.j, 2.0 * pair.d / np);
  const double denom = 1.0 + beta * capped_sum;
  for (const auto& pair : batch.negatives) {
    const double capped = std::exp(p.stable_b - p.gamma * pair.d * pair.d);
    report.set_grad(pair.i, pair.j, -2.0 * p.gamma * pair.d * beta * capped / denom);
  }
  return report;
}

LossReport au_decoupled_loss(const ReducedDistanceMatrix& d, const AssignmentMatrix& a,
                             const BaselineAUParams& p) {
  p.validate();
  const auto batch = split_batch(d, a);
  const auto np = static_cast<double>(batch.positives.size());
  const auto nn = static_cast<double>(batch.negatives.size());

  LossReport report(a.n(), a.m());
  double pos_sum = 0.0;
  for (const auto& pair : batch.positives) pos_sum += std::pow(pair.d, p.alpha);
  report.pos_term = pos_sum / np;

  double potential_sum = 0.0;
  for (const auto& pair : batch.negatives)
    potential_sum += std::exp(-p.gamma * pair.d * pair.d);
  if (!(potential_sum > 0.0) || !std::isfinite(potential_sum))
    throw NumericalRangeError("negative potential mean underflowed to zero");
  report.neg_term = p.lambda * std::log(potential_sum / nn);
  report.value = report.pos_term + report.neg_term;

  for (const auto& pair : batch.positives)
    report.set_grad(pair.i, pair.j, p.alpha * std::pow(pair.d, p.alpha - 1.0) / np);
  for (const auto& pair : batch.negatives) {
    const double potential = std::exp(-p.gamma * pair.d * pair.d);
    report.set_grad(pair.i, pair.j,
                    p.lambda * -2.0 * p.gamma * pair.d * potential / potential_sum);
  }
  return report;
}

std::vector<GradientCurvePoint> gradient_curve(const LossParams& p, std::size_t set_size,
                                               std::span<const double> distances) {
  p.validate();
  if (set_size < 1) throw ParamError("set_size must be at least 1");
  const auto n = static_cast<double>(set_size);
  std::vector<GradientCurvePoint> curve;
  curve.reserve(distances.size());
  for (double d : distances) {
    if (!(d >= 0.0)) throw ParamError("curve distances must be nonnegative");
    const double potential = std::exp(-p.gamma * d * d);
    // All other pairs sit at the same potential: c = (|A-| - 1) potential.
    const double denom = n * p.epsilon + (n - 1.0) * potential + potential;
    const double grad = -2.0 * p.gamma * d * potential / denom + 0.0;  // -0 -> +0
    curve.push_back({potential, grad, d});
  }
  return curve;
}

std::vector<double> default_curve_distances(const LossParams& p, std::size_t points,
                                            double min_potential) {
  p.validate();
  if (points < 2) throw ParamError("need at least 2 curve points");
  if (!(min_potential > 0.0 && min_potential < 1.0))
    throw ParamError("min_potential must lie in (0, 1)");
  std::vector<double> distances;
  distances.reserve(points);
  distances.push_back(0.0);  // potential exactly 1
  const double log_min = std::log(min_potential);
  for (std::size_t k = 1; k < points; ++k) {
    const double log_pot =
        log_min * static_cast<double>(k) / static_cast<double>(points - 1);
    distances.push_back(std::sqrt(-log_pot / p.gamma));
  }
  return distances;
}

}  // namespace clews
