#pragma once

#include <span>

#include "clews/reduction.hpp"
#include "clews/store.hpp"

namespace clews {

// Contrastive-loss hyper-parameters. stable_b is the exponent cap used by
// the log1p formulation.
struct LossParams {
  double gamma = 5.0;
  double epsilon = 1e-6;
  double stable_b = 10.0;

  void validate() const;
};

// Decoupled supervised alignment-and-uniformity baseline parameters.
struct BaselineAUParams {
  double alpha = 2.0;
  double lambda = 1.0;
  double gamma = 3.0;

  void validate() const;
};

// Loss value plus the partial derivative with respect to every valid
// track-pair distance. Positive-pair entries are >= 0 and negative-pair
// entries <= 0. pos_term/neg_term expose the decoupled halves.
class LossReport {
 public:
  LossReport() = default;
  LossReport(std::size_t n, std::size_t m)
      : n_(n), m_(m), grad_(n * m, 0.0), valid_(n * m, 0) {}

  double value = 0.0;
  double pos_term = 0.0;
  double neg_term = 0.0;

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  bool is_valid(std::size_t i, std::size_t j) const { return valid_[i * m_ + j] != 0; }
  double grad_at(std::size_t i, std::size_t j) const { return grad_[i * m_ + j]; }
  void set_grad(std::size_t i, std::size_t j, double g) {
    grad_[i * m_ + j] = g;
    valid_[i * m_ + j] = 1;
  }

  struct Entry {
    std::size_t i, j;
    double grad;
  };
  std::vector<Entry> entries() const;

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<double> grad_;
  std::vector<std::uint8_t> valid_;
};

// L = (1/|A+|) sum d^2  +  log(eps + (1/|A-|) sum exp(-gamma d^2)).
LossReport clews_loss(const ReducedDistanceMatrix& d, const AssignmentMatrix& a,
                      const LossParams& p);

// log1p formulation. Value differs from clews_loss by exactly -log(eps)
// (a dropped constant); gradients are analytically identical.
LossReport clews_loss_stable(const ReducedDistanceMatrix& d, const AssignmentMatrix& a,
                             const LossParams& p);

// L~ = (1/|A+|) sum d^alpha + lambda log((1/|A-|) sum exp(-gamma d^2)).
// Raises NumericalRangeError if the negative-potential mean underflows.
LossReport au_decoupled_loss(const ReducedDistanceMatrix& d, const AssignmentMatrix& a,
                             const BaselineAUParams& p);

// One sample of the negative-pair gradient curve: the pair potential
// exp(-gamma d^2), the gradient there, and the distance it came from.
struct GradientCurvePoint {
  double potential = 0.0;
  double grad = 0.0;
  double distance = 0.0;
};

// Negative-pair gradient as a function of the pair potential, with the
// other |A-|-1 pairs held at the same potential (the symmetric case).
std::vector<GradientCurvePoint> gradient_curve(const LossParams& p, std::size_t set_size,
                                               std::span<const double> distances);

// Distance grid whose potentials sweep log-uniformly from 1 down to
// min_potential, starting at d = 0 exactly.
std::vector<double> default_curve_distances(const LossParams& p, std::size_t points,
                                            double min_potential = 1e-15);

}  // namespace clews
