#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "clews/errors.hpp"

namespace clews {

// One track's sequence of fixed-dimension segment embeddings.
// Payloads are 32-bit (matching the on-disk format); all distance and
// loss arithmetic upcasts to 64-bit.
struct TrackEntry {
  std::string track_id;
  std::string clique_id;
  std::size_t dim = 0;
  std::vector<float> data;  // u * dim, row-major

  std::size_t num_segments() const { return dim == 0 ? 0 : data.size() / dim; }

  std::span<const float> segment(std::size_t k) const {
    return std::span<const float>(data.data() + k * dim, dim);
  }
};

// Immutable after construction; safe to share across threads.
struct SegmentEmbeddingStore {
  std::size_t dim = 0;
  std::vector<TrackEntry> tracks;

  // Enforces the store invariants: positive dim, unique track ids,
  // at least one segment per track, finite payloads of matching dim.
  void validate() const;

  const TrackEntry* find_track(const std::string& track_id) const;
};

// track_id -> clique_id. Iteration order is the sorted track id order,
// which keeps TSV emission deterministic.
struct VersionCliqueTable {
  std::map<std::string, std::string> entries;

  const std::string& clique_of(const std::string& track_id) const;
  bool contains(const std::string& track_id) const {
    return entries.find(track_id) != entries.end();
  }
};

VersionCliqueTable cliques_from_store(const SegmentEmbeddingStore& store);

// Masked rectangle of pairwise segment distances between one query track
// and one candidate track (rows = query segments, cols = candidate segments).
class SegmentDistanceMatrix {
 public:
  SegmentDistanceMatrix() = default;
  SegmentDistanceMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0), mask_(rows * cols, 1) {}
  SegmentDistanceMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                        std::vector<std::uint8_t> mask);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  bool valid(std::size_t r, std::size_t c) const { return mask_[r * cols_ + c] != 0; }

  void set(std::size_t r, std::size_t c, double v) { values_[r * cols_ + c] = v; }
  void set_mask(std::size_t r, std::size_t c, bool valid) {
    mask_[r * cols_ + c] = valid ? 1 : 0;
  }

  std::size_t valid_count() const;
  SegmentDistanceMatrix transposed() const;

  // Rejects non-finite or negative unmasked cells and all-masked matrices.
  void validate() const;

  const std::vector<double>& values() const { return values_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
};

// Binary track-level ground truth with a validity mask excluding
// self-comparisons and duplicate-track cells.
class AssignmentMatrix {
 public:
  AssignmentMatrix() = default;
  AssignmentMatrix(std::size_t n, std::size_t m)
      : n_(n), m_(m), value_(n * m, 0), valid_(n * m, 1) {}

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }

  bool is_valid(std::size_t i, std::size_t j) const { return valid_[i * m_ + j] != 0; }
  bool is_positive(std::size_t i, std::size_t j) const { return value_[i * m_ + j] != 0; }

  void set(std::size_t i, std::size_t j, bool positive) {
    value_[i * m_ + j] = positive ? 1 : 0;
  }
  void set_valid(std::size_t i, std::size_t j, bool valid) {
    valid_[i * m_ + j] = valid ? 1 : 0;
  }

  std::size_t positive_count() const;  // |A+|
  std::size_t negative_count() const;  // |A-|

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<std::uint8_t> value_;
  std::vector<std::uint8_t> valid_;
};

}  // namespace clews
