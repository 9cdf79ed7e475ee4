#include "clews/store.hpp"

#include <cmath>
#include <unordered_set>

namespace clews {

void SegmentEmbeddingStore::validate() const {
  if (dim == 0) throw DataError("store dimension must be positive");
  std::unordered_set<std::string> seen;
  for (const auto& t : tracks) {
    if (t.dim != dim)
      throw ShapeError("track '" + t.track_id + "' has dim " + std::to_string(t.dim) +
                       ", store has dim " + std::to_string(dim));
    if (t.data.empty() || t.data.size() % dim != 0)
      throw DataError("track '" + t.track_id + "' has a malformed segment payload");
    if (!seen.insert(t.track_id).second)
      throw DataError("duplicate track id '" + t.track_id + "'");
    for (float v : t.data) {
      if (!std::isfinite(v))
        throw DataError("non-finite value in track '" + t.track_id + "'");
    }
  }
}

const TrackEntry* SegmentEmbeddingStore::find_track(const std::string& track_id) const {
  for (const auto& t : tracks) {
    if (t.track_id == track_id) return &t;
  }
  return nullptr;
}

const std::string& VersionCliqueTable::clique_of(const std::string& track_id) const {
  auto it = entries.find(track_id);
  if (it == entries.end()) throw DataError("track '" + track_id + "' has no clique entry");
  return it->second;
}

VersionCliqueTable cliques_from_store(const SegmentEmbeddingStore& store) {
  VersionCliqueTable table;
  for (const auto& t : store.tracks) table.entries[t.track_id] = t.clique_id;
  return table;
}

SegmentDistanceMatrix::SegmentDistanceMatrix(std::size_t rows, std::size_t cols,
                                             std::vector<double> values,
                                             std::vector<std::uint8_t> mask)
    : rows_(rows), cols_(cols), values_(std::move(values)), mask_(std::move(mask)) {
  if (values_.size() != rows * cols || mask_.size() != rows * cols)
    throw ShapeError("distance matrix payload does not match its shape");
}

std::size_t SegmentDistanceMatrix::valid_count() const {
  std::size_t n = 0;
  for (auto m : mask_) n += (m != 0);
  return n;
}

SegmentDistanceMatrix SegmentDistanceMatrix::transposed() const {
  SegmentDistanceMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      t.set(c, r, at(r, c));
      t.set_mask(c, r, valid(r, c));
    }
  }
  return t;
}

void SegmentDistanceMatrix::validate() const {
  bool any = false;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!mask_[i]) continue;
    any = true;
    if (!std::isfinite(values_[i]) || values_[i] < 0.0)
      throw DataError("unmasked distance cells must be finite and nonnegative");
  }
  if (!any) throw DataError("distance matrix has no valid cell");
}

std::size_t AssignmentMatrix::positive_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < value_.size(); ++i) n += (valid_[i] && value_[i]);
  return n;
}

std::size_t AssignmentMatrix::negative_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < value_.size(); ++i) n += (valid_[i] && !value_[i]);
  return n;
}

}  // namespace clews
