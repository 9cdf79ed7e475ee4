#pragma once

#include <filesystem>

#include "clews/store.hpp"

namespace clews {

// CLWS embedding file, version 1.
//
//   bytes 0-3   magic "CLWS"
//   byte  4     format version (= 1)
//   u32   LE    embedding dimension
//   u32   LE    track count
//   per track:
//     u16 LE  track_id byte length, then UTF-8 bytes
//     u16 LE  clique_id byte length, then UTF-8 bytes
//     u32 LE  segment count u
//     u * dim IEEE-754 binary32 LE, row-major
SegmentEmbeddingStore load_store(const std::filesystem::path& path);
void save_store(const SegmentEmbeddingStore& store, const std::filesystem::path& path);

// Clique table TSV: one "track_id<TAB>clique_id" row per track, no header.
VersionCliqueTable load_clique_tsv(const std::filesystem::path& path);
void save_clique_tsv(const VersionCliqueTable& table, const std::filesystem::path& path);

}  // namespace clews
