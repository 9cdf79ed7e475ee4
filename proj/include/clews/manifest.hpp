#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace clews {

// FNV-1a over a byte string; used to fingerprint run artifacts.
std::uint64_t fnv1a64(std::string_view bytes);

// "fnv1a64:<16 hex digits>" of a file's contents.
std::string hash_file(const std::filesystem::path& path);

// Record of one CLI run: the command, its resolved configuration, the seed,
// and the content hash of every artifact it wrote. Equal configs and seeds
// must come with identical hashes.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> artifact_hashes;

  void add_artifact(const std::filesystem::path& path);
  std::string to_json() const;
  void write(const std::filesystem::path& path) const;
};

}  // namespace clews
