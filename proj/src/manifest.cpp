#include "clews/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "clews/errors.hpp"

namespace clews {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot hash '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  char out[32];
  std::snprintf(out, sizeof(out), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(buffer.str())));
  return out;
}

void RunManifest::add_artifact(const std::filesystem::path& path) {
  artifact_hashes[path.string()] = hash_file(path);
}

std::string RunManifest::to_json() const {
  nlohmann::json j{{"command", command},
                   {"config", config},
                   {"seed", seed},
                   {"artifacts", artifact_hashes}};
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest '" + path.string() + "'");
  const std::string body = to_json();
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
}

}  // namespace clews
