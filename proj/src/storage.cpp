#include "clews/storage.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace clews {

namespace {

constexpr char kMagic[4] = {'C', 'L', 'W', 'S'};
constexpr std::uint8_t kFormatVersion = 1;

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint8_t u8() { return take(1)[0]; }

  std::uint16_t u16() {
    auto b = take(2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }

  std::uint32_t u32() {
    auto b = take(4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }

  float f32() { return std::bit_cast<float>(u32()); }

  std::string bytes(std::size_t n) {
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      throw FormatError("truncated CLWS file");
    return s;
  }

 private:
  std::array<std::uint8_t, 4> take(std::size_t n) {
    std::array<char, 4> buf{};
    in_.read(buf.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      throw FormatError("truncated CLWS file");
    std::array<std::uint8_t, 4> out{};
    std::memcpy(out.data(), buf.data(), n);
    return out;
  }

  std::istream& in_;
};

}  // namespace

SegmentEmbeddingStore load_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  Reader r(in);

  const std::string magic = r.bytes(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0)
    throw FormatError("bad magic bytes in '" + path.string() + "'");
  const std::uint8_t version = r.u8();
  if (version != kFormatVersion)
    throw FormatError("unsupported CLWS format version " + std::to_string(version));

  SegmentEmbeddingStore store;
  store.dim = r.u32();
  if (store.dim == 0) throw FormatError("declared dimension is zero");
  const std::uint32_t track_count = r.u32();
  if (track_count == 0) throw FormatError("CLWS file declares zero tracks");

  store.tracks.reserve(track_count);
  for (std::uint32_t t = 0; t < track_count; ++t) {
    TrackEntry entry;
    entry.dim = store.dim;
    entry.track_id = r.bytes(r.u16());
    entry.clique_id = r.bytes(r.u16());
    const std::uint32_t u = r.u32();
    if (u == 0)
      throw FormatError("track '" + entry.track_id + "' has zero segments");
    entry.data.resize(static_cast<std::size_t>(u) * store.dim);
    for (auto& v : entry.data) {
      v = r.f32();
      if (!std::isfinite(v))
        throw DataError("non-finite embedding value in track '" + entry.track_id + "'");
    }
    store.tracks.push_back(std::move(entry));
  }

  // Trailing garbage means the payload length disagrees with the header.
  if (in.peek() != std::char_traits<char>::eof())
    throw FormatError("unexpected trailing bytes in '" + path.string() + "'");

  store.validate();
  return store;
}

void save_store(const SegmentEmbeddingStore& store, const std::filesystem::path& path) {
  if (store.tracks.empty()) throw FormatError("refusing to save a store with no tracks");
  store.validate();
  if (store.tracks.size() > std::numeric_limits<std::uint32_t>::max())
    throw FormatError("too many tracks for the CLWS format");

  std::string out;
  out.append(kMagic, 4);
  out.push_back(static_cast<char>(kFormatVersion));
  put_u32(out, static_cast<std::uint32_t>(store.dim));
  put_u32(out, static_cast<std::uint32_t>(store.tracks.size()));
  for (const auto& t : store.tracks) {
    if (t.track_id.size() > std::numeric_limits<std::uint16_t>::max() ||
        t.clique_id.size() > std::numeric_limits<std::uint16_t>::max())
      throw FormatError("track or clique id too long for the CLWS format");
    put_u16(out, static_cast<std::uint16_t>(t.track_id.size()));
    out.append(t.track_id);
    put_u16(out, static_cast<std::uint16_t>(t.clique_id.size()));
    out.append(t.clique_id);
    put_u32(out, static_cast<std::uint32_t>(t.num_segments()));
    for (float v : t.data) put_f32(out, v);
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("failed writing '" + path.string() + "'");
}

VersionCliqueTable load_clique_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  VersionCliqueTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw FormatError("line " + std::to_string(lineno) + ": expected 'track<TAB>clique'");
    std::string track = line.substr(0, tab);
    std::string clique = line.substr(tab + 1);
    if (track.empty() || clique.empty())
      throw FormatError("line " + std::to_string(lineno) + ": empty track or clique id");
    if (!table.entries.emplace(std::move(track), std::move(clique)).second)
      throw FormatError("line " + std::to_string(lineno) + ": duplicate track id");
  }
  return table;
}

void save_clique_tsv(const VersionCliqueTable& table, const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& [track, clique] : table.entries) out << track << '\t' << clique << '\n';
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
  const std::string s = out.str();
  file.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!file) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace clews
