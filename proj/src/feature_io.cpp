#include "signspot/feature_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

namespace signspot {

namespace {

constexpr char kMagic[4] = {'F', 'E', 'A', 'T'};
constexpr uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "feature files are little-endian; big-endian hosts are unsupported");

uint32_t read_u32(std::istream& in) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

void write_u32(std::ostream& out, uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

struct Header {
  uint32_t rows = 0;
  uint32_t dim = 0;
};

Header read_header(std::ifstream& in, const std::string& path) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("bad magic in feature file: " + path);
  uint32_t version = read_u32(in);
  if (!in || version != kVersion)
    throw DataError("unsupported feature file version " + std::to_string(version) +
                    " in " + path);
  Header h;
  h.rows = read_u32(in);
  h.dim = read_u32(in);
  if (!in || h.rows == 0 || h.dim == 0)
    throw DataError("invalid feature shape in " + path);
  return h;
}

}  // namespace

FeatureSequence read_feature_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature file: " + path);
  Header h = read_header(in, path);

  FeatureSequence seq;
  seq.data.resize(h.rows, h.dim);
  size_t payload = static_cast<size_t>(h.rows) * h.dim * sizeof(float);
  in.read(reinterpret_cast<char*>(seq.data.data()), static_cast<std::streamsize>(payload));
  if (static_cast<size_t>(in.gcount()) != payload)
    throw DataError("truncated feature payload in " + path);
  if (!seq.data.allFinite())
    throw DataError("non-finite feature values in " + path);
  return seq;
}

void write_feature_file(const std::string& path, const FeatureSequence& features) {
  if (features.rows() < 1 || features.dim() < 1)
    throw DataError("refusing to write empty feature matrix: " + path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open feature file for writing: " + path);
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u32(out, static_cast<uint32_t>(features.rows()));
  write_u32(out, static_cast<uint32_t>(features.dim()));
  out.write(reinterpret_cast<const char*>(features.data.data()),
            static_cast<std::streamsize>(sizeof(float)) * features.rows() * features.dim());
  if (!out) throw DataError("short write to feature file: " + path);
}

void check_feature_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature file: " + path);
  Header h = read_header(in, path);
  size_t expected = 16 + static_cast<size_t>(h.rows) * h.dim * sizeof(float);
  size_t actual = static_cast<size_t>(std::filesystem::file_size(path));
  if (actual < expected) throw DataError("truncated feature payload in " + path);
  if (actual > expected) throw DataError("trailing bytes in feature file " + path);
}

}  // namespace signspot
