#include "selfsim/field_io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include "json.hpp"
#include <sstream>

#include "selfsim/error.hpp"

namespace selfsim {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void append_le(std::vector<unsigned char>& out, std::span<const double> values) {
  const std::size_t start = out.size();
  out.resize(start + values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) out[start + 8 * i + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
}

void read_le(const unsigned char* src, std::span<double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(src[8 * i + b]) << (8 * b);
    values[i] = std::bit_cast<double>(bits);
  }
}

std::string write_dump(const std::vector<unsigned char>& bytes, const GridSpec& g,
                       const std::vector<std::string>& names, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericalError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  const std::string digest = sha256_hex(bytes);
  json side{{"n", g.n()}, {"L", g.half_width()}, {"component_names", names}, {"sha256", digest}};
  std::ofstream meta(fs::path(path.string() + ".json"));
  meta << side.dump(2) << '\n';
  return digest;
}

struct Dump {
  GridSpec grid;
  std::vector<std::string> names;
  std::vector<unsigned char> bytes;
};

Dump read_dump(const fs::path& path) {
  std::ifstream meta(fs::path(path.string() + ".json"));
  if (!meta) throw ConfigurationError("missing sidecar for " + path.string());
  const json side = json::parse(meta);
  Dump d{GridSpec(side.at("n").get<int>(), side.at("L").get<double>()),
         side.at("component_names").get<std::vector<std::string>>(), {}};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot open " + path.string());
  d.bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  if (sha256_hex(d.bytes) != side.at("sha256").get<std::string>())
    throw NumericalError("checksum mismatch for " + path.string());
  if (d.bytes.size() != d.names.size() * d.grid.size() * 8)
    throw ConfigurationError("size mismatch for " + path.string());
  return d;
}

}  // namespace

std::string sha256_hex(std::span<const unsigned char> bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw NumericalError("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

std::vector<unsigned char> field_bytes(const VectorField& f) {
  std::vector<unsigned char> out;
  out.reserve(3 * f.size() * 8);
  for (int c = 0; c < 3; ++c) append_le(out, f[c].values());
  return out;
}

std::vector<unsigned char> field_bytes(const ScalarField& f) {
  std::vector<unsigned char> out;
  append_le(out, f.values());
  return out;
}

std::string save_field(const VectorField& f, const fs::path& path,
                       const std::vector<std::string>& component_names) {
  if (component_names.size() != 3) throw ConfigurationError("save_field: need 3 component names");
  return write_dump(field_bytes(f), f.grid(), component_names, path);
}

std::string save_field(const ScalarField& f, const fs::path& path, const std::string& name) {
  return write_dump(field_bytes(f), f.grid(), {name}, path);
}

VectorField load_vector_field(const fs::path& path) {
  const Dump d = read_dump(path);
  if (d.names.size() != 3) throw ConfigurationError("not a vector field dump: " + path.string());
  VectorField f(d.grid);
  for (int c = 0; c < 3; ++c) read_le(d.bytes.data() + c * d.grid.size() * 8, f[c].values());
  return f;
}

ScalarField load_scalar_field(const fs::path& path) {
  const Dump d = read_dump(path);
  if (d.names.size() != 1) throw ConfigurationError("not a scalar field dump: " + path.string());
  ScalarField f(d.grid);
  read_le(d.bytes.data(), f.values());
  return f;
}

}  // namespace selfsim
