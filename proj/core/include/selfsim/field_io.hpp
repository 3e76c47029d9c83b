#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "selfsim/field.hpp"

namespace selfsim {

// Hex SHA-256 of a byte range.
std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_file(const std::filesystem::path& path);

// Little-endian float64 dump, one component after another. Writes `path` and
// `path + ".json"` holding {n, L, component_names, sha256}. Returns the digest.
std::string save_field(const VectorField& f, const std::filesystem::path& path,
                       const std::vector<std::string>& component_names = {"u1", "u2", "u3"});
std::string save_field(const ScalarField& f, const std::filesystem::path& path,
                       const std::string& name = "p");

// Reads a dump written by save_field; the digest in the sidecar is checked.
VectorField load_vector_field(const std::filesystem::path& path);
ScalarField load_scalar_field(const std::filesystem::path& path);

// Byte image of the dump (what save_field writes), useful for hashing in memory.
std::vector<unsigned char> field_bytes(const VectorField& f);
std::vector<unsigned char> field_bytes(const ScalarField& f);

}  // namespace selfsim
