#include "doctest.h"
#include "selfsim/error.hpp"
#include "selfsim/field_io.hpp"

#include <filesystem>
#include <fstream>
#include <string>

using namespace selfsim;
namespace fs = std::filesystem;

TEST_CASE("sha256 of a known string") {
  const std::string s = "abc";
  const auto* p = reinterpret_cast<const unsigned char*>(s.data());
  CHECK(sha256_hex({p, s.size()}) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("vector field dump round trips") {
  GridSpec g(8, 2.0);
  const VectorField v = VectorField::from_function(g, [](const Vec3& x) {
    return Vec3{x[0], -x[1] * x[2], 1.0 / 3.0};
  });
  const fs::path dir = fs::temp_directory_path() / "selfsim_io_test";
  fs::remove_all(dir);
  const std::string digest = save_field(v, dir / "v.bin");
  CHECK(fs::file_size(dir / "v.bin") == 3 * g.size() * 8);
  CHECK(sha256_file(dir / "v.bin") == digest);
  const VectorField w = load_vector_field(dir / "v.bin");
  CHECK(w.grid() == g);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < g.size(); ++i) CHECK_EQ(w[c][i], v[c][i]);

  // first value is little-endian -2.0
  std::ifstream in(dir / "v.bin", std::ios::binary);
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  CHECK(b[7] == 0xC0);
  CHECK(b[0] == 0x00);

  {
    std::fstream corrupt(dir / "v.bin", std::ios::binary | std::ios::in | std::ios::out);
    corrupt.seekp(16);
    corrupt.put('\x7f');
  }
  CHECK_THROWS_AS(load_vector_field(dir / "v.bin"), NumericalError);
  fs::remove_all(dir);
}
