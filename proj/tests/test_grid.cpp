#include "doctest.h"
#include "selfsim/error.hpp"
#include "selfsim/grid.hpp"

#include <cmath>
#include <numbers>

using namespace selfsim;

TEST_CASE("grid geometry") {
  GridSpec g(64, 16.0);
  CHECK(g.spacing() == doctest::Approx(0.5));
  CHECK(g.coordinate(0) == doctest::Approx(-16.0));
  CHECK(g.coordinate(32) == doctest::Approx(0.0));
  CHECK(g.size() == 64u * 64u * 64u);
  CHECK(g.spectral_size() == 64u * 64u * 33u);
  CHECK(g.volume() == doctest::Approx(32.0 * 32.0 * 32.0));
}

TEST_CASE("wavenumbers and Nyquist") {
  GridSpec g(16, std::numbers::pi);
  CHECK(g.wavenumber(1) == doctest::Approx(1.0));
  CHECK(g.wavenumber(15) == doctest::Approx(-1.0));
  CHECK(g.wavenumber(8) == 0.0);
  CHECK(g.signed_mode(9) == -7);
}

TEST_CASE("dealias mask keeps two thirds") {
  GridSpec g(16, 1.0);
  CHECK(g.inside_dealias(5, 0, 0));
  CHECK_FALSE(g.inside_dealias(6, 0, 0));
  CHECK(g.inside_dealias(16 - 5, 0, 0));
}

TEST_CASE("invalid grids are rejected") {
  CHECK_THROWS_AS(GridSpec(48, 1.0), ConfigurationError);
  CHECK_THROWS_AS(GridSpec(2, 1.0), ConfigurationError);
  CHECK_THROWS_AS(GridSpec(16, -1.0), ConfigurationError);
  CHECK_THROWS_AS(GridSpec(16, 1.0, 0.0), ConfigurationError);
}
