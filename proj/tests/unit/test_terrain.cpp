#include <sstream>

#include "doctest.h"
#include "softgait/errors.hpp"
#include "softgait/terrain.hpp"

using namespace softgait;

TEST_CASE("flat terrain is zero everywhere") {
  const Terrain flat = make_terrain(TerrainKind::kFlat);
  CHECK(flat.height_at(17.3) == 0.0);
  CHECK(flat.height_at(-199.0) == 0.0);
  CHECK(flat.height_at(0.0) == 0.0);
}

TEST_CASE("spike terrains peak at half period") {
  const Terrain spiky = make_terrain(TerrainKind::kSpiky);
  CHECK(spiky.height_at(0.5) == 0.5);
  CHECK(spiky.height_at(0.0) == 0.0);
  CHECK(spiky.height_at(0.25) == 0.25);
  CHECK(spiky.period() == 1.0);

  CHECK(make_terrain(TerrainKind::kLongSpikes).height_at(1.0) == 0.5);
  const Terrain longer = make_terrain(TerrainKind::kLongerSpikes);
  CHECK(longer.height_at(2.0) == 0.5);
  CHECK(longer.height_at(4.0) == 0.0);
  CHECK(longer.period() == 4.0);
}

TEST_CASE("sawtooth rises over two thirds of its period and falls over one third") {
  const Terrain saw = make_terrain(TerrainKind::kSawtooth);
  CHECK(saw.period() == 1.5);
  CHECK(saw.height_at(0.0) == 0.0);
  CHECK(saw.height_at(1.0) == 0.5);
  CHECK(saw.height_at(0.5) == 0.25);
  CHECK(saw.height_at(1.25) == 0.25);
  CHECK(saw.height_at(1.5) == 0.0);

  TerrainOptions reversed;
  reversed.sawtooth_reversed = true;
  const Terrain rev = make_terrain(TerrainKind::kSawtooth, reversed);
  CHECK(rev.height_at(0.5) == 0.5);
  CHECK(rev.height_at(1.0) == 0.25);
}

TEST_CASE("valley slopes up symmetrically from the origin") {
  const Terrain valley = make_terrain(TerrainKind::kValley);
  CHECK(valley.height_at(0.0) == 0.0);
  for (double x = 0.0; x <= 199.0; x += 0.37) {
    CHECK(valley.height_at(x) == doctest::Approx(0.2 * x).epsilon(1e-12));
    CHECK(valley.height_at(-x) == doctest::Approx(valley.height_at(x)).epsilon(1e-12));
  }
}

TEST_CASE("periodic terrains repeat exactly and stay within [0, 0.5]") {
  for (TerrainKind kind : {TerrainKind::kSpiky, TerrainKind::kLongSpikes,
                           TerrainKind::kLongerSpikes, TerrainKind::kSawtooth}) {
    const Terrain t = make_terrain(kind);
    CAPTURE(t.name());
    const double p = t.period();
    // Dyadic sample points keep every shift exactly representable.
    for (double x = -150.0; x <= 150.0; x += 1.0 / 64.0) {
      const double h = t.height_at(x);
      REQUIRE(h >= 0.0);
      REQUIRE(h <= 0.5);
      REQUIRE(t.height_at(x + p) == h);
    }
  }
}

TEST_CASE("interpolation hits the segment midpoint mean") {
  for (TerrainKind kind : kAllTerrains) {
    const Terrain t = make_terrain(kind);
    const auto v = t.vertices();
    for (std::size_t i = 0; i + 1 < v.size(); i += 7) {
      const double mid = 0.5 * (v[i].x + v[i + 1].x);
      CHECK(t.height_at(mid) == doctest::Approx(0.5 * (v[i].y + v[i + 1].y)).epsilon(1e-12));
    }
  }
}

TEST_CASE("profiles cover the evaluation extent and reject queries beyond it") {
  for (TerrainKind kind : kAllTerrains) {
    const Terrain t = make_terrain(kind);
    CHECK(t.x_min() <= -200.0);
    CHECK(t.x_max() >= 200.0);
    CHECK_THROWS_AS(t.height_at(t.x_max() + 1.0), OutOfExtentError);
    CHECK_THROWS_AS(t.height_at(t.x_min() - 1.0), OutOfExtentError);
    // Feature widths never exceed the robot's 3-unit footprint by more than one voxel.
    if (t.period() > 0.0) CHECK(t.period() <= 4.0);
  }
}

TEST_CASE("terrain names parse, with the sparsespike alias") {
  for (TerrainKind kind : kAllTerrains) CHECK(parse_terrain(terrain_name(kind)) == kind);
  CHECK(parse_terrain("sparsespike") == TerrainKind::kSawtooth);
  CHECK_THROWS_AS(parse_terrain("lava"), ConfigError);
}

TEST_CASE("contact reports penetration depth and outward normal") {
  const Terrain flat = make_terrain(TerrainKind::kFlat);
  auto c = flat.contact({3.0, -0.01});
  CHECK(c.depth == doctest::Approx(0.01));
  CHECK(c.normal.x == doctest::Approx(0.0));
  CHECK(c.normal.y == doctest::Approx(1.0));
  CHECK(flat.contact({3.0, 0.5}).depth == 0.0);

  // Just inside a 45-degree spike face the depth is the perpendicular distance.
  const Terrain spiky = make_terrain(TerrainKind::kSpiky);
  c = spiky.contact({0.25, 0.15});
  CHECK(c.depth == doctest::Approx(0.1 / std::sqrt(2.0)));
  CHECK(c.normal.x == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(c.normal.y == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("mirrored terrain reflects heights") {
  const Terrain saw = make_terrain(TerrainKind::kSawtooth);
  const Terrain m = saw.mirrored();
  for (double x = -50.0; x <= 50.0; x += 0.173) {
    CHECK(m.height_at(-x) == doctest::Approx(saw.height_at(x)).epsilon(1e-12));
  }
}

TEST_CASE("terrain CSV export lists every vertex") {
  const Terrain spiky = make_terrain(TerrainKind::kSpiky);
  std::ostringstream os;
  spiky.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "x,y");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == spiky.vertices().size());
}

TEST_CASE("invalid profiles are rejected") {
  CHECK_THROWS_AS(Terrain("bad", {{0.0, 0.0}, {0.0, 1.0}}), ConstructionError);
  CHECK_THROWS_AS(Terrain("bad", {{0.0, 0.0}}), ConstructionError);
  TerrainOptions opts;
  opts.sawtooth_fall_fraction = 1.5;
  CHECK_THROWS_AS(make_terrain(TerrainKind::kSawtooth, opts), ConfigError);
}
