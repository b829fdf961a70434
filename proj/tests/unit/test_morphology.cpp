#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "doctest.h"
#include "softgait/errors.hpp"
#include "softgait/morphology.hpp"

using namespace softgait;

TEST_CASE("decode maps genes onto physical ranges") {
  const ControlParams p = decode(Genotype({0.5, 0.0, 0.0, 0.25, 1.0}));
  CHECK(p.amplitude == doctest::Approx(0.125));
  CHECK(p.frequency == doctest::Approx(0.25));
  CHECK(p.column_phase[0] == doctest::Approx(0.0));
  CHECK(p.column_phase[1] == doctest::Approx(std::numbers::pi / 2));
  // A full turn wraps to zero.
  CHECK(p.column_phase[2] == doctest::Approx(0.0));

  const ControlParams q = decode(Genotype({1.0, 1.0, 0.0, 0.0, 0.0}));
  CHECK(q.amplitude == doctest::Approx(0.25));
  CHECK(q.frequency == doctest::Approx(4.0));
}

TEST_CASE("decode is monotone in amplitude and frequency") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng);
    const auto pa = decode(Genotype({a, a, 0, 0, 0}));
    const auto pb = decode(Genotype({b, b, 0, 0, 0}));
    if (a <= b) {
      REQUIRE(pa.amplitude <= pb.amplitude);
      REQUIRE(pa.frequency <= pb.frequency);
    }
  }
}

TEST_CASE("genotype rejects out-of-range and non-finite genes") {
  CHECK_THROWS_AS(Genotype({1.2, 0, 0, 0, 0}), ValidationError);
  CHECK_THROWS_AS(Genotype({-0.1, 0, 0, 0, 0}), ValidationError);
  CHECK_THROWS_AS(Genotype({std::nan(""), 0, 0, 0, 0}), ValidationError);
  const std::vector<double> short_genes{0.1, 0.2};
  CHECK_THROWS_AS(Genotype::from_span(short_genes), ValidationError);
}

TEST_CASE("biped mass and spring counts match a grid enumeration") {
  const BipedLayout layout;
  std::set<std::pair<int, int>> corners;
  std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> edges;
  std::size_t diagonals = 0;
  for (const GridCell& c : layout.cells) {
    const std::pair<int, int> sw{c.col, c.row}, se{c.col + 1, c.row},
        ne{c.col + 1, c.row + 1}, nw{c.col, c.row + 1};
    for (auto k : {sw, se, ne, nw}) corners.insert(k);
    for (auto [a, b] : {std::pair{sw, se}, {se, ne}, {nw, ne}, {sw, nw}}) edges.insert({a, b});
    diagonals += 2;
  }
  const Biped biped = build_biped(layout, make_terrain(TerrainKind::kFlat));
  CHECK(corners.size() == 12);
  CHECK(biped.body.masses.size() == corners.size());
  CHECK(biped.body.springs.size() == edges.size() + diagonals);
  CHECK(biped.body.springs.size() == 26);
  CHECK(biped.body.voxels.size() == 5);
  CHECK_NOTHROW(biped.body.validate());
}

TEST_CASE("biped spawns centred with the requested clearance") {
  for (TerrainKind kind : kAllTerrains) {
    const Terrain t = make_terrain(kind);
    CAPTURE(t.name());
    const Biped biped = build_biped(BipedLayout{}, t);
    double clearance = 1e9, min_x = 1e9, max_x = -1e9;
    for (const auto& m : biped.body.masses) {
      clearance = std::min(clearance, m.position.y - t.height_at(m.position.x));
      min_x = std::min(min_x, m.position.x);
      max_x = std::max(max_x, m.position.x);
    }
    CHECK(clearance == doctest::Approx(0.1));
    CHECK(0.5 * (min_x + max_x) == doctest::Approx(0.0));
  }
}

TEST_CASE("corner markers pick the rest-pose extremes") {
  const Biped biped = build_biped(BipedLayout{}, make_terrain(TerrainKind::kFlat));
  const auto& r = biped.rest_pose;
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(r[biped.corners.south_west].x + r[biped.corners.south_west].y <= r[i].x + r[i].y);
    CHECK(r[biped.corners.north_east].x + r[biped.corners.north_east].y >= r[i].x + r[i].y);
    CHECK(r[biped.corners.south_east].x - r[biped.corners.south_east].y >= r[i].x - r[i].y);
    CHECK(r[biped.corners.north_west].x - r[biped.corners.north_west].y <= r[i].x - r[i].y);
  }
}

TEST_CASE("rest scale follows the column sinusoid") {
  const Biped biped = build_biped(BipedLayout{}, make_terrain(TerrainKind::kFlat));
  const ControlParams p{0.2, 1.0, {0.0, std::numbers::pi / 2, std::numbers::pi}};
  const auto s = rest_scale_at(p, biped.voxel_columns, 0.25);
  std::map<int, double> by_column;
  for (std::size_t v = 0; v < s.size(); ++v) {
    const int col = biped.voxel_columns[v];
    if (by_column.count(col)) CHECK(by_column[col] == s[v]);
    by_column[col] = s[v];
  }
  CHECK(by_column[0] == doctest::Approx(1.2));
  CHECK(by_column[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(by_column[2] == doctest::Approx(0.8));

  const ControlParams still{0.0, 2.0, {1.0, 2.0, 3.0}};
  for (double x : rest_scale_at(still, biped.voxel_columns, 3.7)) CHECK(x == 1.0);
}

TEST_CASE("rest scale stays within the amplitude band") {
  const Biped biped = build_biped(BipedLayout{}, make_terrain(TerrainKind::kFlat));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const Genotype g({u(rng), u(rng), u(rng), u(rng), u(rng)});
    const ControlParams p = decode(g);
    for (double x : rest_scale_at(p, biped.voxel_columns, 25.0 * u(rng))) {
      REQUIRE(x >= 1.0 - p.amplitude - 1e-15);
      REQUIRE(x <= 1.0 + p.amplitude + 1e-15);
    }
  }
}

TEST_CASE("equal outer phases give equal outer scales") {
  const Biped biped = build_biped(BipedLayout{}, make_terrain(TerrainKind::kFlat));
  const ControlParams p{0.2, 1.3, {0.7, 2.0, 0.7}};
  for (double t = 0.0; t < 5.0; t += 0.31) {
    const auto s = rest_scale_at(p, biped.voxel_columns, t);
    for (std::size_t a = 0; a < s.size(); ++a) {
      for (std::size_t b = 0; b < s.size(); ++b) {
        if (biped.voxel_columns[a] + biped.voxel_columns[b] == 2) CHECK(s[a] == s[b]);
      }
    }
  }
}

TEST_CASE("layout validation rejects non-biped shapes") {
  BipedLayout four;
  four.cells.pop_back();
  CHECK_THROWS_AS(four.validate(), ConfigError);
  BipedLayout wide;
  wide.cells.back() = {3, 1};
  CHECK_THROWS_AS(wide.validate(), ConfigError);
  BipedLayout dup;
  dup.cells[1] = dup.cells[0];
  CHECK_THROWS(dup.validate());
}
