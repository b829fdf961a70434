#include "softgait/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "softgait/errors.hpp"

namespace softgait {

Genotype::Genotype(std::array<double, kSize> genes) : genes_(genes) {
  for (std::size_t i = 0; i < kSize; ++i) {
    if (!(genes_[i] >= 0.0 && genes_[i] <= 1.0)) {
      throw ValidationError("genotype: gene " + std::to_string(i) + " = " +
                            std::to_string(genes_[i]) + " outside [0, 1]");
    }
  }
}

Genotype Genotype::from_span(std::span<const double> genes) {
  if (genes.size() != kSize) {
    throw ValidationError("genotype: expected 5 genes, got " + std::to_string(genes.size()));
  }
  std::array<double, kSize> a{};
  std::copy(genes.begin(), genes.end(), a.begin());
  return Genotype(a);
}

void ActuationRanges::validate() const {
  if (!(amplitude_max >= 0.0 && amplitude_max < 1.0)) {
    throw ConfigError("actuation.amplitude_max: must lie in [0, 1)");
  }
  if (!(frequency_min > 0.0 && std::isfinite(frequency_min))) {
    throw ConfigError("actuation.frequency_min: must be positive");
  }
  if (!(frequency_max >= frequency_min && std::isfinite(frequency_max))) {
    throw ConfigError("actuation.frequency_max: must be >= frequency_min");
  }
}

ControlParams decode(const Genotype& g, const ActuationRanges& ranges) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  ControlParams p;
  p.amplitude = g[0] * ranges.amplitude_max;
  p.frequency = ranges.frequency_min + g[1] * (ranges.frequency_max - ranges.frequency_min);
  for (std::size_t k = 0; k < 3; ++k) {
    const double phase = g[2 + k] * kTwoPi;
    p.column_phase[k] = phase >= kTwoPi ? phase - kTwoPi : phase;
  }
  return p;
}

void BipedLayout::validate() const {
  if (cells.size() != 5) throw ConfigError("layout.cells: biped needs exactly 5 voxels");
  std::array<int, 3> per_column{};
  int min_col = std::numeric_limits<int>::max();
  for (const GridCell& c : cells) min_col = std::min(min_col, c.col);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const int col = cells[i].col - min_col;
    if (col < 0 || col > 2) throw ConfigError("layout.cells: voxels must span exactly 3 columns");
    ++per_column[static_cast<std::size_t>(col)];
    for (std::size_t j = 0; j < i; ++j) {
      if (cells[i] == cells[j]) throw ConfigError("layout.cells: duplicate cell");
    }
  }
  if (per_column[0] != 2 || per_column[1] != 1 || per_column[2] != 2) {
    throw ConfigError("layout.cells: outer columns need 2 voxels and the middle column 1");
  }
  if (!(edge_length > 0.0)) throw ConfigError("layout.edge_length: must be positive");
  if (!(spawn_clearance >= 0.0)) throw ConfigError("layout.spawn_clearance: must be >= 0");
  if (!spawn_offset.is_finite()) throw ConfigError("layout.spawn_offset: must be finite");
  material.validate();
}

Biped build_biped(const BipedLayout& layout, const Terrain& terrain) {
  layout.validate();
  int min_col = std::numeric_limits<int>::max();
  int max_col = std::numeric_limits<int>::min();
  for (const GridCell& c : layout.cells) {
    min_col = std::min(min_col, c.col);
    max_col = std::max(max_col, c.col + 1);
  }

  VoxelGridBuilder builder(layout.edge_length, layout.material);
  Biped biped;
  for (const GridCell& c : layout.cells) {
    builder.add_voxel(c.col, c.row);
    biped.voxel_columns.push_back(c.col - min_col);
  }

  // Centre horizontally on the spawn x, then lift until the lowest clearance
  // above the terrain equals spawn_clearance.
  const double half_width = 0.5 * (max_col - min_col) * layout.edge_length;
  const double left = layout.spawn_offset.x - half_width - min_col * layout.edge_length;
  SoftBody body = builder.build({left, 0.0});
  double lift = -std::numeric_limits<double>::infinity();
  for (const PointMass& m : body.masses) {
    lift = std::max(lift, terrain.height_at(m.position.x) + layout.spawn_clearance - m.position.y);
  }
  lift += layout.spawn_offset.y;
  for (PointMass& m : body.masses) m.position.y += lift;
  for (const PointMass& m : body.masses) {
    if (m.position.y < terrain.height_at(m.position.x)) {
      throw ConstructionError("biped: mass starts below the terrain surface");
    }
  }

  auto extreme = [&](auto key) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < body.masses.size(); ++i) {
      if (key(body.masses[i].position) > key(body.masses[best].position)) best = i;
    }
    return best;
  };
  biped.corners.south_west = extreme([](Vec2 p) { return -(p.x + p.y); });
  biped.corners.north_east = extreme([](Vec2 p) { return p.x + p.y; });
  biped.corners.south_east = extreme([](Vec2 p) { return p.x - p.y; });
  biped.corners.north_west = extreme([](Vec2 p) { return -(p.x - p.y); });

  for (const PointMass& m : body.masses) biped.rest_pose.push_back(m.position);
  biped.body = std::move(body);
  return biped;
}

void rest_scale_at(const ControlParams& params, std::span<const int> voxel_columns, double t,
                   std::span<double> out) {
  if (out.size() != voxel_columns.size()) {
    throw ValidationError("rest_scale_at: output size must match voxel count");
  }
  const double omega_t = 2.0 * std::numbers::pi * params.frequency * t;
  std::array<double, 3> column_scale{};
  for (std::size_t k = 0; k < 3; ++k) {
    column_scale[k] = 1.0 + params.amplitude * std::sin(omega_t + params.column_phase[k]);
  }
  for (std::size_t v = 0; v < voxel_columns.size(); ++v) {
    out[v] = column_scale[static_cast<std::size_t>(voxel_columns[v])];
  }
}

std::vector<double> rest_scale_at(const ControlParams& params,
                                  std::span<const int> voxel_columns, double t) {
  std::vector<double> out(voxel_columns.size());
  rest_scale_at(params, voxel_columns, t, out);
  return out;
}

}  // namespace softgait
