#pragma once

#include <array>
#include <span>
#include <vector>

#include "softgait/sim.hpp"
#include "softgait/terrain.hpp"

namespace softgait {

/// Five genes in [0, 1]: amplitude, frequency, then the phase of the left,
/// middle and right columns.
class Genotype {
 public:
  static constexpr std::size_t kSize = 5;

  Genotype() = default;
  /// Throws ValidationError if any gene is outside [0, 1] or non-finite.
  explicit Genotype(std::array<double, kSize> genes);
  static Genotype from_span(std::span<const double> genes);

  const std::array<double, kSize>& genes() const { return genes_; }
  double operator[](std::size_t i) const { return genes_[i]; }
  double amplitude_gene() const { return genes_[0]; }
  double frequency_gene() const { return genes_[1]; }

  bool operator==(const Genotype&) const = default;

 private:
  std::array<double, kSize> genes_{};
};

struct ActuationRanges {
  double amplitude_max = 0.25;
  double frequency_min = 0.25;  // Hz
  double frequency_max = 4.0;   // Hz

  void validate() const;
  bool operator==(const ActuationRanges&) const = default;
};

struct ControlParams {
  double amplitude = 0.0;
  double frequency = 0.0;
  std::array<double, 3> column_phase{};
};

ControlParams decode(const Genotype& g, const ActuationRanges& ranges = {});

struct GridCell {
  int col = 0;
  int row = 0;
  bool operator==(const GridCell&) const = default;
};

struct BipedLayout {
  // Left column full, middle column top only, right column full.
  std::vector<GridCell> cells{{0, 0}, {0, 1}, {1, 1}, {2, 0}, {2, 1}};
  double edge_length = 1.0;
  // Horizontal spawn position of the body centre and extra vertical offset.
  Vec2 spawn_offset{0.0, 0.0};
  double spawn_clearance = 0.1;
  VoxelMaterial material{};

  /// Exactly 5 voxels over exactly 3 columns, outer columns 2 voxels, middle 1.
  void validate() const;
  bool operator==(const BipedLayout&) const = default;
};

/// Indices of the rest-pose extreme corners, tracked by identity.
struct CornerMarkers {
  std::size_t south_west = 0;  // minimises x + y
  std::size_t north_east = 0;  // maximises x + y
  std::size_t south_east = 0;  // maximises x - y
  std::size_t north_west = 0;  // minimises x - y
};

struct Biped {
  SoftBody body;
  std::vector<int> voxel_columns;  // 0 = left, 1 = middle, 2 = right
  std::vector<Vec2> rest_pose;     // mass positions at spawn
  CornerMarkers corners;
};

/// Builds the biped with its lowest point spawn_clearance above the terrain.
/// Throws ConstructionError if a mass would start below the surface.
Biped build_biped(const BipedLayout& layout, const Terrain& terrain);

/// Per-voxel rest-length scale 1 + amplitude * sin(2 pi f t + phase[column]).
void rest_scale_at(const ControlParams& params, std::span<const int> voxel_columns, double t,
                   std::span<double> out);
std::vector<double> rest_scale_at(const ControlParams& params,
                                  std::span<const int> voxel_columns, double t);

}  // namespace softgait
