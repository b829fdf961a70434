#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "softgait/vec2.hpp"

namespace softgait {

enum class TerrainKind { kFlat, kSpiky, kLongSpikes, kLongerSpikes, kSawtooth, kValley };

inline constexpr TerrainKind kAllTerrains[] = {
    TerrainKind::kFlat,         TerrainKind::kSpiky,    TerrainKind::kLongSpikes,
    TerrainKind::kLongerSpikes, TerrainKind::kSawtooth, TerrainKind::kValley};

std::string_view terrain_name(TerrainKind kind);
// Accepts the six canonical names plus "sparsespike" as an alias of sawtooth.
// Throws ConfigError for anything else.
TerrainKind parse_terrain(std::string_view name);

struct TerrainOptions {
  double half_extent = 200.0;
  double spike_height = 0.5;
  double valley_slope = 0.2;
  double sawtooth_period = 1.5;
  // Fraction of the sawtooth period spent on the short (falling) face.
  double sawtooth_fall_fraction = 1.0 / 3.0;
  // Mirror the sawtooth so the long face descends instead of rises.
  bool sawtooth_reversed = false;

  bool operator==(const TerrainOptions&) const = default;
};

/// Piecewise-linear ground profile y = h(x). Vertices have strictly
/// increasing x; the profile is immutable once constructed.
class Terrain {
 public:
  Terrain(std::string name, std::vector<Vec2> vertices, double period = 0.0);

  const std::string& name() const { return name_; }
  std::span<const Vec2> vertices() const { return vertices_; }
  double x_min() const { return vertices_.front().x; }
  double x_max() const { return vertices_.back().x; }
  // Horizontal period for periodic profiles, 0 otherwise.
  double period() const { return period_; }

  /// Linear interpolation between the bracketing vertices.
  /// Throws OutOfExtentError when x lies outside [x_min, x_max].
  double height_at(double x) const;

  struct Contact {
    double depth = 0.0;  // distance from the point to the surface, > 0 when penetrating
    Vec2 normal{0.0, 1.0};  // unit vector pointing out of the ground
  };
  /// Penetration of point p into the solid region below the profile.
  /// depth == 0 when p is on or above the surface.
  Contact contact(Vec2 p) const;

  /// Reflection about the vertical axis x = 0.
  Terrain mirrored() const;

  void write_csv(std::ostream& os) const;

 private:
  std::size_t segment_index(double x) const;

  std::string name_;
  std::vector<Vec2> vertices_;
  double period_;
};

Terrain make_terrain(TerrainKind kind, const TerrainOptions& options = {});

}  // namespace softgait
