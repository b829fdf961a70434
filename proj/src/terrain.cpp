#include "softgait/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "softgait/errors.hpp"

namespace softgait {

std::string_view terrain_name(TerrainKind kind) {
  switch (kind) {
    case TerrainKind::kFlat: return "flat";
    case TerrainKind::kSpiky: return "spiky";
    case TerrainKind::kLongSpikes: return "longspikes";
    case TerrainKind::kLongerSpikes: return "longerspikes";
    case TerrainKind::kSawtooth: return "sawtooth";
    case TerrainKind::kValley: return "valley";
  }
  return "unknown";
}

TerrainKind parse_terrain(std::string_view name) {
  for (TerrainKind kind : kAllTerrains) {
    if (terrain_name(kind) == name) return kind;
  }
  if (name == "sparsespike") return TerrainKind::kSawtooth;
  throw ConfigError("terrain: unknown terrain name '" + std::string(name) + "'");
}

Terrain::Terrain(std::string name, std::vector<Vec2> vertices, double period)
    : name_(std::move(name)), vertices_(std::move(vertices)), period_(period) {
  if (vertices_.size() < 2) {
    throw ConstructionError("terrain '" + name_ + "': profile needs at least two vertices");
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!vertices_[i].is_finite()) {
      throw ConstructionError("terrain '" + name_ + "': non-finite vertex");
    }
    if (i > 0 && !(vertices_[i].x > vertices_[i - 1].x)) {
      throw ConstructionError("terrain '" + name_ + "': vertex x must be strictly increasing");
    }
  }
}

std::size_t Terrain::segment_index(double x) const {
  // First vertex strictly greater than x, minus one; clamped so x_max maps
  // onto the final segment.
  auto it = std::upper_bound(vertices_.begin(), vertices_.end(), x,
                             [](double value, const Vec2& v) { return value < v.x; });
  auto idx = static_cast<std::size_t>(std::distance(vertices_.begin(), it));
  if (idx == 0) return 0;
  return std::min(idx - 1, vertices_.size() - 2);
}

double Terrain::height_at(double x) const {
  if (!(x >= x_min() && x <= x_max())) {
    throw OutOfExtentError("terrain '" + name_ + "': x=" + std::to_string(x) +
                           " outside profile extent");
  }
  const std::size_t i = segment_index(x);
  const Vec2& a = vertices_[i];
  const Vec2& b = vertices_[i + 1];
  return a.y + (b.y - a.y) * ((x - a.x) / (b.x - a.x));
}

Terrain::Contact Terrain::contact(Vec2 p) const {
  const double surface = height_at(p.x);
  const double vertical = surface - p.y;
  if (vertical <= 0.0) return {};

  // The true distance to the surface never exceeds the vertical depth, so only
  // segments overlapping [x - vertical, x + vertical] can hold the closest point.
  const std::size_t first = segment_index(std::max(x_min(), p.x - vertical));
  const std::size_t last = segment_index(std::min(x_max(), p.x + vertical));

  Contact best;
  best.depth = std::numeric_limits<double>::infinity();
  for (std::size_t i = first; i <= last; ++i) {
    const Vec2 a = vertices_[i];
    const Vec2 b = vertices_[i + 1];
    const Vec2 d = b - a;
    const double len = d.norm();
    const Vec2 seg_normal = Vec2{-d.y, d.x} / len;
    const double t = (p - a).dot(d) / (len * len);
    double depth;
    Vec2 normal;
    if (t > 0.0 && t < 1.0) {
      depth = (a - p).dot(seg_normal);
      normal = seg_normal;
    } else {
      const Vec2 q = t <= 0.0 ? a : b;
      const Vec2 to_surface = q - p;
      depth = to_surface.norm();
      normal = depth > 1e-12 ? to_surface / depth : seg_normal;
    }
    if (depth < best.depth) {
      best.depth = depth;
      best.normal = normal;
    }
  }
  if (!(best.depth > 0.0)) return {};
  return best;
}

Terrain Terrain::mirrored() const {
  std::vector<Vec2> flipped;
  flipped.reserve(vertices_.size());
  for (auto it = vertices_.rbegin(); it != vertices_.rend(); ++it) {
    flipped.push_back({-it->x, it->y});
  }
  return Terrain(name_ + "_mirrored", std::move(flipped), period_);
}

void Terrain::write_csv(std::ostream& os) const {
  const auto old_precision = os.precision(17);
  os << "x,y\n";
  for (const Vec2& v : vertices_) os << v.x << ',' << v.y << '\n';
  os.precision(old_precision);
}

namespace {

// Periodic profile from one period's interior vertices, tiled over the extent.
Terrain tile(std::string name, double period, const std::vector<Vec2>& cell,
             double half_extent) {
  const auto k_min = static_cast<long>(std::floor(-half_extent / period));
  const auto k_max = static_cast<long>(std::ceil(half_extent / period));
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(k_max - k_min) * (cell.size() + 1) + 1);
  for (long k = k_min; k < k_max; ++k) {
    const double origin = static_cast<double>(k) * period;
    vertices.push_back({origin, 0.0});
    for (const Vec2& v : cell) vertices.push_back({origin + v.x, v.y});
  }
  vertices.push_back({static_cast<double>(k_max) * period, 0.0});
  return Terrain(std::move(name), std::move(vertices), period);
}

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(std::string("terrain.") + field + ": must be positive and finite");
  }
}

}  // namespace

Terrain make_terrain(TerrainKind kind, const TerrainOptions& options) {
  require_positive(options.half_extent, "half_extent");
  require_positive(options.spike_height, "spike_height");
  const double e = options.half_extent;
  const double h = options.spike_height;
  const std::string name(terrain_name(kind));

  auto triangles = [&](double period) {
    return tile(name, period, {{period / 2.0, h}}, e);
  };

  switch (kind) {
    case TerrainKind::kFlat:
      return Terrain(name, {{-e, 0.0}, {e, 0.0}});
    case TerrainKind::kSpiky:
      return triangles(1.0);
    case TerrainKind::kLongSpikes:
      return triangles(2.0);
    case TerrainKind::kLongerSpikes:
      return triangles(4.0);
    case TerrainKind::kSawtooth: {
      require_positive(options.sawtooth_period, "sawtooth_period");
      const double f = options.sawtooth_fall_fraction;
      if (!(f > 0.0 && f < 1.0)) {
        throw ConfigError("terrain.sawtooth_fall_fraction: must lie in (0, 1)");
      }
      const double p = options.sawtooth_period;
      const double apex = options.sawtooth_reversed ? f * p : (1.0 - f) * p;
      return tile(name, p, {{apex, h}}, e);
    }
    case TerrainKind::kValley: {
      if (!(options.valley_slope >= 0.0) || !std::isfinite(options.valley_slope)) {
        throw ConfigError("terrain.valley_slope: must be non-negative and finite");
      }
      const double s = options.valley_slope;
      return Terrain(name, {{-e, s * e}, {0.0, 0.0}, {e, s * e}});
    }
  }
  throw ConfigError("terrain: unknown terrain kind");
}

}  // namespace softgait
