#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "softgait/terrain.hpp"
#include "softgait/vec2.hpp"

namespace softgait {

struct PointMass {
  Vec2 position;
  Vec2 velocity;
  double mass = 1.0;
};

/// Spring-damper between two masses. The effective rest length is
/// rest_length_base scaled by a blend of the owning voxels' rest scales:
/// gain * scale[owners[0]] + (1 - gain) * scale[owners[1]].
struct Spring {
  std::array<std::size_t, 2> ends{};
  double rest_length_base = 1.0;
  double stiffness = 0.0;
  double damping = 0.0;
  std::array<std::size_t, 2> owners{};
  double actuation_gain = 1.0;
};

/// Corner order is SW, SE, NE, NW. Spring order is bottom, right, top, left,
/// SW-NE diagonal, SE-NW diagonal.
struct Voxel {
  std::array<std::size_t, 4> corners{};
  std::array<std::size_t, 6> springs{};
};

/// One spring acting on a mass; sign is +1 when the mass is ends[0].
struct Incidence {
  std::size_t spring = 0;
  double sign = 1.0;
  bool operator==(const Incidence&) const = default;
};

struct SoftBody {
  std::vector<PointMass> masses;
  std::vector<Spring> springs;
  std::vector<Voxel> voxels;
  double time = 0.0;
  // Per-mass order in which spring forces are summed. Empty means spring
  // index order. VoxelGridBuilder emits a mirror-invariant order so that a
  // reflected body sums its forces in the reflected order, bit for bit.
  std::vector<std::vector<Incidence>> incidence;

  /// Throws ConstructionError if any structural invariant is broken:
  /// positive masses, distinct in-range spring ends, positive rest lengths,
  /// 4 corners and 6 springs per voxel, connected spring graph.
  void validate() const;
  bool is_finite() const;
};

struct SimConfig {
  double dt = 1.0e-3;
  double gravity = 9.81;
  double contact_stiffness = 50'000.0;
  double contact_damping = 50.0;
  double friction_mu = 0.8;
  // Slope of the regularized friction law below the Coulomb limit (force per
  // unit sliding speed).
  double friction_viscosity = 500.0;
  double max_penetration_tolerance = 0.02;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  bool operator==(const SimConfig&) const = default;
};

struct VoxelMaterial {
  double corner_mass = 1.0;
  double edge_stiffness = 5000.0;
  double diagonal_stiffness = 2500.0;
  double damping = 20.0;

  void validate() const;
  bool operator==(const VoxelMaterial&) const = default;
};

/// Assembles a body from unit-grid voxels. Corners and edges shared between
/// neighbouring voxels are created once; a shared edge is owned by both
/// voxels with an even actuation blend.
class VoxelGridBuilder {
 public:
  VoxelGridBuilder(double edge_length, VoxelMaterial material);

  /// Adds the voxel occupying grid cell (col, row); returns its index.
  /// Grid cells are mirror-symmetric about the centre of the occupied
  /// columns only if the caller's layout is.
  std::size_t add_voxel(int col, int row);
  /// Index of the mass at grid corner (i, j); throws if absent.
  std::size_t corner(int i, int j) const;
  SoftBody build(Vec2 origin) const;

 private:
  std::size_t corner_or_create(int i, int j);
  std::size_t edge_or_create(std::size_t a, std::size_t b, double stiffness,
                             std::size_t voxel);

  double edge_length_;
  VoxelMaterial material_;
  std::vector<std::array<int, 2>> corner_grid_;
  std::vector<Spring> springs_;
  std::vector<Voxel> voxels_;
};

/// Force on every mass: spring Hooke + dashpot terms, gravity, and terrain
/// contact. rest_scale has one entry per voxel, each in (0, 2).
std::vector<Vec2> accumulate_forces(const SoftBody& body, std::span<const double> rest_scale,
                                    const Terrain& terrain, const SimConfig& config);
void accumulate_forces(const SoftBody& body, std::span<const double> rest_scale,
                       const Terrain& terrain, const SimConfig& config,
                       std::span<Vec2> forces);

/// Penalty normal force plus regularized Coulomb friction for one mass.
Vec2 contact_force(const PointMass& mass, const Terrain& terrain, const SimConfig& config);

/// One semi-implicit Euler step of length config.dt.
void step(SoftBody& body, std::span<const double> rest_scale, const Terrain& terrain,
          const SimConfig& config);

/// Steps a body repeatedly with a reusable force buffer.
class Simulation {
 public:
  Simulation(SoftBody body, const Terrain& terrain, SimConfig config);

  void step(std::span<const double> rest_scale);
  const SoftBody& body() const { return body_; }
  SoftBody& body() { return body_; }
  const SimConfig& config() const { return config_; }

 private:
  SoftBody body_;
  const Terrain* terrain_;
  SimConfig config_;
  std::vector<Vec2> forces_;
  std::vector<Vec2> spring_forces_;
};

Vec2 linear_momentum(const SoftBody& body);
Vec2 center_of_mass(const SoftBody& body);
double kinetic_energy(const SoftBody& body);
double spring_potential_energy(const SoftBody& body, std::span<const double> rest_scale);
/// Largest distance any mass lies below the terrain surface.
double max_penetration(const SoftBody& body, const Terrain& terrain);
double max_speed(const SoftBody& body);

}  // namespace softgait
