#include "softgait/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "softgait/errors.hpp"

namespace softgait {

namespace {

void require(bool ok, const std::string& field, const char* rule) {
  if (!ok) throw ConfigError(field + ": " + rule);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void SimConfig::validate() const {
  require(finite_pos(dt), "sim.dt", "must be positive");
  require(finite_nonneg(gravity), "sim.gravity", "must be non-negative");
  require(finite_nonneg(contact_stiffness), "sim.contact_stiffness", "must be non-negative");
  require(finite_nonneg(contact_damping), "sim.contact_damping", "must be non-negative");
  require(finite_nonneg(friction_mu), "sim.friction_mu", "must be non-negative");
  require(finite_nonneg(friction_viscosity), "sim.friction_viscosity", "must be non-negative");
  require(finite_pos(max_penetration_tolerance), "sim.max_penetration_tolerance",
          "must be positive");
}

void VoxelMaterial::validate() const {
  require(finite_pos(corner_mass), "material.corner_mass", "must be positive");
  require(finite_pos(edge_stiffness), "material.edge_stiffness", "must be positive");
  require(finite_pos(diagonal_stiffness), "material.diagonal_stiffness", "must be positive");
  require(finite_nonneg(damping), "material.damping", "must be non-negative");
}

void SoftBody::validate() const {
  const std::size_t n = masses.size();
  for (const PointMass& m : masses) {
    if (!(m.mass > 0.0)) throw ConstructionError("soft body: mass must be positive");
  }
  if (!is_finite()) throw ConstructionError("soft body: non-finite state");
  for (const Spring& s : springs) {
    if (s.ends[0] >= n || s.ends[1] >= n || s.ends[0] == s.ends[1]) {
      throw ConstructionError("soft body: spring endpoints must be distinct and in range");
    }
    if (!(s.rest_length_base > 0.0)) {
      throw ConstructionError("soft body: spring rest length must be positive");
    }
    if (!voxels.empty() && (s.owners[0] >= voxels.size() || s.owners[1] >= voxels.size())) {
      throw ConstructionError("soft body: spring owner voxel out of range");
    }
  }
  if (!incidence.empty()) {
    if (incidence.size() != n) throw ConstructionError("soft body: incidence size mismatch");
    std::vector<int> uses(springs.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (const Incidence& inc : incidence[i]) {
        if (inc.spring >= springs.size()) throw ConstructionError("soft body: bad incidence");
        const Spring& s = springs[inc.spring];
        const bool ok = (inc.sign > 0 && s.ends[0] == i) || (inc.sign < 0 && s.ends[1] == i);
        if (!ok) throw ConstructionError("soft body: incidence does not match spring ends");
        ++uses[inc.spring];
      }
    }
    for (int u : uses) {
      if (u != 2) throw ConstructionError("soft body: every spring needs both incidences");
    }
  }
  for (const Voxel& v : voxels) {
    for (std::size_t c : v.corners) {
      if (c >= n) throw ConstructionError("soft body: voxel corner out of range");
    }
    for (std::size_t s : v.springs) {
      if (s >= springs.size()) throw ConstructionError("soft body: voxel spring out of range");
    }
  }
  if (n == 0) return;
  // Connectivity by flood fill over the spring graph.
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t cur = stack.back();
    stack.pop_back();
    for (const Spring& s : springs) {
      std::size_t other;
      if (s.ends[0] == cur) other = s.ends[1];
      else if (s.ends[1] == cur) other = s.ends[0];
      else continue;
      if (!seen[other]) {
        seen[other] = true;
        ++reached;
        stack.push_back(other);
      }
    }
  }
  if (reached != n) throw ConstructionError("soft body: spring graph is not connected");
}

bool SoftBody::is_finite() const {
  return std::all_of(masses.begin(), masses.end(), [](const PointMass& m) {
    return m.position.is_finite() && m.velocity.is_finite();
  });
}

VoxelGridBuilder::VoxelGridBuilder(double edge_length, VoxelMaterial material)
    : edge_length_(edge_length), material_(material) {
  if (!finite_pos(edge_length)) throw ConfigError("voxel edge length: must be positive");
  material_.validate();
}

std::size_t VoxelGridBuilder::corner(int i, int j) const {
  for (std::size_t k = 0; k < corner_grid_.size(); ++k) {
    if (corner_grid_[k][0] == i && corner_grid_[k][1] == j) return k;
  }
  throw ConstructionError("voxel grid: no corner at (" + std::to_string(i) + ", " +
                          std::to_string(j) + ")");
}

std::size_t VoxelGridBuilder::corner_or_create(int i, int j) {
  for (std::size_t k = 0; k < corner_grid_.size(); ++k) {
    if (corner_grid_[k][0] == i && corner_grid_[k][1] == j) return k;
  }
  corner_grid_.push_back({i, j});
  return corner_grid_.size() - 1;
}

std::size_t VoxelGridBuilder::edge_or_create(std::size_t a, std::size_t b, double stiffness,
                                             std::size_t voxel) {
  for (std::size_t k = 0; k < springs_.size(); ++k) {
    Spring& s = springs_[k];
    const bool same = (s.ends[0] == a && s.ends[1] == b) || (s.ends[0] == b && s.ends[1] == a);
    if (!same) continue;
    if (s.owners[0] != s.owners[1]) {
      throw ConstructionError("voxel grid: edge shared by more than two voxels");
    }
    s.owners[1] = voxel;
    s.actuation_gain = 0.5;
    return k;
  }
  const auto& pa = corner_grid_[a];
  const auto& pb = corner_grid_[b];
  const double grid_len = std::hypot(pb[0] - pa[0], pb[1] - pa[1]);
  Spring s;
  s.ends = {a, b};
  s.rest_length_base = grid_len * edge_length_;
  s.stiffness = stiffness;
  s.damping = material_.damping;
  s.owners = {voxel, voxel};
  s.actuation_gain = 1.0;
  springs_.push_back(s);
  return springs_.size() - 1;
}

std::size_t VoxelGridBuilder::add_voxel(int col, int row) {
  const std::size_t index = voxels_.size();
  for (const Voxel& v : voxels_) {
    if (corner_grid_[v.corners[0]] == std::array<int, 2>{col, row}) {
      throw ConstructionError("voxel grid: cell (" + std::to_string(col) + ", " +
                              std::to_string(row) + ") already occupied");
    }
  }
  Voxel v;
  v.corners = {corner_or_create(col, row), corner_or_create(col + 1, row),
               corner_or_create(col + 1, row + 1), corner_or_create(col, row + 1)};
  const auto [sw, se, ne, nw] = v.corners;
  const double ke = material_.edge_stiffness;
  const double kd = material_.diagonal_stiffness;
  v.springs = {edge_or_create(sw, se, ke, index), edge_or_create(se, ne, ke, index),
               edge_or_create(nw, ne, ke, index), edge_or_create(sw, nw, ke, index),
               edge_or_create(sw, ne, kd, index), edge_or_create(se, nw, kd, index)};
  voxels_.push_back(v);
  return index;
}

SoftBody VoxelGridBuilder::build(Vec2 origin) const {
  SoftBody body;
  body.masses.reserve(corner_grid_.size());
  for (const auto& ij : corner_grid_) {
    PointMass m;
    m.position = origin + Vec2{ij[0] * edge_length_, ij[1] * edge_length_};
    m.mass = material_.corner_mass;
    body.masses.push_back(m);
  }
  body.springs = springs_;
  body.voxels = voxels_;

  // Sort each mass's springs by the rest-pose offset to the neighbour,
  // keyed on (dy, |dx|, dx * side) where side is the mass's side of the
  // centre line. The key is unchanged under reflection about that line.
  int lo = std::numeric_limits<int>::max();
  int hi = std::numeric_limits<int>::min();
  for (const auto& ij : corner_grid_) {
    lo = std::min(lo, ij[0]);
    hi = std::max(hi, ij[0]);
  }
  body.incidence.resize(corner_grid_.size());
  for (std::size_t k = 0; k < springs_.size(); ++k) {
    body.incidence[springs_[k].ends[0]].push_back({k, 1.0});
    body.incidence[springs_[k].ends[1]].push_back({k, -1.0});
  }
  for (std::size_t i = 0; i < corner_grid_.size(); ++i) {
    const int side = (2 * corner_grid_[i][0] > lo + hi) - (2 * corner_grid_[i][0] < lo + hi);
    auto key = [&](const Incidence& inc) {
      const Spring& s = springs_[inc.spring];
      const std::size_t other = s.ends[0] == i ? s.ends[1] : s.ends[0];
      const int dx = corner_grid_[other][0] - corner_grid_[i][0];
      const int dy = corner_grid_[other][1] - corner_grid_[i][1];
      return std::array<int, 3>{dy, std::abs(dx), dx * side};
    };
    std::sort(body.incidence[i].begin(), body.incidence[i].end(),
              [&](const Incidence& a, const Incidence& b) { return key(a) < key(b); });
  }
  body.validate();
  return body;
}

Vec2 contact_force(const PointMass& mass, const Terrain& terrain, const SimConfig& config) {
  const Terrain::Contact c = terrain.contact(mass.position);
  if (c.depth <= 0.0) return {};
  const double normal_speed = mass.velocity.dot(c.normal);
  const double normal_mag =
      config.contact_stiffness * c.depth - config.contact_damping * normal_speed;
  if (normal_mag <= 0.0) return {};
  Vec2 force = c.normal * normal_mag;
  const Vec2 slip = mass.velocity - c.normal * normal_speed;
  const double slip_speed = slip.norm();
  if (slip_speed > 0.0) {
    const double friction =
        std::min(config.friction_viscosity * slip_speed, config.friction_mu * normal_mag);
    force -= slip * (friction / slip_speed);
  }
  return force;
}

namespace {

inline double blended_scale(const Spring& s, std::span<const double> rest_scale) {
  if (rest_scale.empty()) return 1.0;  // body without voxels: passive springs
  return s.actuation_gain * rest_scale[s.owners[0]] +
         (1.0 - s.actuation_gain) * rest_scale[s.owners[1]];
}

}  // namespace

namespace {

void accumulate_impl(const SoftBody& body, std::span<const double> rest_scale,
                     const Terrain& terrain, const SimConfig& config, std::span<Vec2> forces,
                     std::vector<Vec2>& spring_forces) {
  if (rest_scale.size() != body.voxels.size()) {
    throw ValidationError("rest_scale: expected one entry per voxel");
  }
  for (double s : rest_scale) {
    if (!(s > 0.0 && s < 2.0)) throw ValidationError("rest_scale: entries must lie in (0, 2)");
  }
  if (forces.size() != body.masses.size()) {
    throw ValidationError("forces: expected one entry per mass");
  }
  if (!body.is_finite()) {
    throw UnstableSimulationError("non-finite body state at t=" + std::to_string(body.time),
                                  body.time);
  }

  // Force exerted on ends[0]; ends[1] receives the negation.
  spring_forces.resize(body.springs.size());
  for (std::size_t k = 0; k < body.springs.size(); ++k) {
    const Spring& s = body.springs[k];
    const PointMass& a = body.masses[s.ends[0]];
    const PointMass& b = body.masses[s.ends[1]];
    const Vec2 d = b.position - a.position;
    const double length = d.norm();
    if (!(length > 0.0)) {
      throw UnstableSimulationError("spring collapsed to zero length", body.time);
    }
    const Vec2 axis = d / length;
    const double rest = s.rest_length_base * blended_scale(s, rest_scale);
    const double stretch_rate = (b.velocity - a.velocity).dot(axis);
    spring_forces[k] = axis * (s.stiffness * (length - rest) + s.damping * stretch_rate);
  }

  for (std::size_t i = 0; i < body.masses.size(); ++i) {
    const PointMass& m = body.masses[i];
    forces[i] = Vec2{0.0, -m.mass * config.gravity} + contact_force(m, terrain, config);
  }
  if (body.incidence.empty()) {
    for (std::size_t k = 0; k < body.springs.size(); ++k) {
      forces[body.springs[k].ends[0]] += spring_forces[k];
      forces[body.springs[k].ends[1]] -= spring_forces[k];
    }
  } else {
    for (std::size_t i = 0; i < body.masses.size(); ++i) {
      for (const Incidence& inc : body.incidence[i]) {
        forces[i] += spring_forces[inc.spring] * inc.sign;
      }
    }
  }
}

}  // namespace

void accumulate_forces(const SoftBody& body, std::span<const double> rest_scale,
                       const Terrain& terrain, const SimConfig& config,
                       std::span<Vec2> forces) {
  std::vector<Vec2> spring_forces;
  accumulate_impl(body, rest_scale, terrain, config, forces, spring_forces);
}

std::vector<Vec2> accumulate_forces(const SoftBody& body, std::span<const double> rest_scale,
                                    const Terrain& terrain, const SimConfig& config) {
  std::vector<Vec2> forces(body.masses.size());
  accumulate_forces(body, rest_scale, terrain, config, forces);
  return forces;
}

namespace {

void integrate(SoftBody& body, std::span<const Vec2> forces, double dt) {
  for (std::size_t i = 0; i < body.masses.size(); ++i) {
    PointMass& m = body.masses[i];
    m.velocity += forces[i] * (dt / m.mass);
    m.position += m.velocity * dt;
  }
  body.time += dt;
  if (!body.is_finite()) {
    throw UnstableSimulationError("non-finite body state at t=" + std::to_string(body.time),
                                  body.time);
  }
}

}  // namespace

void step(SoftBody& body, std::span<const double> rest_scale, const Terrain& terrain,
          const SimConfig& config) {
  std::vector<Vec2> forces(body.masses.size());
  accumulate_forces(body, rest_scale, terrain, config, forces);
  integrate(body, forces, config.dt);
}

Simulation::Simulation(SoftBody body, const Terrain& terrain, SimConfig config)
    : body_(std::move(body)), terrain_(&terrain), config_(config),
      forces_(body_.masses.size()) {
  config_.validate();
  body_.validate();
}

void Simulation::step(std::span<const double> rest_scale) {
  accumulate_impl(body_, rest_scale, *terrain_, config_, forces_, spring_forces_);
  integrate(body_, forces_, config_.dt);
}

Vec2 linear_momentum(const SoftBody& body) {
  Vec2 p;
  for (const PointMass& m : body.masses) p += m.velocity * m.mass;
  return p;
}

Vec2 center_of_mass(const SoftBody& body) {
  Vec2 weighted;
  double total = 0.0;
  for (const PointMass& m : body.masses) {
    weighted += m.position * m.mass;
    total += m.mass;
  }
  return weighted / total;
}

double kinetic_energy(const SoftBody& body) {
  double e = 0.0;
  for (const PointMass& m : body.masses) e += 0.5 * m.mass * m.velocity.squared_norm();
  return e;
}

double spring_potential_energy(const SoftBody& body, std::span<const double> rest_scale) {
  double e = 0.0;
  for (const Spring& s : body.springs) {
    const double length = (body.masses[s.ends[1]].position - body.masses[s.ends[0]].position).norm();
    const double stretch = length - s.rest_length_base * blended_scale(s, rest_scale);
    e += 0.5 * s.stiffness * stretch * stretch;
  }
  return e;
}

double max_penetration(const SoftBody& body, const Terrain& terrain) {
  double worst = 0.0;
  for (const PointMass& m : body.masses) worst = std::max(worst, terrain.contact(m.position).depth);
  return worst;
}

double max_speed(const SoftBody& body) {
  double worst = 0.0;
  for (const PointMass& m : body.masses) worst = std::max(worst, m.velocity.norm());
  return worst;
}

}  // namespace softgait
