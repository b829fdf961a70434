#include "softgait/evaluation.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "softgait/errors.hpp"

namespace softgait {

void EvalConfig::validate() const {
  if (!(duration > 0.0 && std::isfinite(duration))) {
    throw ConfigError("eval.duration: must be positive");
  }
  if (!(settle_time >= 0.0 && std::isfinite(settle_time))) {
    throw ConfigError("eval.settle_time: must be non-negative");
  }
  if (!(descriptor_sample_rate > 0.0 && std::isfinite(descriptor_sample_rate))) {
    throw ConfigError("eval.descriptor_sample_rate: must be positive");
  }
  sim.validate();
  layout.validate();
  actuation.validate();
  const double steps_per_sample = 1.0 / (descriptor_sample_rate * sim.dt);
  if (std::abs(steps_per_sample - std::round(steps_per_sample)) > 1e-9 ||
      std::round(steps_per_sample) < 1.0) {
    throw ConfigError(
        "eval.descriptor_sample_rate: sampling period must be a whole number of physics steps");
  }
}

double horizontal_speed(double com_start_x, double com_end_x, double duration) {
  return std::abs(com_end_x - com_start_x) / duration;
}

double variance(std::span<const double> samples) {
  if (samples.empty()) throw ValidationError("variance: empty sample sequence");
  const auto n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  double acc = 0.0;
  for (double s : samples) acc += (s - mean) * (s - mean);
  return acc / n;
}

double rigid_fit_rotation(const SoftBody& body, std::span<const Vec2> rest_pose) {
  Vec2 rest_center;
  double total = 0.0;
  for (std::size_t i = 0; i < body.masses.size(); ++i) {
    rest_center += rest_pose[i] * body.masses[i].mass;
    total += body.masses[i].mass;
  }
  rest_center = rest_center / total;
  const Vec2 center = center_of_mass(body);
  double sin_sum = 0.0;
  double cos_sum = 0.0;
  for (std::size_t i = 0; i < body.masses.size(); ++i) {
    const Vec2 r0 = rest_pose[i] - rest_center;
    const Vec2 r = body.masses[i].position - center;
    sin_sum += body.masses[i].mass * r0.cross(r);
    cos_sum += body.masses[i].mass * r0.dot(r);
  }
  return std::atan2(sin_sum, cos_sum);
}

GaitResult evaluate(const Genotype& g, const Terrain& terrain, const EvalConfig& cfg,
                    const TraceSink& trace) {
  cfg.validate();
  const ControlParams params = decode(g, cfg.actuation);
  const double dt = cfg.sim.dt;
  const auto settle_steps = static_cast<long>(std::llround(cfg.settle_time / dt));
  const auto eval_steps = static_cast<long>(std::llround(cfg.duration / dt));
  const auto sample_every =
      static_cast<long>(std::llround(1.0 / (cfg.descriptor_sample_rate * dt)));

  try {
    Biped biped = build_biped(cfg.layout, terrain);
    Simulation sim(std::move(biped.body), terrain, cfg.sim);
    const auto& rest_pose = biped.rest_pose;
    const auto& corners = biped.corners;

    std::vector<double> scale(sim.body().voxels.size(), 1.0);
    for (long k = 0; k < settle_steps; ++k) sim.step(scale);

    const double com_start = center_of_mass(sim.body()).x;
    std::vector<double> diag_sw_ne;
    std::vector<double> diag_se_nw;
    std::vector<double> pitch;
    const auto expected = static_cast<std::size_t>(eval_steps / sample_every);
    diag_sw_ne.reserve(expected);
    diag_se_nw.reserve(expected);
    pitch.reserve(expected);

    for (long k = 0; k < eval_steps; ++k) {
      rest_scale_at(params, biped.voxel_columns, static_cast<double>(k) * dt, scale);
      sim.step(scale);
      if ((k + 1) % sample_every != 0) continue;

      const auto& m = sim.body().masses;
      diag_sw_ne.push_back((m[corners.north_east].position - m[corners.south_west].position).norm());
      diag_se_nw.push_back((m[corners.north_west].position - m[corners.south_east].position).norm());
      double angle = rigid_fit_rotation(sim.body(), rest_pose);
      if (!pitch.empty()) {
        // Unwrap so a sustained rotation stays continuous.
        const double jump = angle - pitch.back();
        angle -= 2.0 * std::numbers::pi * std::round(jump / (2.0 * std::numbers::pi));
      }
      pitch.push_back(angle);
      if (trace) {
        const Vec2 com = center_of_mass(sim.body());
        trace({static_cast<double>(k + 1) * dt, com.x, com.y, diag_sw_ne.back(), angle});
      }
    }

    GaitResult r;
    r.com_start_x = com_start;
    r.com_end_x = center_of_mass(sim.body()).x;
    r.fitness = horizontal_speed(r.com_start_x, r.com_end_x, cfg.duration);
    r.sample_count = static_cast<int>(pitch.size());
    const bool leftward = r.com_end_x < r.com_start_x;
    r.squish = variance(leftward ? diag_se_nw : diag_sw_ne);
    r.wobble = variance(pitch);
    if (!std::isfinite(r.fitness) || !std::isfinite(r.squish) || !std::isfinite(r.wobble)) {
      return GaitResult{.failed = true};
    }
    return r;
  } catch (const UnstableSimulationError&) {
    return GaitResult{.failed = true};
  } catch (const OutOfExtentError&) {
    return GaitResult{.failed = true};
  }
}

}  // namespace softgait
