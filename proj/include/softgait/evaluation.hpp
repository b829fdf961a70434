#pragma once

#include <functional>
#include <span>

#include "softgait/morphology.hpp"
#include "softgait/sim.hpp"
#include "softgait/terrain.hpp"

namespace softgait {

struct GaitResult {
  double fitness = 0.0;  // |horizontal COM displacement| / duration
  double squish = 0.0;   // variance of the tracked diagonal length
  double wobble = 0.0;   // variance of pitch (rad^2)
  double com_start_x = 0.0;
  double com_end_x = 0.0;
  int sample_count = 0;
  bool failed = false;

  bool operator==(const GaitResult&) const = default;
};

struct EvalConfig {
  double duration = 25.0;
  double settle_time = 1.0;
  double descriptor_sample_rate = 20.0;
  SimConfig sim{};
  BipedLayout layout{};
  ActuationRanges actuation{};

  /// Throws ConfigError naming the offending field.
  void validate() const;
  bool operator==(const EvalConfig&) const = default;
};

struct TraceSample {
  double time = 0.0;  // seconds since the start of the scored window
  double com_x = 0.0;
  double com_y = 0.0;
  double diag_distance = 0.0;  // SW-NE corner distance
  double pitch = 0.0;          // unwrapped rigid-fit rotation (rad)
};

using TraceSink = std::function<void(const TraceSample&)>;

/// Runs one gait: build, settle unactuated, then actuate for `duration`
/// seconds sampling descriptors. Unstable runs return failed=true with all
/// scores zero.
///
/// Descriptors are taken in the frame of travel: for leftward net motion the
/// diagonal is the SE-NW pair, the mirror image of SW-NE, so a gait and its
/// mirror image score identically.
GaitResult evaluate(const Genotype& g, const Terrain& terrain, const EvalConfig& cfg,
                    const TraceSink& trace = {});

/// Absolute horizontal speed of the centre of mass over the window.
double horizontal_speed(double com_start_x, double com_end_x, double duration);

/// Population variance (divides by N). Throws ValidationError when empty.
double variance(std::span<const double> samples);

/// Rotation (rad) of the least-squares rigid alignment taking the mass-weighted
/// centred rest pose onto the centred current pose.
double rigid_fit_rotation(const SoftBody& body, std::span<const Vec2> rest_pose);

}  // namespace softgait
