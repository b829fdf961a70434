#include "softgait/serialization.hpp"

#include <string>
#include <vector>

#include "softgait/errors.hpp"

namespace softgait {

using nlohmann::json;

json to_json(const Genotype& g) { return json(g.genes()); }

Genotype genotype_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("genotype: expected an array of 5 numbers");
  return Genotype::from_span(j.get<std::vector<double>>());
}

json to_json(const GaitResult& r) {
  return json{{"fitness", r.fitness},         {"squish", r.squish},
              {"wobble", r.wobble},           {"com_start_x", r.com_start_x},
              {"com_end_x", r.com_end_x},     {"sample_count", r.sample_count},
              {"failed", r.failed}};
}

GaitResult gait_result_from_json(const json& j) {
  GaitResult r;
  r.fitness = j.at("fitness").get<double>();
  r.squish = j.at("squish").get<double>();
  r.wobble = j.at("wobble").get<double>();
  r.com_start_x = j.value("com_start_x", 0.0);
  r.com_end_x = j.value("com_end_x", 0.0);
  r.sample_count = j.value("sample_count", 0);
  r.failed = j.value("failed", false);
  return r;
}

json to_json(const ArchiveBounds& b) {
  return json{{"squish", {b.squish.lo, b.squish.hi}}, {"wobble", {b.wobble.lo, b.wobble.hi}}};
}

ArchiveBounds archive_bounds_from_json(const json& j) {
  auto axis = [&](const char* key) {
    const json& a = j.at(key);
    if (!a.is_array() || a.size() != 2) {
      throw ConfigError(std::string("qda.bounds.") + key + ": expected [lo, hi]");
    }
    return AxisBounds{a[0].get<double>(), a[1].get<double>()};
  };
  ArchiveBounds b{axis("squish"), axis("wobble")};
  b.validate();
  return b;
}

}  // namespace softgait
