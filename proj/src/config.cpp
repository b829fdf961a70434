#include "softgait/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "softgait/errors.hpp"
#include "softgait/serialization.hpp"

namespace softgait {

using nlohmann::json;

namespace {

constexpr int kConfigVersion = 1;

// Strict reader over one JSON object: absent keys keep their defaults,
// type mismatches and unknown keys raise ConfigError with the dotted path.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(display() + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) throw ConfigError(field(key) + ": expected a number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!it->is_number_integer() && !it->is_number_unsigned()) {
          throw ConfigError(field(key) + ": expected an integer");
        }
        if constexpr (std::is_unsigned_v<T>) {
          if (it->is_number_integer() && it->template get<long long>() < 0) {
            throw ConfigError(field(key) + ": expected a non-negative integer");
          }
        }
      }
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key) + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key().c_str()) + ": unknown field");
    }
  }

 private:
  std::string display() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json sim_to_json(const SimConfig& s) {
  return {{"dt", s.dt},
          {"gravity", s.gravity},
          {"contact_stiffness", s.contact_stiffness},
          {"contact_damping", s.contact_damping},
          {"friction_mu", s.friction_mu},
          {"friction_viscosity", s.friction_viscosity},
          {"max_penetration_tolerance", s.max_penetration_tolerance}};
}

void sim_from_json(const json& j, SimConfig& s) {
  ObjectReader r(j, "sim");
  r.get("dt", s.dt);
  r.get("gravity", s.gravity);
  r.get("contact_stiffness", s.contact_stiffness);
  r.get("contact_damping", s.contact_damping);
  r.get("friction_mu", s.friction_mu);
  r.get("friction_viscosity", s.friction_viscosity);
  r.get("max_penetration_tolerance", s.max_penetration_tolerance);
  r.finish();
}

json material_to_json(const VoxelMaterial& m) {
  return {{"corner_mass", m.corner_mass},
          {"edge_stiffness", m.edge_stiffness},
          {"diagonal_stiffness", m.diagonal_stiffness},
          {"damping", m.damping}};
}

void material_from_json(const json& j, VoxelMaterial& m) {
  ObjectReader r(j, "material");
  r.get("corner_mass", m.corner_mass);
  r.get("edge_stiffness", m.edge_stiffness);
  r.get("diagonal_stiffness", m.diagonal_stiffness);
  r.get("damping", m.damping);
  r.finish();
}

json layout_to_json(const BipedLayout& l) {
  json cells = json::array();
  for (const GridCell& c : l.cells) cells.push_back({c.col, c.row});
  return {{"cells", cells},
          {"edge_length", l.edge_length},
          {"spawn_offset", {l.spawn_offset.x, l.spawn_offset.y}},
          {"spawn_clearance", l.spawn_clearance}};
}

void layout_from_json(const json& j, BipedLayout& l) {
  ObjectReader r(j, "layout");
  if (const json* cells = r.child("cells")) {
    if (!cells->is_array()) throw ConfigError("layout.cells: expected a list of [col, row]");
    l.cells.clear();
    for (const json& c : *cells) {
      if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() ||
          !c[1].is_number_integer()) {
        throw ConfigError("layout.cells: expected a list of [col, row] integer pairs");
      }
      l.cells.push_back({c[0].get<int>(), c[1].get<int>()});
    }
  }
  r.get("edge_length", l.edge_length);
  if (const json* off = r.child("spawn_offset")) {
    if (!off->is_array() || off->size() != 2 || !(*off)[0].is_number() ||
        !(*off)[1].is_number()) {
      throw ConfigError("layout.spawn_offset: expected [x, y]");
    }
    l.spawn_offset = {(*off)[0].get<double>(), (*off)[1].get<double>()};
  }
  r.get("spawn_clearance", l.spawn_clearance);
  r.finish();
}

json actuation_to_json(const ActuationRanges& a) {
  return {{"amplitude_max", a.amplitude_max},
          {"frequency_min", a.frequency_min},
          {"frequency_max", a.frequency_max}};
}

void actuation_from_json(const json& j, ActuationRanges& a) {
  ObjectReader r(j, "actuation");
  r.get("amplitude_max", a.amplitude_max);
  r.get("frequency_min", a.frequency_min);
  r.get("frequency_max", a.frequency_max);
  r.finish();
}

json terrain_options_to_json(const TerrainOptions& t) {
  return {{"half_extent", t.half_extent},
          {"spike_height", t.spike_height},
          {"valley_slope", t.valley_slope},
          {"sawtooth_period", t.sawtooth_period},
          {"sawtooth_fall_fraction", t.sawtooth_fall_fraction},
          {"sawtooth_reversed", t.sawtooth_reversed}};
}

void terrain_options_from_json(const json& j, TerrainOptions& t) {
  ObjectReader r(j, "terrain");
  r.get("half_extent", t.half_extent);
  r.get("spike_height", t.spike_height);
  r.get("valley_slope", t.valley_slope);
  r.get("sawtooth_period", t.sawtooth_period);
  r.get("sawtooth_fall_fraction", t.sawtooth_fall_fraction);
  r.get("sawtooth_reversed", t.sawtooth_reversed);
  r.finish();
}

}  // namespace

ArchiveBounds ExperimentConfig::default_bounds() {
  // Written by `softgait pilot --samples 1000 --seed 1` with the default
  // physics constants.
  return ArchiveBounds{{0.0, 0.4801442926985009}, {0.0, 227.56174531633437}};
}

QdaOptions ExperimentConfig::default_qda() {
  QdaOptions q;
  q.bounds = default_bounds();
  return q;
}

ExperimentConfig ExperimentConfig::desk_preset() {
  ExperimentConfig c;
  c.terrains = {TerrainKind::kFlat, TerrainKind::kSpiky, TerrainKind::kValley};
  c.trials = 10;
  c.budget = 600;
  return c;
}

void ExperimentConfig::validate() const {
  if (terrains.empty()) throw ConfigError("terrains: need at least one terrain");
  for (std::size_t i = 0; i < terrains.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (terrains[i] == terrains[k]) throw ConfigError("terrains: duplicate terrain");
    }
  }
  if (trials < 1) throw ConfigError("trials: must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size: must be >= 1");
  if (budget < batch_size || budget % batch_size != 0) {
    throw ConfigError("budget: must be a positive multiple of batch_size");
  }
  eval.validate();
  cma.validate();
  qda.validate();
  if (cma.population != batch_size) throw ConfigError("cma.population: must equal batch_size");
  if (qda.batch_size != batch_size) throw ConfigError("qda.batch_size: must equal batch_size");
  for (TerrainKind t : terrains) make_terrain(t, terrain);
}

json to_json(const ExperimentConfig& c) {
  json terrains = json::array();
  for (TerrainKind t : c.terrains) terrains.push_back(std::string(terrain_name(t)));
  return {{"format", "softgait-config"},
          {"version", kConfigVersion},
          {"master_seed", c.master_seed},
          {"terrains", terrains},
          {"trials", c.trials},
          {"budget", c.budget},
          {"batch_size", c.batch_size},
          {"evaluation",
           {{"duration", c.eval.duration},
            {"settle_time", c.eval.settle_time},
            {"descriptor_sample_rate", c.eval.descriptor_sample_rate}}},
          {"sim", sim_to_json(c.eval.sim)},
          {"material", material_to_json(c.eval.layout.material)},
          {"layout", layout_to_json(c.eval.layout)},
          {"actuation", actuation_to_json(c.eval.actuation)},
          {"terrain", terrain_options_to_json(c.terrain)},
          {"cma", {{"initial_mean", c.cma.initial_mean}, {"initial_sigma", c.cma.initial_sigma}}},
          {"qda",
           {{"mutation_sigma", c.qda.mutation_sigma},
            {"init_budget", c.qda.init_budget},
            {"bounds", to_json(c.qda.bounds)}}}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  ObjectReader r(j, "");
  std::string format = "softgait-config";
  int version = kConfigVersion;
  r.get("format", format);
  r.get("version", version);
  if (format != "softgait-config") throw ConfigError("format: expected 'softgait-config'");
  if (version != kConfigVersion) throw ConfigError("version: unsupported config version");
  r.get("master_seed", c.master_seed);
  if (const json* t = r.child("terrains")) {
    if (!t->is_array()) throw ConfigError("terrains: expected a list of names");
    c.terrains.clear();
    for (const json& name : *t) {
      if (!name.is_string()) throw ConfigError("terrains: expected a list of names");
      c.terrains.push_back(parse_terrain(name.get<std::string>()));
    }
  }
  r.get("trials", c.trials);
  r.get("budget", c.budget);
  r.get("batch_size", c.batch_size);
  if (const json* e = r.child("evaluation")) {
    ObjectReader er(*e, "evaluation");
    er.get("duration", c.eval.duration);
    er.get("settle_time", c.eval.settle_time);
    er.get("descriptor_sample_rate", c.eval.descriptor_sample_rate);
    er.finish();
  }
  if (const json* s = r.child("sim")) sim_from_json(*s, c.eval.sim);
  if (const json* m = r.child("material")) material_from_json(*m, c.eval.layout.material);
  if (const json* l = r.child("layout")) layout_from_json(*l, c.eval.layout);
  if (const json* a = r.child("actuation")) actuation_from_json(*a, c.eval.actuation);
  if (const json* t = r.child("terrain")) terrain_options_from_json(*t, c.terrain);
  if (const json* cm = r.child("cma")) {
    ObjectReader cr(*cm, "cma");
    cr.get("initial_mean", c.cma.initial_mean);
    cr.get("initial_sigma", c.cma.initial_sigma);
    cr.finish();
  }
  if (const json* q = r.child("qda")) {
    ObjectReader qr(*q, "qda");
    qr.get("mutation_sigma", c.qda.mutation_sigma);
    qr.get("init_budget", c.qda.init_budget);
    if (const json* b = qr.child("bounds")) {
      try {
        c.qda.bounds = archive_bounds_from_json(*b);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("qda.bounds: ") + e.what());
      }
    }
    qr.finish();
  }
  r.finish();
  c.cma.population = c.batch_size;
  c.qda.batch_size = c.batch_size;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void save_config(const ExperimentConfig& config, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("config: cannot write " + path.string());
  out << to_json(config).dump(2) << '\n';
}

std::vector<TerrainKind> parse_terrain_list(const std::string& csv) {
  std::vector<TerrainKind> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw ConfigError("terrains: empty entry in '" + csv + "'");
    out.push_back(parse_terrain(item));
  }
  if (out.empty()) throw ConfigError("terrains: empty terrain list");
  return out;
}

}  // namespace softgait
