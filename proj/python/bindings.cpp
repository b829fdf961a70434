#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "softgait/archive.hpp"
#include "softgait/cmaes.hpp"
#include "softgait/config.hpp"
#include "softgait/errors.hpp"
#include "softgait/evaluation.hpp"
#include "softgait/experiment.hpp"
#include "softgait/qda.hpp"

namespace py = pybind11;
using namespace softgait;

namespace {

Genotype to_genotype(const std::vector<double>& genes) { return Genotype::from_span(genes); }

std::vector<double> genes_of(const Genotype& g) { return {g.genes().begin(), g.genes().end()}; }

std::vector<std::vector<double>> genes_of(const std::vector<Genotype>& batch) {
  std::vector<std::vector<double>> out;
  for (const auto& g : batch) out.push_back(genes_of(g));
  return out;
}

std::vector<Genotype> to_batch(const std::vector<std::vector<double>>& batch) {
  std::vector<Genotype> out;
  for (const auto& g : batch) out.push_back(to_genotype(g));
  return out;
}

}  // namespace

PYBIND11_MODULE(_softgait, m) {
  m.doc() = "Soft voxel biped gait optimisation";
  m.attr("__version__") = SOFTGAIT_VERSION;

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", error);
  py::register_exception<ValidationError>(m, "ValidationError", error);
  py::register_exception<ProtocolError>(m, "ProtocolError", error);

  py::enum_<TerrainKind>(m, "TerrainKind")
      .value("flat", TerrainKind::kFlat)
      .value("spiky", TerrainKind::kSpiky)
      .value("longspikes", TerrainKind::kLongSpikes)
      .value("longerspikes", TerrainKind::kLongerSpikes)
      .value("sawtooth", TerrainKind::kSawtooth)
      .value("valley", TerrainKind::kValley);

  py::class_<Terrain>(m, "Terrain")
      .def(py::init([](const std::string& name) { return make_terrain(parse_terrain(name)); }),
           py::arg("name"))
      .def_property_readonly("name", &Terrain::name)
      .def_property_readonly("period", &Terrain::period)
      .def("height_at", &Terrain::height_at, py::arg("x"))
      .def("vertices", [](const Terrain& t) {
        std::vector<std::pair<double, double>> v;
        for (const Vec2& p : t.vertices()) v.emplace_back(p.x, p.y);
        return v;
      });

  py::class_<ControlParams>(m, "ControlParams")
      .def_readonly("amplitude", &ControlParams::amplitude)
      .def_readonly("frequency", &ControlParams::frequency)
      .def_readonly("column_phase", &ControlParams::column_phase);
  m.def("decode", [](const std::vector<double>& genes) { return decode(to_genotype(genes)); },
        py::arg("genes"));

  py::class_<GaitResult>(m, "GaitResult")
      .def_readonly("fitness", &GaitResult::fitness)
      .def_readonly("squish", &GaitResult::squish)
      .def_readonly("wobble", &GaitResult::wobble)
      .def_readonly("com_start_x", &GaitResult::com_start_x)
      .def_readonly("com_end_x", &GaitResult::com_end_x)
      .def_readonly("sample_count", &GaitResult::sample_count)
      .def_readonly("failed", &GaitResult::failed)
      .def("__repr__", [](const GaitResult& r) {
        return "GaitResult(fitness=" + std::to_string(r.fitness) +
               ", squish=" + std::to_string(r.squish) + ", wobble=" + std::to_string(r.wobble) +
               (r.failed ? ", failed=True)" : ")");
      });

  m.def(
      "evaluate",
      [](const std::vector<double>& genes, const std::string& terrain, double duration) {
        EvalConfig cfg;
        cfg.duration = duration;
        py::gil_scoped_release release;
        return evaluate(to_genotype(genes), make_terrain(parse_terrain(terrain)), cfg);
      },
      py::arg("genes"), py::arg("terrain") = "flat", py::arg("duration") = 25.0,
      "Simulate one gait and return its fitness and descriptors.");

  py::class_<CmaEs>(m, "CmaEs")
      .def(py::init([](std::uint64_t seed, int population, double mean, double sigma) {
             return CmaEs(CmaOptions{population, mean, sigma, seed});
           }),
           py::arg("seed") = 0, py::arg("population") = 20, py::arg("initial_mean") = 0.5,
           py::arg("initial_sigma") = 0.3)
      .def("ask", [](CmaEs& es) { return genes_of(es.ask()); })
      .def("tell",
           [](CmaEs& es, const std::vector<std::vector<double>>& batch,
              const std::vector<double>& fitness) { es.tell(to_batch(batch), fitness); })
      .def_property_readonly("generation", &CmaEs::generation)
      .def_property_readonly("evaluations", &CmaEs::evaluations)
      .def_property_readonly("sigma", &CmaEs::sigma)
      .def_property_readonly("best_fitness", &CmaEs::best_fitness)
      .def_property_readonly("best_genes", [](const CmaEs& es) -> std::optional<std::vector<double>> {
        if (!es.best_genotype()) return std::nullopt;
        return genes_of(*es.best_genotype());
      });

  py::class_<Archive>(m, "Archive")
      .def_property_readonly("occupancy", &Archive::occupancy)
      .def_property_readonly("qd_score", &Archive::qd_score)
      .def("elites", [](const Archive& a) {
        py::list out;
        for (const auto& [cell, e] : a.elites()) {
          out.append(py::make_tuple(cell.row, cell.col, genes_of(e.genotype), e.result));
        }
        return out;
      });

  py::class_<Qda>(m, "Qda")
      .def(py::init([](std::uint64_t seed, int batch_size, int init_budget) {
             QdaOptions o;
             o.seed = seed;
             o.batch_size = batch_size;
             o.init_budget = init_budget;
             o.bounds = ExperimentConfig::default_bounds();
             return Qda(o);
           }),
           py::arg("seed") = 0, py::arg("batch_size") = 20, py::arg("init_budget") = 100)
      .def("ask", [](Qda& q) { return genes_of(q.ask()); })
      .def("tell", [](Qda& q, const std::vector<std::vector<double>>& batch,
                      const std::vector<GaitResult>& results) { q.tell(to_batch(batch), results); })
      .def_property_readonly("archive", &Qda::archive, py::return_value_policy::reference_internal)
      .def_property_readonly("evaluations", &Qda::evaluations);

  m.def(
      "trial_seed",
      [](std::uint64_t master, const std::string& terrain, const std::string& algorithm, int trial) {
        return trial_seed(master, parse_terrain(terrain), parse_algorithm(algorithm), trial);
      },
      py::arg("master_seed"), py::arg("terrain"), py::arg("algorithm"), py::arg("trial"));
}
