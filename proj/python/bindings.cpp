// Thin bridge: structured arguments travel as JSON text in the schemas the
// CLI reads and writes; the python package converts to and from dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>

#include "vfd/baselines.hpp"
#include "vfd/config_optimizer.hpp"
#include "vfd/dm_region.hpp"
#include "vfd/info_core.hpp"
#include "vfd/json_io.hpp"
#include "vfd/mixed_rate.hpp"
#include "vfd/sweep.hpp"

namespace py = pybind11;
using vfd::json;

namespace {

vfd::BaselineKind parse_baseline(const std::string& name) {
  for (auto k : {vfd::BaselineKind::OptimizedQmf, vfd::BaselineKind::NoiseLevelQmf, vfd::BaselineKind::StageDepthQmf,
                 vfd::BaselineKind::PureDf, vfd::BaselineKind::HopCapacityBound}) {
    if (vfd::to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown baseline '" + name + "'");
}

std::string evaluate(const std::string& instance, const std::string& config) {
  const auto inst = vfd::instance_from_json(json::parse(instance));
  const auto cfg = vfd::mode_config_from_json(json::parse(config), inst.num_stages());
  return vfd::to_json(vfd::evaluate(inst, cfg)).dump();
}

std::string optimize(const std::string& instance, const std::string& search) {
  const auto inst = vfd::instance_from_json(json::parse(instance));
  return vfd::to_json(vfd::optimize(inst, vfd::search_from_json(json::parse(search)))).dump();
}

std::string baseline(const std::string& instance, const std::string& kind, const std::string& decoder,
                     const std::string& variant, double noise_level_floor, double stage_depth_c) {
  const auto inst = vfd::instance_from_json(json::parse(instance));
  vfd::BaselineOptions opts;
  opts.decoder = vfd::parse_decoder(decoder);
  opts.variant = vfd::parse_variant(variant);
  opts.df_search.decoder = opts.decoder;
  opts.df_search.variant = opts.variant;
  opts.noise_level_floor = noise_level_floor;
  opts.stage_depth_c = stage_depth_c;
  return vfd::to_json(vfd::baseline_rate(inst, parse_baseline(kind), opts)).dump();
}

py::dict sweep(const std::string& ensemble, const std::vector<int>& k_list, const std::vector<std::string>& schemes,
               const std::string& decoder, const std::string& variant, int workers) {
  vfd::SweepConfig cfg;
  cfg.ensemble = vfd::ensemble_from_json(json::parse(ensemble));
  cfg.k_list = k_list;
  if (!schemes.empty()) {
    cfg.schemes.clear();
    for (const auto& s : schemes) cfg.schemes.push_back(vfd::parse_scheme(s));
  }
  cfg.decoder = vfd::parse_decoder(decoder);
  cfg.variant = vfd::parse_variant(variant);
  cfg.workers = workers;
  vfd::SweepResult r;
  {
    py::gil_scoped_release release;
    r = vfd::run_sweep(cfg);
  }
  py::dict out;
  out["records_csv"] = vfd::records_csv(r);
  out["summary_csv"] = vfd::summary_csv(r);
  out["metadata"] = r.metadata;
  return out;
}

vfd::DmNetworkSpec checked_spec(const std::string& spec) {
  auto s = vfd::dm_spec_from_json(json::parse(spec));
  const auto violations = vfd::validate_dm_spec(s);
  if (!violations.empty()) throw std::invalid_argument("invalid network spec: " + violations.front());
  return s;
}

std::string dm_solve(const std::string& spec, const std::string& modes, const std::string& decoder) {
  return vfd::to_json(vfd::solve_symmetric(checked_spec(spec), vfd::dm_modes_from_json(json::parse(modes)),
                                           vfd::parse_decoder(decoder)))
      .dump();
}

std::string dm_constraints(const std::string& spec, const std::string& modes,
                           const std::vector<std::map<int, double>>& distortions) {
  if (distortions.size() != 2) throw std::invalid_argument("distortions: expected one mapping per path");
  const vfd::DmDistortions d{distortions[0], distortions[1]};
  return vfd::to_json(vfd::assemble_constraints(checked_spec(spec), vfd::dm_modes_from_json(json::parse(modes)), d))
      .dump();
}

double mutual_information(const std::vector<std::pair<std::string, int>>& variables, const std::vector<double>& table,
                          const std::vector<std::string>& a, const std::vector<std::string>& b,
                          const std::vector<std::string>& given) {
  std::vector<vfd::Variable> vars;
  for (const auto& [label, size] : variables) vars.push_back({label, size});
  return vfd::mutual_information(vfd::JointPmf(std::move(vars), table), a, b, given);
}

}  // namespace

PYBIND11_MODULE(_vfdrelay, m) {
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const std::domain_error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.attr("__version__") = vfd::kVersion;
  m.def("evaluate", &evaluate);
  m.def("optimize", &optimize);
  m.def("baseline", &baseline);
  m.def("sweep", &sweep);
  m.def("dm_solve", &dm_solve);
  m.def("dm_constraints", &dm_constraints);
  m.def("mutual_information", &mutual_information);
  m.def("gaussian_rate", &vfd::gaussian_rate);
  m.def("wyner_ziv_noise", &vfd::wyner_ziv_noise);
  m.def("wyner_ziv_rate", &vfd::wyner_ziv_rate);
  m.def("schedule_throughput", &vfd::schedule_throughput);
}
