// vfdrelay: rates of multihop virtual full-duplex relay channels.
//
// Exit codes: 0 success, 2 input error, 1 internal error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "vfd/json_io.hpp"
#include "vfd/sweep.hpp"

namespace {

using vfd::json;

// Input problems detected by the tool itself (missing file, bad flag value).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

json read_json(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open " + file);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(file + ": " + e.what());
  }
}

json parse_inline(const std::string& flag, const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    // Bare comma lists such as "1,2" are accepted for stage sets.
    try {
      return json::parse("[" + text + "]");
    } catch (const json::parse_error& e) {
      throw InputError(flag + ": " + e.what());
    }
  }
}

void write_text(const std::string& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw InputError("cannot write " + file);
  out << text;
}

void emit(const json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!out.empty()) write_text(out, text);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct RateArgs {
  std::string config;
  std::string out;
};

int cmd_rate(const RateArgs& a) {
  const json doc = read_json(a.config);
  const auto inst = vfd::instance_from_json(doc.contains("instance") ? doc.at("instance") : doc,
                                            doc.contains("instance") ? "instance" : "config");
  const json mode = doc.contains("config") ? doc.at("config") : json::object();
  const auto cfg = vfd::mode_config_from_json(mode, inst.num_stages());
  const auto b = vfd::evaluate(inst, cfg);
  json j;
  j["instance"] = vfd::to_json(inst);
  j["config"] = vfd::to_json(cfg);
  j["breakdown"] = vfd::to_json(b);
  emit(j, a.out);
  return 0;
}

struct OptimizeArgs {
  std::string config;
  std::string out;
  std::string decoder;
  std::string variant;
  int grid = 0;
  int workers = 1;
};

int cmd_optimize(const OptimizeArgs& a) {
  const json doc = read_json(a.config);
  const auto inst = vfd::instance_from_json(doc.contains("instance") ? doc.at("instance") : doc,
                                            doc.contains("instance") ? "instance" : "config");
  auto spec = vfd::search_from_json(doc.contains("search") ? doc.at("search") : json::object());
  if (!a.decoder.empty()) spec.decoder = vfd::parse_decoder(a.decoder);
  if (!a.variant.empty()) spec.variant = vfd::parse_variant(a.variant);
  if (a.grid > 0) {
    spec.use_grid = true;
    spec.grid.points_per_dim = a.grid;
  }
  spec.workers = a.workers;
  const auto opt = vfd::optimize(inst, spec);
  json j;
  j["instance"] = vfd::to_json(inst);
  j["optimum"] = vfd::to_json(opt);
  emit(j, a.out);
  return 0;
}

struct SweepArgs {
  std::string ensemble;
  std::string k_list;
  std::string schemes;
  std::string decoder = "jd";
  std::string variant = "printed";
  std::string out;
  std::string summary;
  std::string meta;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<double> snr_db, alpha_lo, alpha_hi;
  double noise_level_floor = 1.0;
  double stage_depth_c = 1.0;
  int restarts = 8;
  int workers = 1;
};

int cmd_sweep(const SweepArgs& a) {
  vfd::SweepConfig cfg;
  if (!a.ensemble.empty()) cfg.ensemble = vfd::ensemble_from_json(read_json(a.ensemble));
  if (a.trials) cfg.ensemble.trials = *a.trials;
  if (a.seed) cfg.ensemble.seed = *a.seed;
  if (a.snr_db) cfg.ensemble.snr_db = *a.snr_db;
  if (a.alpha_lo) cfg.ensemble.alpha_lo = *a.alpha_lo;
  if (a.alpha_hi) cfg.ensemble.alpha_hi = *a.alpha_hi;
  cfg.ensemble.validate();
  if (!a.k_list.empty()) {
    cfg.k_list.clear();
    for (const auto& k : split_list(a.k_list)) {
      int v = 0;
      try {
        std::size_t used = 0;
        v = std::stoi(k, &used);
        if (used != k.size()) throw std::invalid_argument(k);
      } catch (const std::exception&) {
        throw InputError("--k-list: '" + k + "' is not an integer");
      }
      if (v < 1) throw InputError("--k-list: K must be >= 1");
      cfg.k_list.push_back(v);
    }
  }
  if (!a.schemes.empty()) {
    cfg.schemes.clear();
    for (const auto& s : split_list(a.schemes)) cfg.schemes.push_back(vfd::parse_scheme(s));
  }
  cfg.decoder = vfd::parse_decoder(a.decoder);
  cfg.variant = vfd::parse_variant(a.variant);
  cfg.noise_level_floor = a.noise_level_floor;
  cfg.stage_depth_c = a.stage_depth_c;
  cfg.search.coordinate.restarts = a.restarts;
  cfg.workers = a.workers;

  const auto r = vfd::run_sweep(cfg);
  const std::string records = vfd::records_csv(r);
  const std::string summary = vfd::summary_csv(r);
  json meta = r.metadata;
  meta["k_list"] = cfg.k_list;

  if (a.out.empty()) {
    std::cout << records;
    std::cerr << summary;
  } else {
    write_text(a.out, records);
    const std::filesystem::path p(a.out);
    const auto stem = (p.parent_path() / p.stem()).string();
    write_text(a.summary.empty() ? stem + ".summary.csv" : a.summary, summary);
    write_text(a.meta.empty() ? stem + ".meta.json" : a.meta, meta.dump(2) + "\n");
    std::cout << summary;
  }
  return 0;
}

struct DmArgs {
  std::string spec;
  std::string modes = "[]";
  std::string distortions;
  std::string decoder = "sd";
  std::string out;
};

int cmd_dm_eval(const DmArgs& a) {
  const auto spec = vfd::dm_spec_from_json(read_json(a.spec));
  const auto violations = vfd::validate_dm_spec(spec);
  if (!violations.empty()) {
    std::string msg = "invalid network spec:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw InputError(msg);
  }
  const auto modes = vfd::dm_modes_from_json(parse_inline("--modes", a.modes), "modes");
  json j;
  j["modes"] = {modes.qmf[0], modes.qmf[1]};
  if (!a.distortions.empty()) {
    // Fixed knobs: report the constraint values only.
    const json d = parse_inline("--distortions", a.distortions);
    if (!d.is_array() || d.size() != 2) throw InputError("--distortions: expected [{stage: knob}, {stage: knob}]");
    vfd::DmDistortions dist;
    for (std::size_t path = 0; path < 2; ++path) {
      if (!d[path].is_object()) throw InputError("--distortions[" + std::to_string(path) + "]: expected an object");
      for (const auto& [k, v] : d[path].items()) {
        if (!v.is_number()) throw InputError("--distortions[" + std::to_string(path) + "]." + k + ": expected a number");
        dist[path][std::stoi(k)] = v.get<double>();
      }
    }
    j["constraints"] = vfd::to_json(vfd::assemble_constraints(spec, modes, dist));
  } else {
    j["decoder"] = a.decoder;
    j["result"] = vfd::to_json(vfd::solve_symmetric(spec, modes, vfd::parse_decoder(a.decoder)));
  }
  emit(j, a.out);
  return 0;
}

struct ScheduleArgs {
  double rate = 0;
  int stages = 1;
  long long messages = 1;
};

int cmd_schedule(const ScheduleArgs& a) {
  if (a.rate < 0) throw InputError("--rate must be >= 0");
  json j{{"rate", a.rate},
         {"K", a.stages},
         {"N", a.messages},
         {"throughput", vfd::schedule_throughput(a.rate, a.stages, a.messages)},
         {"asymptote", vfd::schedule_asymptote(a.rate)}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Achievable rates of multihop virtual full-duplex relay channels"};
  app.set_version_flag("--version", std::string(vfd::kVersion));
  app.require_subcommand(1);

  RateArgs rate;
  auto* c_rate = app.add_subcommand("rate", "Evaluate one (instance, config) pair");
  c_rate->add_option("config", rate.config, "JSON with \"instance\" and \"config\"")->required();
  c_rate->add_option("--out", rate.out, "Also write the JSON report here");

  OptimizeArgs opt;
  auto* c_opt = app.add_subcommand("optimize", "Search QMF sets and power splits");
  c_opt->add_option("config", opt.config, "JSON with \"instance\" and optional \"search\"")->required();
  c_opt->add_option("--decoder", opt.decoder, "sd or jd (overrides the file)");
  c_opt->add_option("--variant", opt.variant, "printed or theorem (overrides the file)");
  c_opt->add_option("--grid", opt.grid, "Use a grid with this many points per free split");
  c_opt->add_option("--workers", opt.workers, "Threads over QMF sets")->check(CLI::PositiveNumber);
  c_opt->add_option("--out", opt.out, "Also write the JSON report here");

  SweepArgs sw;
  auto* c_sweep = app.add_subcommand("sweep", "Monte Carlo sweep over K and schemes");
  c_sweep->add_option("ensemble", sw.ensemble, "Optional ensemble JSON; flags override it");
  c_sweep->add_option("--k-list", sw.k_list, "Comma-separated stage counts (default 1,2,3,4)");
  c_sweep->add_option("--trials", sw.trials, "Trials per K");
  c_sweep->add_option("--seed", sw.seed, "Ensemble seed");
  c_sweep->add_option("--snr-db", sw.snr_db, "Hop SNR in dB");
  c_sweep->add_option("--alpha-lo", sw.alpha_lo, "Lower INR exponent");
  c_sweep->add_option("--alpha-hi", sw.alpha_hi, "Upper INR exponent");
  c_sweep->add_option("--decoder", sw.decoder, "sd or jd");
  c_sweep->add_option("--variant", sw.variant, "printed or theorem");
  c_sweep->add_option("--schemes", sw.schemes, "Comma-separated subset of the schemes (default all)");
  c_sweep->add_option("--noise-level-floor", sw.noise_level_floor, "Distortion floor of noise_level_qmf");
  c_sweep->add_option("--stage-depth-c", sw.stage_depth_c, "stage_depth_qmf uses a floor of c*K");
  c_sweep->add_option("--restarts", sw.restarts, "Random restarts of the split search");
  c_sweep->add_option("--workers", sw.workers, "Threads over trials")->check(CLI::PositiveNumber);
  c_sweep->add_option("--out", sw.out, "Per-trial CSV; summary and metadata go next to it");
  c_sweep->add_option("--summary", sw.summary, "Summary CSV path");
  c_sweep->add_option("--meta", sw.meta, "Metadata JSON path");

  DmArgs dm;
  auto* c_dm = app.add_subcommand("dm-eval", "Finite-alphabet network evaluation");
  c_dm->add_option("spec", dm.spec, "Network spec JSON")->required();
  c_dm->add_option("--modes", dm.modes, "QMF stages, e.g. [1,2] or [[1],[2]]");
  c_dm->add_option("--distortions", dm.distortions, "Fixed knobs [{stage: d}, {stage: d}]; skips the solver");
  c_dm->add_option("--decoder", dm.decoder, "sd or jd");
  c_dm->add_option("--out", dm.out, "Also write the JSON report here");

  ScheduleArgs sch;
  auto* c_sch = app.add_subcommand("schedule", "Per-path throughput of N messages over N+K slots");
  c_sch->add_option("--rate", sch.rate, "Symmetric rate r")->required();
  c_sch->add_option("--K", sch.stages, "Relay stages")->check(CLI::NonNegativeNumber);
  c_sch->add_option("--N", sch.messages, "Messages")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c_rate) return cmd_rate(rate);
    if (*c_opt) return cmd_optimize(opt);
    if (*c_sweep) return cmd_sweep(sw);
    if (*c_dm) return cmd_dm_eval(dm);
    if (*c_sch) return cmd_schedule(sch);
  } catch (const std::invalid_argument& e) {  // includes JSON path errors
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
