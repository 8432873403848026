#include "vfd/json_io.hpp"

#include <cmath>
#include <limits>

namespace vfd {

namespace {

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw JsonInputError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw JsonInputError(at(path, key), "missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw JsonInputError(path, "expected a number");
  return j.get<double>();
}

long long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw JsonInputError(path, "expected an integer");
  return j.get<long long>();
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) throw JsonInputError(path, "expected a string");
  return j.get<std::string>();
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) throw JsonInputError(path, "expected an array");
  return j;
}

std::vector<double> numbers(const json& j, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) out.push_back(number(j[i], at(path, i)));
  return out;
}

std::vector<int> integers(const json& j, const std::string& path) {
  std::vector<int> out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) out.push_back(static_cast<int>(integer(j[i], at(path, i))));
  return out;
}

std::vector<double> gains_db(const json& j, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) {
    out.push_back(j[i].is_null() ? -std::numeric_limits<double>::infinity() : number(j[i], at(path, i)));
  }
  return out;
}

json db_or_null(double linear) {
  if (linear <= 0.0) return nullptr;
  return linear_to_db(linear);
}

template <class F>
auto wrap(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const JsonInputError&) {
    throw;
  } catch (const std::exception& e) {
    throw JsonInputError(path, e.what());
  }
}

}  // namespace

ChannelInstance instance_from_json(const json& j, const std::string& path) {
  const auto K = integer(field(j, "K", path), at(path, "K"));
  const auto snr = gains_db(field(j, "snr_db", path), at(path, "snr_db"));
  const auto inr = gains_db(field(j, "inr_db", path), at(path, "inr_db"));
  if (K < 1) throw JsonInputError(at(path, "K"), "must be >= 1");
  if (static_cast<long long>(snr.size()) != K + 1) throw JsonInputError(at(path, "snr_db"), "expected K+1 entries");
  if (static_cast<long long>(inr.size()) != K) throw JsonInputError(at(path, "inr_db"), "expected K entries");
  return wrap(path, [&] { return ChannelInstance::from_db(snr, inr); });
}

json to_json(const ChannelInstance& inst) {
  json j;
  j["K"] = inst.num_stages();
  j["snr_db"] = json::array();
  j["inr_db"] = json::array();
  for (double x : inst.snr_values()) j["snr_db"].push_back(db_or_null(x));
  for (double x : inst.inr_values()) j["inr_db"].push_back(db_or_null(x));
  return j;
}

EnsembleSpec ensemble_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw JsonInputError(path, "expected an object");
  EnsembleSpec s;
  if (j.contains("snr_db")) s.snr_db = number(j.at("snr_db"), at(path, "snr_db"));
  if (j.contains("alpha_lo")) s.alpha_lo = number(j.at("alpha_lo"), at(path, "alpha_lo"));
  if (j.contains("alpha_hi")) s.alpha_hi = number(j.at("alpha_hi"), at(path, "alpha_hi"));
  if (j.contains("trials")) s.trials = static_cast<int>(integer(j.at("trials"), at(path, "trials")));
  if (j.contains("seed")) {
    const auto& seed = j.at("seed");
    if (!seed.is_number_integer()) throw JsonInputError(at(path, "seed"), "expected an integer");
    s.seed = seed.is_number_unsigned() ? seed.get<std::uint64_t>() : static_cast<std::uint64_t>(seed.get<std::int64_t>());
  }
  wrap(path, [&] {
    s.validate();
    return 0;
  });
  return s;
}

json to_json(const EnsembleSpec& s) {
  return {{"snr_db", s.snr_db}, {"alpha_lo", s.alpha_lo}, {"alpha_hi", s.alpha_hi}, {"trials", s.trials}, {"seed", s.seed}};
}

ModeConfig mode_config_from_json(const json& j, int num_stages, const std::string& path) {
  if (!j.is_object()) throw JsonInputError(path, "expected an object");
  ModeConfig cfg;
  if (j.contains("qmf_set")) cfg.qmf_set = integers(j["qmf_set"], at(path, "qmf_set"));
  std::sort(cfg.qmf_set.begin(), cfg.qmf_set.end());
  if (j.contains("theta")) {
    cfg.theta = numbers(j["theta"], at(path, "theta"));
  } else {
    cfg.theta.assign(static_cast<std::size_t>(num_stages), 0.0);
    for (int k : cfg.qmf_set) {
      if (k >= 1 && k <= num_stages) cfg.theta[static_cast<std::size_t>(k - 1)] = 1.0;
    }
  }
  if (j.contains("decoder")) {
    cfg.decoder = wrap(at(path, "decoder"), [&] { return parse_decoder(string(j["decoder"], at(path, "decoder"))); });
  }
  if (j.contains("variant")) {
    cfg.variant = wrap(at(path, "variant"), [&] { return parse_variant(string(j["variant"], at(path, "variant"))); });
  }
  return cfg;
}

json to_json(const ModeConfig& cfg) {
  return {{"qmf_set", cfg.qmf_set}, {"theta", cfg.theta}, {"decoder", to_string(cfg.decoder)}, {"variant", to_string(cfg.variant)}};
}

SearchSpec search_from_json(const json& j, const std::string& path) {
  SearchSpec s;
  if (j.is_null()) return s;
  if (!j.is_object()) throw JsonInputError(path, "expected an object");
  if (j.contains("mode")) {
    const auto mode = string(j["mode"], at(path, "mode"));
    if (mode == "given") {
      s.given_qmf_set = integers(field(j, "qmf_set", path), at(path, "qmf_set"));
    } else if (mode != "exhaustive") {
      throw JsonInputError(at(path, "mode"), "expected exhaustive or given");
    }
  }
  if (j.contains("theta_search")) {
    const auto ts = string(j["theta_search"], at(path, "theta_search"));
    if (ts == "grid") {
      s.use_grid = true;
    } else if (ts != "coordinate") {
      throw JsonInputError(at(path, "theta_search"), "expected grid or coordinate");
    }
  }
  if (j.contains("points_per_dim")) s.grid.points_per_dim = static_cast<int>(integer(j["points_per_dim"], at(path, "points_per_dim")));
  if (j.contains("restarts")) s.coordinate.restarts = static_cast<int>(integer(j["restarts"], at(path, "restarts")));
  if (j.contains("sweeps")) s.coordinate.sweeps = static_cast<int>(integer(j["sweeps"], at(path, "sweeps")));
  if (j.contains("tol")) s.coordinate.tol = number(j["tol"], at(path, "tol"));
  if (j.contains("decoder")) {
    s.decoder = wrap(at(path, "decoder"), [&] { return parse_decoder(string(j["decoder"], at(path, "decoder"))); });
  }
  if (j.contains("variant")) {
    s.variant = wrap(at(path, "variant"), [&] { return parse_variant(string(j["variant"], at(path, "variant"))); });
  }
  return s;
}

json to_json(const RateBreakdown& r) {
  json j;
  j["symmetric_rate"] = r.symmetric_rate;
  j["per_path_throughput"] = r.per_path_throughput;
  j["segment_rates"] = json::array();
  for (const auto& [head, rate] : r.segment_rates) {
    const auto& b = r.binding.at(head);
    json seg{{"head", head},
             {"rate", rate},
             {"binding", {{"k", b.k}, {"term", b.kind == TermKind::Link ? "I_k" : "I'_k"}, {"value", b.value}}}};
    if (const auto it = r.quant_noise.find(head); it != r.quant_noise.end()) seg["quant_noise"] = it->second;
    j["segment_rates"].push_back(seg);
  }
  j["quant_noise"] = json::object();
  for (const auto& [k, n] : r.quant_noise) j["quant_noise"][std::to_string(k)] = n;
  j["infeasible_quantization"] = r.infeasible_quantization;
  j["zero_rate_heads"] = r.zero_rate_heads;
  return j;
}

json to_json(const Optimum& o) {
  json j;
  j["best_config"] = to_json(o.best_config);
  j["best_breakdown"] = to_json(o.best_breakdown);
  j["configs_evaluated"] = o.configs_evaluated;
  j["per_config_rates"] = json::array();
  for (const auto& s : o.per_config_rates) {
    j["per_config_rates"].push_back({{"qmf_set", s.qmf_set}, {"rate", s.rate}, {"theta", s.theta}});
  }
  return j;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<std::string>> alphabets(const json& j, const std::string& path) {
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) {
    std::vector<std::string> a;
    if (!j[i].is_null()) {
      for (std::size_t s = 0; s < array(j[i], at(path, i)).size(); ++s) a.push_back(string(j[i][s], at(at(path, i), s)));
    }
    out.push_back(std::move(a));
  }
  return out;
}

CondPmf cond_pmf(const json& j, const std::string& path) {
  CondPmf c;
  if (j.is_null()) return c;
  c.rows = static_cast<int>(array(j, path).size());
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto row = numbers(j[r], at(path, r));
    if (r == 0) c.cols = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != c.cols) throw JsonInputError(at(path, r), "ragged row");
    c.table.insert(c.table.end(), row.begin(), row.end());
  }
  return c;
}

json cond_to_json(const CondPmf& c) {
  json rows = json::array();
  for (int r = 0; r < c.rows; ++r) {
    rows.push_back(std::vector<double>(c.table.begin() + static_cast<std::ptrdiff_t>(r) * c.cols,
                                       c.table.begin() + static_cast<std::ptrdiff_t>(r + 1) * c.cols));
  }
  return rows;
}

}  // namespace

DmNetworkSpec dm_spec_from_json(const json& j, const std::string& path) {
  DmNetworkSpec s;
  s.num_stages = static_cast<int>(integer(field(j, "K", path), at(path, "K")));
  s.x_alphabets = alphabets(field(j, "x_alphabets", path), at(path, "x_alphabets"));
  s.u_alphabets = alphabets(field(j, "u_alphabets", path), at(path, "u_alphabets"));
  s.y_alphabets = alphabets(field(j, "y_alphabets", path), at(path, "y_alphabets"));
  if (static_cast<int>(s.y_alphabets.size()) != s.num_stages + 2) {
    throw JsonInputError(at(path, "y_alphabets"), "expected K+2 entries (index 0 unused)");
  }

  const auto& ch = array(field(j, "channels", path), at(path, "channels"));
  for (std::size_t k = 0; k < ch.size(); ++k) s.channels.push_back(cond_pmf(ch[k], at(at(path, "channels"), k)));

  const auto& qs = array(field(j, "quantizers", path), at(path, "quantizers"));
  for (std::size_t k = 0; k < qs.size(); ++k) {
    const std::string qp = at(at(path, "quantizers"), k);
    if (k == 0 || qs[k].is_null()) {
      s.quantizers.emplace_back();
      continue;
    }
    const auto family = string(field(qs[k], "family", qp), at(qp, "family"));
    const int ysize = static_cast<int>(s.y_alphabets[k].size());
    if (family == "erasure") {
      s.quantizers.push_back(QuantizerFamily::erasure(ysize));
    } else if (family == "flip") {
      s.quantizers.push_back(QuantizerFamily::flip(ysize));
    } else if (family == "mixture") {
      QuantizerFamily q;
      q.name = "mixture";
      q.at_zero = cond_pmf(field(qs[k], "at_zero", qp), at(qp, "at_zero"));
      q.at_one = cond_pmf(field(qs[k], "at_one", qp), at(qp, "at_one"));
      s.quantizers.push_back(std::move(q));
    } else {
      throw JsonInputError(at(qp, "family"), "expected erasure, flip or mixture");
    }
  }

  const auto& inputs = array(field(j, "inputs", path), at(path, "inputs"));
  for (std::size_t p = 0; p < inputs.size(); ++p) {
    const std::string pp = at(at(path, "inputs"), p);
    std::vector<NodeInput> nodes;
    for (std::size_t k = 0; k < array(inputs[p], pp).size(); ++k) {
      const std::string np = at(pp, k);
      const auto& n = inputs[p][k];
      if (!n.is_object()) throw JsonInputError(np, "expected an object");
      NodeInput in;
      if (n.contains("p_x")) in.p_x = numbers(n["p_x"], at(np, "p_x"));
      if (n.contains("p_u")) in.p_u = numbers(n["p_u"], at(np, "p_u"));
      if (n.contains("p_x_given_u")) in.x_given_u = cond_pmf(n["p_x_given_u"], at(np, "p_x_given_u"));
      nodes.push_back(std::move(in));
    }
    s.inputs.push_back(std::move(nodes));
  }
  return s;
}

json to_json(const DmNetworkSpec& s) {
  json j;
  j["K"] = s.num_stages;
  j["x_alphabets"] = s.x_alphabets;
  j["u_alphabets"] = s.u_alphabets;
  j["y_alphabets"] = s.y_alphabets;
  j["channels"] = json::array();
  for (const auto& c : s.channels) j["channels"].push_back(c.table.empty() ? json(nullptr) : cond_to_json(c));
  j["quantizers"] = json::array();
  for (const auto& q : s.quantizers) {
    if (q.name.empty()) {
      j["quantizers"].push_back(nullptr);
    } else if (q.name == "mixture") {
      j["quantizers"].push_back({{"family", "mixture"}, {"at_zero", cond_to_json(q.at_zero)}, {"at_one", cond_to_json(q.at_one)}});
    } else {
      j["quantizers"].push_back({{"family", q.name}});
    }
  }
  j["inputs"] = json::array();
  for (const auto& nodes : s.inputs) {
    json arr = json::array();
    for (const auto& n : nodes) {
      json o = json::object();
      if (n.has_aux()) {
        o["p_u"] = n.p_u;
        o["p_x_given_u"] = cond_to_json(n.x_given_u);
      } else {
        o["p_x"] = n.p_x;
      }
      arr.push_back(o);
    }
    j["inputs"].push_back(arr);
  }
  return j;
}

DmModes dm_modes_from_json(const json& j, const std::string& path) {
  DmModes m;
  if (j.is_null()) return m;
  array(j, path);
  if (!j.empty() && j[0].is_array()) {
    if (j.size() != 2) throw JsonInputError(path, "expected one QMF list per path");
    m.qmf[0] = integers(j[0], at(path, 0));
    m.qmf[1] = integers(j[1], at(path, 1));
  } else {
    m.qmf[0] = m.qmf[1] = integers(j, path);
  }
  return m;
}

json to_json(const DmConstraintSet& c) {
  json arr = json::array();
  for (const auto& t : c.terms) {
    arr.push_back({{"kind", to_string(t.kind)}, {"path", t.path + 1}, {"k", t.k}, {"value", t.value}});
  }
  return arr;
}

json to_json(const DmRateResult& r) {
  json j;
  j["rate"] = r.rate;
  j["per_path_throughput"] = r.rate / 2.0;
  j["relay_rates"] = {r.relay_rates[0], r.relay_rates[1]};
  for (const char* key : {"distortions", "wz_residual"}) {
    const auto& src = std::string(key) == "distortions" ? r.distortions : r.wz_residual;
    json paths = json::array();
    for (const auto& m : src) {
      json o = json::object();
      for (const auto& [k, v] : m) o[std::to_string(k)] = v;
      paths.push_back(o);
    }
    j[key] = paths;
  }
  j["binding"] = json::array();
  for (const auto& [head, b] : r.binding) {
    j["binding"].push_back(
        {{"head", head}, {"kind", to_string(b.kind)}, {"path", b.path + 1}, {"k", b.k}, {"value", b.value}, {"halved", b.halved}});
  }
  j["constraints"] = to_json(r.constraints);
  j["infeasible"] = r.infeasible;
  j["infeasible_brackets"] = json::object();
  for (const auto& [k, br] : r.infeasible_brackets) j["infeasible_brackets"][std::to_string(k)] = {br.first, br.second};
  return j;
}

}  // namespace vfd
