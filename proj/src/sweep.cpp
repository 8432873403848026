#include "vfd/sweep.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace vfd {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::Mixed: return "mixed";
    case Scheme::OptimizedQmf: return "optimized_qmf";
    case Scheme::NoiseLevelQmf: return "noise_level_qmf";
    case Scheme::StageDepthQmf: return "stage_depth_qmf";
    case Scheme::PureDf: return "pure_df";
    case Scheme::HopBound: return "hop_bound";
  }
  throw std::logic_error("unhandled scheme");
}

Scheme parse_scheme(const std::string& s) {
  for (Scheme x : all_schemes()) {
    if (to_string(x) == s) return x;
  }
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

std::vector<Scheme> all_schemes() {
  return {Scheme::Mixed, Scheme::OptimizedQmf, Scheme::NoiseLevelQmf, Scheme::StageDepthQmf, Scheme::PureDf, Scheme::HopBound};
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

double SweepResult::mean(int num_stages, Scheme s) const {
  for (const auto& m : summary) {
    if (m.num_stages == num_stages && m.scheme == s) return m.mean;
  }
  throw std::out_of_range("no summary for K=" + std::to_string(num_stages) + " scheme " + to_string(s));
}

double scheme_rate(const ChannelInstance& inst, Scheme s, const SweepConfig& cfg) {
  BaselineOptions opts;
  opts.decoder = cfg.decoder;
  opts.variant = cfg.variant;
  opts.noise_level_floor = cfg.noise_level_floor;
  opts.stage_depth_c = cfg.stage_depth_c;
  opts.df_search = cfg.search;
  opts.df_search.workers = 1;
  switch (s) {
    case Scheme::Mixed: {
      SearchSpec spec = cfg.search;
      spec.given_qmf_set.reset();
      spec.decoder = cfg.decoder;
      spec.variant = cfg.variant;
      spec.workers = 1;
      return optimize(inst, spec).best_breakdown.symmetric_rate;
    }
    case Scheme::OptimizedQmf: return baseline_rate(inst, BaselineKind::OptimizedQmf, opts).symmetric_rate;
    case Scheme::NoiseLevelQmf: return baseline_rate(inst, BaselineKind::NoiseLevelQmf, opts).symmetric_rate;
    case Scheme::StageDepthQmf: return baseline_rate(inst, BaselineKind::StageDepthQmf, opts).symmetric_rate;
    case Scheme::PureDf: return baseline_rate(inst, BaselineKind::PureDf, opts).symmetric_rate;
    case Scheme::HopBound: return baseline_rate(inst, BaselineKind::HopCapacityBound, opts).symmetric_rate;
  }
  throw std::logic_error("unhandled scheme");
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.ensemble.validate();
  if (cfg.k_list.empty()) throw std::invalid_argument("k_list is empty");
  for (int K : cfg.k_list) {
    if (K < 1) throw std::invalid_argument("every K in k_list must be >= 1");
  }
  if (cfg.schemes.empty()) throw std::invalid_argument("no schemes selected");

  SweepResult out;
  out.schemes = cfg.schemes;
  const auto trials = static_cast<std::size_t>(cfg.ensemble.trials);
  out.records.resize(cfg.k_list.size() * trials);

  // Each work item is independent; results land in fixed slots, so the
  // output does not depend on the worker count.
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < out.records.size() && !failed; i = next++) {
      try {
        const int K = cfg.k_list[i / trials];
        const int t = static_cast<int>(i % trials);
        const ChannelInstance inst = draw_instance(cfg.ensemble, K, t);
        TrialRecord rec{K, t, inst.digest(), {}};
        for (Scheme s : cfg.schemes) rec.rates.push_back(scheme_rate(inst, s, cfg));
        out.records[i] = std::move(rec);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const int n = std::max(1, cfg.workers);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t ki = 0; ki < cfg.k_list.size(); ++ki) {
    for (std::size_t si = 0; si < cfg.schemes.size(); ++si) {
      double sum = 0.0;
      for (std::size_t t = 0; t < trials; ++t) sum += out.records[ki * trials + t].rates[si];
      const double mean = sum / static_cast<double>(trials);
      double ss = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        const double dlt = out.records[ki * trials + t].rates[si] - mean;
        ss += dlt * dlt;
      }
      const double se = trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials)) : 0.0;
      out.summary.push_back({cfg.k_list[ki], cfg.schemes[si], mean, se, static_cast<int>(trials)});
    }
  }

  auto& md = out.metadata;
  md["artifact_version"] = kVersion;
  md["decoder"] = to_string(cfg.decoder);
  md["formula_variant"] = to_string(cfg.variant);
  md["snr_db"] = format_double(cfg.ensemble.snr_db);
  md["alpha_lo"] = format_double(cfg.ensemble.alpha_lo);
  md["alpha_hi"] = format_double(cfg.ensemble.alpha_hi);
  md["trials"] = std::to_string(cfg.ensemble.trials);
  md["seed"] = std::to_string(cfg.ensemble.seed);
  md["noise_level_floor"] = format_double(cfg.noise_level_floor);
  md["stage_depth_c"] = format_double(cfg.stage_depth_c);
  md["theta_search"] = cfg.search.use_grid ? "grid(" + std::to_string(cfg.search.grid.points_per_dim) + ")"
                                           : "coordinate(restarts=" + std::to_string(cfg.search.coordinate.restarts) +
                                                 ",sweeps=" + std::to_string(cfg.search.coordinate.sweeps) + ")";
  md["baseline_model"] =
      "noise_level_qmf and stage_depth_qmf run the all-QMF successive-decoding chain with quantization noise "
      "max(floor, Wyner-Ziv noise); hop_bound is min_k log2(1+SNR_k), a benchmark and not a converse";
  return out;
}

std::string records_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "K,trial,scheme,decoder,variant,rate_bits\n";
  const std::string dec = r.metadata.at("decoder");
  const std::string var = r.metadata.at("formula_variant");
  for (const auto& rec : r.records) {
    for (std::size_t s = 0; s < r.schemes.size(); ++s) {
      os << rec.num_stages << ',' << rec.trial << ',' << to_string(r.schemes[s]) << ',' << dec << ',' << var << ','
         << format_double(rec.rates[s]) << '\n';
    }
  }
  return os.str();
}

std::string summary_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "K,scheme,decoder,variant,mean_rate_bits,std_error,trials\n";
  const std::string dec = r.metadata.at("decoder");
  const std::string var = r.metadata.at("formula_variant");
  for (const auto& m : r.summary) {
    os << m.num_stages << ',' << to_string(m.scheme) << ',' << dec << ',' << var << ',' << format_double(m.mean) << ','
       << format_double(m.std_error) << ',' << m.trials << '\n';
  }
  return os.str();
}

}  // namespace vfd
