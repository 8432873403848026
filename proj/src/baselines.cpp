#include "vfd/baselines.hpp"

#include <algorithm>
#include <stdexcept>

#include "vfd/info_core.hpp"

namespace vfd {

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::OptimizedQmf: return "optimized_qmf";
    case BaselineKind::NoiseLevelQmf: return "noise_level_qmf";
    case BaselineKind::StageDepthQmf: return "stage_depth_qmf";
    case BaselineKind::PureDf: return "pure_df";
    case BaselineKind::HopCapacityBound: return "hop_bound";
  }
  throw std::logic_error("unhandled baseline kind");
}

RateBreakdown floored_qmf_chain(const ChannelInstance& inst, double floor) {
  if (!(floor >= 0.0)) throw std::invalid_argument("distortion floor must be >= 0");
  const int K = inst.num_stages();
  // Every relay quantizes, so each segment is a single hop with theta = 1.
  const ModeConfig cfg = ModeConfig::all_qmf(K);
  RateBreakdown out;
  double noise_next = 0.0;
  bool dead = false;
  for (int k = K; k >= 0; --k) {
    const double r = dead ? 0.0 : link_rate_Ik(inst, cfg, noise_next, k);
    out.segment_rates[k] = r;
    out.binding[k] = {k, TermKind::Link, r};
    if (k == 0) break;
    if (r <= 0.0) {
      dead = true;
      if (!out.infeasible_quantization) out.zero_rate_heads.push_back(k);
      out.infeasible_quantization = true;
      continue;
    }
    noise_next = std::max(floor, wyner_ziv_noise(inst.snr(k), r));
    out.quant_noise[k] = noise_next;
  }
  out.symmetric_rate = out.segment_rates.at(0);
  out.per_path_throughput = schedule_asymptote(out.symmetric_rate);
  return out;
}

RateBreakdown baseline_rate(const ChannelInstance& inst, BaselineKind kind, const BaselineOptions& opts) {
  const int K = inst.num_stages();
  switch (kind) {
    case BaselineKind::OptimizedQmf:
      return evaluate(inst, ModeConfig::all_qmf(K, opts.decoder, opts.variant));
    case BaselineKind::NoiseLevelQmf:
      return floored_qmf_chain(inst, opts.noise_level_floor);
    case BaselineKind::StageDepthQmf:
      return floored_qmf_chain(inst, opts.stage_depth_c * K);
    case BaselineKind::PureDf: {
      SearchSpec s = opts.df_search;
      s.given_qmf_set = std::vector<int>{};
      s.decoder = opts.decoder;
      s.variant = opts.variant;
      return optimize(inst, s).best_breakdown;
    }
    case BaselineKind::HopCapacityBound: {
      RateBreakdown out;
      Binding b{0, TermKind::Link, gaussian_rate(inst.snr(1))};
      for (int k = 1; k <= K; ++k) {
        const double r = gaussian_rate(inst.snr(k + 1));
        if (r < b.value) b = {k, TermKind::Link, r};
      }
      out.symmetric_rate = b.value;
      out.per_path_throughput = schedule_asymptote(b.value);
      out.segment_rates[0] = b.value;
      out.binding[0] = b;
      return out;
    }
  }
  throw std::logic_error("unhandled baseline kind");
}

}  // namespace vfd
