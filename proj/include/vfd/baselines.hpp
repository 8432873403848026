#pragma once

#include <string>

#include "vfd/channel_model.hpp"
#include "vfd/config_optimizer.hpp"
#include "vfd/mixed_rate.hpp"

namespace vfd {

enum class BaselineKind { OptimizedQmf, NoiseLevelQmf, StageDepthQmf, PureDf, HopCapacityBound };

std::string to_string(BaselineKind kind);

struct BaselineOptions {
  Decoder decoder = Decoder::SD;
  FormulaVariant variant = FormulaVariant::AsPrinted;
  /// Noise-level QMF distortion floor.
  double noise_level_floor = 1.0;
  /// Stage-depth QMF uses a floor of stage_depth_c * K.
  double stage_depth_c = 1.0;
  /// Split search used by PureDf.
  SearchSpec df_search;
};

/// All-QMF chain in which each quantizer's noise is the larger of `floor`
/// and the Wyner-Ziv noise matching the forwarded rate.
RateBreakdown floored_qmf_chain(const ChannelInstance& inst, double floor);

RateBreakdown baseline_rate(const ChannelInstance& inst, BaselineKind kind, const BaselineOptions& opts = {});

}  // namespace vfd
