#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "vfd/channel_model.hpp"
#include "vfd/config_optimizer.hpp"
#include "vfd/dm_region.hpp"
#include "vfd/mixed_rate.hpp"

namespace vfd {

/// Malformed input document; what() starts with the JSON path of the
/// offending value, e.g. "config.theta[1]: expected a number".
class JsonInputError : public std::invalid_argument {
public:
  JsonInputError(const std::string& path, const std::string& msg) : std::invalid_argument(path + ": " + msg) {}
};

using nlohmann::json;

/// {"K": int, "snr_db": [K+1 numbers], "inr_db": [K numbers]}. A null entry
/// stands for a zero linear gain (-inf dB).
ChannelInstance instance_from_json(const json& j, const std::string& path = "instance");
json to_json(const ChannelInstance& inst);

/// {"snr_db", "alpha_lo", "alpha_hi", "trials", "seed"}.
EnsembleSpec ensemble_from_json(const json& j, const std::string& path = "ensemble");
json to_json(const EnsembleSpec& spec);

/// {"qmf_set": [...], "theta": [K numbers], "decoder": "sd"|"jd",
///  "variant": "printed"|"theorem"}. theta defaults to 1 on QMF stages and 0
/// elsewhere. Validation against K is left to ModeConfig::validate.
ModeConfig mode_config_from_json(const json& j, int num_stages, const std::string& path = "config");
json to_json(const ModeConfig& cfg);

/// {"mode": "exhaustive"|"given", "qmf_set": [...], "theta_search": "grid"|"coordinate",
///  "points_per_dim", "restarts", "sweeps", "tol", "decoder", "variant"}; all optional.
SearchSpec search_from_json(const json& j, const std::string& path = "search");

json to_json(const RateBreakdown& r);
json to_json(const Optimum& o);

DmNetworkSpec dm_spec_from_json(const json& j, const std::string& path = "spec");
json to_json(const DmNetworkSpec& spec);
/// [[path-1 QMF stages], [path-2 QMF stages]] or a single list used for both.
DmModes dm_modes_from_json(const json& j, const std::string& path = "modes");
json to_json(const DmConstraintSet& c);
json to_json(const DmRateResult& r);

}  // namespace vfd
