#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vfd/baselines.hpp"
#include "vfd/channel_model.hpp"
#include "vfd/config_optimizer.hpp"

namespace vfd {

enum class Scheme { Mixed, OptimizedQmf, NoiseLevelQmf, StageDepthQmf, PureDf, HopBound };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);
std::vector<Scheme> all_schemes();

struct SweepConfig {
  EnsembleSpec ensemble;
  std::vector<int> k_list{1, 2, 3, 4};
  std::vector<Scheme> schemes = all_schemes();
  Decoder decoder = Decoder::JD;
  FormulaVariant variant = FormulaVariant::AsPrinted;
  double noise_level_floor = 1.0;
  double stage_depth_c = 1.0;
  SearchSpec search;  // split search for mixed and pure_df
  int workers = 1;
};

struct TrialRecord {
  int num_stages = 0;
  int trial = 0;
  std::uint64_t instance_digest = 0;
  std::vector<double> rates;  // one per configured scheme
};

struct SchemeSummary {
  int num_stages = 0;
  Scheme scheme = Scheme::Mixed;
  double mean = 0.0;
  double std_error = 0.0;
  int trials = 0;
};

struct SweepResult {
  std::vector<Scheme> schemes;
  std::vector<TrialRecord> records;  // ordered by (K position in k_list, trial)
  std::vector<SchemeSummary> summary;
  std::map<std::string, std::string> metadata;

  double mean(int num_stages, Scheme s) const;
};

/// Rate of one scheme on one instance.
double scheme_rate(const ChannelInstance& inst, Scheme s, const SweepConfig& cfg);

SweepResult run_sweep(const SweepConfig& cfg);

/// Per-trial rows: K,trial,scheme,decoder,variant,rate_bits.
std::string records_csv(const SweepResult& r);
/// K,scheme,decoder,variant,mean_rate_bits,std_error,trials.
std::string summary_csv(const SweepResult& r);

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace vfd
