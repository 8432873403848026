#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vfd/channel_model.hpp"

namespace vfd {

enum class Decoder { SD, JD };

/// Which reading of the cross-stage constraint I'_k to use.
/// AsPrinted evaluates the closed form with stage k+1 gains; TheoremConsistent
/// evaluates the common-message constraint at the interfered stage k, with
/// the residual private interference counted as noise.
enum class FormulaVariant { AsPrinted, TheoremConsistent };

std::string to_string(Decoder d);
std::string to_string(FormulaVariant v);
Decoder parse_decoder(const std::string& s);
FormulaVariant parse_variant(const std::string& s);

/// Relay modes and power splits shared by both paths.
struct ModeConfig {
  std::vector<int> qmf_set;   // sorted subset of 1..K
  std::vector<double> theta;  // theta[k-1] is the common-message fraction at stage k
  Decoder decoder = Decoder::SD;
  FormulaVariant variant = FormulaVariant::AsPrinted;

  bool is_qmf(int k) const;

  /// Split at stage k with the network conventions applied: the source split
  /// is inert (0), QMF stages and the destination use 1.
  double theta_at(int k) const;

  /// Throws std::invalid_argument if the config does not fit a K-stage network.
  void validate(int num_stages) const;

  static ModeConfig all_qmf(int num_stages, Decoder d = Decoder::SD, FormulaVariant v = FormulaVariant::AsPrinted);
  static ModeConfig all_df(int num_stages, double theta = 0.0, Decoder d = Decoder::SD,
                           FormulaVariant v = FormulaVariant::AsPrinted);
};

/// Partition of stages 0..K into runs that forward the same message.
/// Segment l starts at heads[l] (heads[0] = 0 is the source) and ends
/// before heads[l+1] (K+1 for the last one).
class Segmentation {
public:
  Segmentation(int num_stages, std::vector<int> heads) : num_stages_(num_stages), heads_(std::move(heads)) {}

  int num_stages() const { return num_stages_; }
  int num_segments() const { return static_cast<int>(heads_.size()); }
  int head(int ell) const { return heads_[static_cast<std::size_t>(ell)]; }
  int end(int ell) const { return ell + 1 < num_segments() ? head(ell + 1) : num_stages_ + 1; }
  std::vector<int> members(int ell) const;

  int segment_of(int k) const;
  /// The head k_l of the segment containing stage k.
  int head_of(int k) const { return head(segment_of(k)); }

  const std::vector<int>& heads() const { return heads_; }

private:
  int num_stages_;
  std::vector<int> heads_;
};

Segmentation segment(int num_stages, std::span<const int> qmf_set);

enum class TermKind { Link, Cross };

/// The term that attains a segment's minimum: I_k (Link) or I'_k (Cross).
struct Binding {
  int k = 0;
  TermKind kind = TermKind::Link;
  double value = 0.0;
};

struct RateBreakdown {
  double symmetric_rate = 0.0;
  double per_path_throughput = 0.0;
  std::map<int, double> segment_rates;  // keyed by segment head k_l
  std::map<int, double> quant_noise;    // keyed by QMF stage; only feasible stages
  std::map<int, Binding> binding;       // keyed by segment head k_l
  /// Set when a downstream segment carries rate 0, which forces every
  /// upstream segment to 0.
  bool infeasible_quantization = false;
  std::vector<int> zero_rate_heads;
};

/// I_k: rate of stage k's transmission into stage k+1.
double link_rate_Ik(const ChannelInstance& inst, const ModeConfig& cfg, std::optional<double> quant_noise_next, int k);
/// I_k1: private-message part of I_k.
double split_rate_Ik1(const ChannelInstance& inst, const ModeConfig& cfg, std::optional<double> quant_noise_next, int k);
/// I'_k: rate-splitting constraint at DF stage k.
double cross_constraint_Ipk(const ChannelInstance& inst, const ModeConfig& cfg, std::optional<double> quant_noise_next,
                            int k);

/// Rate of segment `ell` given the quantization noise of the next segment's
/// head (ignored for the last segment). Ties go to the smallest k, Link first.
Binding segment_rate(const ChannelInstance& inst, const ModeConfig& cfg, const Segmentation& seg, int ell,
                     double quant_noise_next);

/// Symmetric achievable rate of the mixed DF/QMF scheme for a fixed config.
RateBreakdown evaluate(const ChannelInstance& inst, const ModeConfig& cfg);

/// Rate r*N / (2(N+K)) delivered per path over N+K slots.
double schedule_throughput(double rate, int num_stages, long long num_messages);
/// Limit of schedule_throughput as N grows: r/2.
double schedule_asymptote(double rate);

}  // namespace vfd
