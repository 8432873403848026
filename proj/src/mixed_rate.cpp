#include "vfd/mixed_rate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vfd/info_core.hpp"

namespace vfd {

std::string to_string(Decoder d) { return d == Decoder::SD ? "sd" : "jd"; }

std::string to_string(FormulaVariant v) { return v == FormulaVariant::AsPrinted ? "printed" : "theorem"; }

Decoder parse_decoder(const std::string& s) {
  if (s == "sd" || s == "SD") return Decoder::SD;
  if (s == "jd" || s == "JD") return Decoder::JD;
  throw std::invalid_argument("unknown decoder '" + s + "' (expected sd or jd)");
}

FormulaVariant parse_variant(const std::string& s) {
  if (s == "printed" || s == "AS_PRINTED") return FormulaVariant::AsPrinted;
  if (s == "theorem" || s == "THEOREM_CONSISTENT") return FormulaVariant::TheoremConsistent;
  throw std::invalid_argument("unknown formula variant '" + s + "' (expected printed or theorem)");
}

bool ModeConfig::is_qmf(int k) const { return std::binary_search(qmf_set.begin(), qmf_set.end(), k); }

double ModeConfig::theta_at(int k) const {
  if (k <= 0) return 0.0;
  if (k > static_cast<int>(theta.size()) || is_qmf(k)) return 1.0;
  return theta[static_cast<std::size_t>(k - 1)];
}

void ModeConfig::validate(int num_stages) const {
  if (static_cast<int>(theta.size()) != num_stages) {
    throw std::invalid_argument("theta needs K = " + std::to_string(num_stages) + " entries, got " +
                                std::to_string(theta.size()));
  }
  for (std::size_t i = 0; i < qmf_set.size(); ++i) {
    const int k = qmf_set[i];
    if (k < 1 || k > num_stages) {
      throw std::invalid_argument("qmf_set entry " + std::to_string(k) + " outside 1.." + std::to_string(num_stages));
    }
    if (i > 0 && qmf_set[i - 1] >= k) throw std::invalid_argument("qmf_set must be strictly increasing");
  }
  for (int k = 1; k <= num_stages; ++k) {
    const double t = theta[static_cast<std::size_t>(k - 1)];
    if (!std::isfinite(t) || t < 0.0 || t > 1.0) {
      throw std::invalid_argument("theta[" + std::to_string(k - 1) + "] must lie in [0, 1]");
    }
    if (is_qmf(k) && t != 1.0) {
      throw std::invalid_argument("theta[" + std::to_string(k - 1) + "] = " + std::to_string(t) + " but stage " +
                                  std::to_string(k) + " is QMF; theta_k = 1 is required for every k in qmf_set");
    }
  }
}

ModeConfig ModeConfig::all_qmf(int num_stages, Decoder d, FormulaVariant v) {
  ModeConfig cfg;
  for (int k = 1; k <= num_stages; ++k) cfg.qmf_set.push_back(k);
  cfg.theta.assign(static_cast<std::size_t>(num_stages), 1.0);
  cfg.decoder = d;
  cfg.variant = v;
  return cfg;
}

ModeConfig ModeConfig::all_df(int num_stages, double theta, Decoder d, FormulaVariant v) {
  ModeConfig cfg;
  cfg.theta.assign(static_cast<std::size_t>(num_stages), theta);
  cfg.decoder = d;
  cfg.variant = v;
  return cfg;
}

// ---------------------------------------------------------------------------

std::vector<int> Segmentation::members(int ell) const {
  std::vector<int> out;
  for (int k = head(ell); k < end(ell); ++k) out.push_back(k);
  return out;
}

int Segmentation::segment_of(int k) const {
  if (k < 0 || k > num_stages_) throw std::out_of_range("stage " + std::to_string(k) + " outside 0..K");
  const auto it = std::upper_bound(heads_.begin(), heads_.end(), k);
  return static_cast<int>(it - heads_.begin()) - 1;
}

Segmentation segment(int num_stages, std::span<const int> qmf_set) {
  if (num_stages < 1) throw std::invalid_argument("num_stages must be >= 1");
  std::vector<int> heads{0};
  std::vector<int> sorted(qmf_set.begin(), qmf_set.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const int k = sorted[i];
    if (k < 1 || k > num_stages) {
      throw std::domain_error("QMF stage " + std::to_string(k) + " outside 1.." + std::to_string(num_stages));
    }
    if (i > 0 && sorted[i - 1] == k) throw std::domain_error("duplicate QMF stage " + std::to_string(k));
    heads.push_back(k);
  }
  return {num_stages, std::move(heads)};
}

// ---------------------------------------------------------------------------

namespace {

double log2_1p(double x) { return std::log1p(x) / std::numbers::ln2; }

// Noise term 1 + (1 - theta_{k+1}) INR_{k+1} + sigma^2_{k+1} seen by stage k's receiver.
double receiver_noise(const ChannelInstance& inst, const ModeConfig& cfg, double quant_noise_next, int k) {
  const int K = inst.num_stages();
  const int next = k + 1;
  const double sigma2 = next <= K && cfg.is_qmf(next) ? quant_noise_next : 0.0;
  return 1.0 + (1.0 - cfg.theta_at(next)) * inst.inr(next) + sigma2;
}

double ik(const ChannelInstance& inst, const ModeConfig& cfg, double noise_next, int k) {
  return log2_1p(inst.snr(k + 1) / receiver_noise(inst, cfg, noise_next, k));
}

double ik1(const ChannelInstance& inst, const ModeConfig& cfg, double noise_next, int k) {
  return log2_1p((1.0 - cfg.theta_at(k)) * inst.snr(k + 1) / receiver_noise(inst, cfg, noise_next, k));
}

double ipk(const ChannelInstance& inst, const ModeConfig& cfg, double noise_next, int k) {
  const double private_part = ik1(inst, cfg, noise_next, k);
  if (cfg.variant == FormulaVariant::AsPrinted) {
    const double snr = inst.snr(k + 1);
    const double inr = inst.inr(k + 1);
    const double t = cfg.theta_at(k + 1);
    if (cfg.decoder == Decoder::SD) return log2_1p(t * inr / (1.0 + snr)) + private_part;
    return 0.5 * log2_1p((snr + t * inr) / (1.0 + (1.0 - t) * inr)) + 0.5 * private_part;
  }
  const double snr = inst.snr(k);
  const double inr = inst.inr(k);
  const double t = cfg.theta_at(k);
  if (cfg.decoder == Decoder::SD) return log2_1p(t * inr / (1.0 + snr + (1.0 - t) * inr)) + private_part;
  return 0.5 * log2_1p((snr + t * inr) / (1.0 + (1.0 - t) * inr)) + 0.5 * private_part;
}

double checked_noise(const ChannelInstance& inst, const ModeConfig& cfg, std::optional<double> quant_noise_next, int k,
                     bool is_cross) {
  const int K = inst.num_stages();
  if (k < 0 || k > K) throw std::invalid_argument("stage " + std::to_string(k) + " outside 0..K");
  if (is_cross && k == 0 && cfg.variant == FormulaVariant::TheoremConsistent) {
    throw std::invalid_argument("the source has no interfered relay; I'_0 is undefined in the theorem variant");
  }
  if (k + 1 <= K && cfg.is_qmf(k + 1)) {
    if (!quant_noise_next) {
      throw std::invalid_argument("stage " + std::to_string(k + 1) + " is QMF; its quantization noise is required");
    }
    if (std::isnan(*quant_noise_next) || *quant_noise_next < 0.0) {
      throw std::invalid_argument("quantization noise must be >= 0");
    }
    return *quant_noise_next;
  }
  return 0.0;
}

}  // namespace

double link_rate_Ik(const ChannelInstance& inst, const ModeConfig& cfg, std::optional<double> quant_noise_next, int k) {
  return ik(inst, cfg, checked_noise(inst, cfg, quant_noise_next, k, false), k);
}

double split_rate_Ik1(const ChannelInstance& inst, const ModeConfig& cfg, std::optional<double> quant_noise_next,
                      int k) {
  return ik1(inst, cfg, checked_noise(inst, cfg, quant_noise_next, k, false), k);
}

double cross_constraint_Ipk(const ChannelInstance& inst, const ModeConfig& cfg, std::optional<double> quant_noise_next,
                            int k) {
  return ipk(inst, cfg, checked_noise(inst, cfg, quant_noise_next, k, true), k);
}

Binding segment_rate(const ChannelInstance& inst, const ModeConfig& cfg, const Segmentation& seg, int ell,
                     double quant_noise_next) {
  const int head = seg.head(ell);
  const int end = seg.end(ell);
  Binding best{head, TermKind::Link, ik(inst, cfg, quant_noise_next, head)};
  for (int k = head + 1; k < end; ++k) {
    const double link = ik(inst, cfg, quant_noise_next, k);
    if (link < best.value) best = {k, TermKind::Link, link};
    const double cross = ipk(inst, cfg, quant_noise_next, k);
    if (cross < best.value) best = {k, TermKind::Cross, cross};
  }
  return best;
}

RateBreakdown evaluate(const ChannelInstance& inst, const ModeConfig& cfg) {
  const int K = inst.num_stages();
  cfg.validate(K);
  const Segmentation seg = segment(K, cfg.qmf_set);

  RateBreakdown out;
  double noise_next = 0.0;
  bool dead = false;
  for (int ell = seg.num_segments() - 1; ell >= 0; --ell) {
    const int head = seg.head(ell);
    Binding b;
    if (dead) {
      b = {head, TermKind::Link, 0.0};
    } else {
      b = segment_rate(inst, cfg, seg, ell, noise_next);
    }
    out.segment_rates[head] = b.value;
    out.binding[head] = b;
    if (ell == 0) break;
    if (b.value <= 0.0) {
      // A zero-rate index cannot be forwarded: infinite distortion upstream.
      dead = true;
      out.infeasible_quantization = true;
      out.zero_rate_heads.push_back(head);
      continue;
    }
    noise_next = wyner_ziv_noise(inst.snr(head), b.value);
    out.quant_noise[head] = noise_next;
  }
  out.symmetric_rate = out.segment_rates.at(0);
  out.per_path_throughput = schedule_asymptote(out.symmetric_rate);
  std::sort(out.zero_rate_heads.begin(), out.zero_rate_heads.end());
  return out;
}

double schedule_throughput(double rate, int num_stages, long long num_messages) {
  if (num_messages < 1) throw std::invalid_argument("N must be >= 1");
  if (num_stages < 0) throw std::invalid_argument("K must be >= 0");
  const double n = static_cast<double>(num_messages);
  return rate * n / (2.0 * (n + num_stages));
}

double schedule_asymptote(double rate) { return rate / 2.0; }

}  // namespace vfd
