#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vfd {

/// Gaussian K-stage virtual full-duplex relay channel with symmetric paths.
///
/// Gains are linear power ratios. Stage indices follow the network
/// convention: snr(k) for k = 1..K+1 is the hop into stage k (stage K+1 is
/// the destination) and inr(k) for k = 1..K couples the two relays of
/// stage k. The destination hears a single relay, so inr(K+1) = 0.
class ChannelInstance {
public:
  ChannelInstance(std::vector<double> snr, std::vector<double> inr);

  static ChannelInstance from_db(std::span<const double> snr_db, std::span<const double> inr_db);

  int num_stages() const { return static_cast<int>(inr_.size()); }

  double snr(int k) const;
  double inr(int k) const;

  const std::vector<double>& snr_values() const { return snr_; }
  const std::vector<double>& inr_values() const { return inr_; }

  /// Stable 64-bit digest of the gains; used to tag sweep records.
  std::uint64_t digest() const;

  bool operator==(const ChannelInstance&) const = default;

private:
  std::vector<double> snr_;
  std::vector<double> inr_;
};

struct EnsembleSpec {
  double snr_db = 20.0;
  double alpha_lo = 1.0;
  double alpha_hi = 2.0;
  int trials = 200;
  std::uint64_t seed = 1;

  void validate() const;
  double snr_linear() const;
};

double db_to_linear(double db);
double linear_to_db(double linear);

/// Uniform double in [0, 1) determined only by (seed, a, b).
double counter_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// Draws the K-stage instance of trial `trial_index`: all hops share
/// SNR = 10^(snr_db/10) and INR_k = SNR^alpha_k with alpha_k uniform on
/// [alpha_lo, alpha_hi], keyed by (seed, trial_index, k).
ChannelInstance draw_instance(const EnsembleSpec& spec, int num_stages, int trial_index);

// ---------------------------------------------------------------------------
// Discrete memoryless description.

/// Row-major conditional pmf p(col | row).
struct CondPmf {
  int rows = 0;
  int cols = 0;
  std::vector<double> table;

  double operator()(int row, int col) const { return table[static_cast<std::size_t>(row) * cols + col]; }
};

/// One-parameter quantizer family p_d(yhat | y) = (1 - d) * at_zero + d * at_one.
struct QuantizerFamily {
  std::string name;  // "erasure", "flip" or "mixture"
  CondPmf at_zero;
  CondPmf at_one;

  CondPmf at(double d) const;
  int output_size() const { return at_zero.cols; }

  static QuantizerFamily erasure(int y_size);
  static QuantizerFamily flip(int y_size);
};

/// Transmit distribution of one node. Relays carry p(u) and p(x|u); when the
/// active modes leave a relay without rate splitting the x-marginal is used.
/// Sources carry p(x) only (p_u empty).
struct NodeInput {
  std::vector<double> p_u;
  CondPmf x_given_u;
  std::vector<double> p_x;

  bool has_aux() const { return !p_u.empty(); }
  std::vector<double> x_marginal() const;
};

/// Finite-alphabet network, one stage per entry.
///
/// Stage k in 0..K carries the transmit alphabet x_alphabets[k]; stages
/// 1..K also have auxiliary alphabets u_alphabets[k] (entry 0 unused).
/// Receive alphabets y_alphabets[k] exist for k in 1..K+1 (K+1 = destination).
/// channels[k] for k in 1..K is p(y_k | x_{k-1}, x_interferer) with row index
/// x_prev * |X_k| + x_interferer; channels[K+1] is p(y_D | x_K). Both paths
/// share the stage channels. inputs[path][k] for path 0/1 and k in 0..K.
struct DmNetworkSpec {
  int num_stages = 0;
  std::vector<std::vector<std::string>> x_alphabets;
  std::vector<std::vector<std::string>> u_alphabets;
  std::vector<std::vector<std::string>> y_alphabets;
  std::vector<CondPmf> channels;
  std::vector<QuantizerFamily> quantizers;
  std::vector<std::vector<NodeInput>> inputs;
};

/// Lists every normalization or shape problem found in the spec; empty when
/// the spec is consistent.
std::vector<std::string> validate_dm_spec(const DmNetworkSpec& spec);

}  // namespace vfd
