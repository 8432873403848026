#include "vfd/channel_model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace vfd {

namespace {

constexpr double kPmfTolerance = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require_gains(const std::vector<double>& v, const char* name) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < 0.0) {
      std::ostringstream os;
      os << name << "[" << i << "] must be finite and >= 0, got " << v[i];
      throw std::invalid_argument(os.str());
    }
  }
}

}  // namespace

ChannelInstance::ChannelInstance(std::vector<double> snr, std::vector<double> inr)
    : snr_(std::move(snr)), inr_(std::move(inr)) {
  if (inr_.empty()) {
    throw std::invalid_argument("a channel instance needs at least one relay stage");
  }
  if (snr_.size() != inr_.size() + 1) {
    throw std::invalid_argument("snr needs K+1 = " + std::to_string(inr_.size() + 1) + " entries, got " +
                                std::to_string(snr_.size()));
  }
  require_gains(snr_, "snr");
  require_gains(inr_, "inr");
}

ChannelInstance ChannelInstance::from_db(std::span<const double> snr_db, std::span<const double> inr_db) {
  std::vector<double> snr, inr;
  for (double x : snr_db) snr.push_back(db_to_linear(x));
  for (double x : inr_db) inr.push_back(db_to_linear(x));
  return {std::move(snr), std::move(inr)};
}

double ChannelInstance::snr(int k) const {
  if (k < 1 || k > num_stages() + 1) throw std::out_of_range("snr index " + std::to_string(k));
  return snr_[static_cast<std::size_t>(k - 1)];
}

double ChannelInstance::inr(int k) const {
  if (k == num_stages() + 1) return 0.0;
  if (k < 1 || k > num_stages()) throw std::out_of_range("inr index " + std::to_string(k));
  return inr_[static_cast<std::size_t>(k - 1)];
}

std::uint64_t ChannelInstance::digest() const {
  std::uint64_t h = splitmix64(snr_.size());
  for (const auto* v : {&snr_, &inr_}) {
    for (double x : *v) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(x));
  }
  return h;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

void EnsembleSpec::validate() const {
  if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_db must be finite");
  if (!(alpha_lo >= 0.0) || !(alpha_lo <= alpha_hi) || !std::isfinite(alpha_hi)) {
    throw std::invalid_argument("alpha interval must satisfy 0 <= alpha_lo <= alpha_hi");
  }
  if (trials < 1) throw std::invalid_argument("trials must be positive");
}

double EnsembleSpec::snr_linear() const { return db_to_linear(snr_db); }

double counter_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

ChannelInstance draw_instance(const EnsembleSpec& spec, int num_stages, int trial_index) {
  spec.validate();
  if (num_stages < 1) throw std::invalid_argument("num_stages must be >= 1");
  if (trial_index < 0 || trial_index >= spec.trials) {
    throw std::out_of_range("trial_index " + std::to_string(trial_index) + " outside [0, trials)");
  }
  const double snr = spec.snr_linear();
  std::vector<double> snrs(static_cast<std::size_t>(num_stages) + 1, snr);
  std::vector<double> inrs;
  inrs.reserve(static_cast<std::size_t>(num_stages));
  for (int k = 1; k <= num_stages; ++k) {
    const double u = counter_uniform(spec.seed, static_cast<std::uint64_t>(trial_index), static_cast<std::uint64_t>(k));
    const double alpha = spec.alpha_lo == spec.alpha_hi ? spec.alpha_lo : spec.alpha_lo + (spec.alpha_hi - spec.alpha_lo) * u;
    inrs.push_back(std::pow(snr, alpha));
  }
  return {std::move(snrs), std::move(inrs)};
}

// ---------------------------------------------------------------------------

CondPmf QuantizerFamily::at(double d) const {
  if (!(d >= 0.0 && d <= 1.0)) throw std::domain_error("quantizer knob must lie in [0, 1]");
  CondPmf out = at_zero;
  for (std::size_t i = 0; i < out.table.size(); ++i) out.table[i] = (1.0 - d) * at_zero.table[i] + d * at_one.table[i];
  return out;
}

QuantizerFamily QuantizerFamily::erasure(int y_size) {
  QuantizerFamily q;
  q.name = "erasure";
  q.at_zero = {y_size, y_size + 1, std::vector<double>(static_cast<std::size_t>(y_size) * (y_size + 1), 0.0)};
  q.at_one = q.at_zero;
  for (int y = 0; y < y_size; ++y) {
    q.at_zero.table[static_cast<std::size_t>(y) * (y_size + 1) + y] = 1.0;
    q.at_one.table[static_cast<std::size_t>(y) * (y_size + 1) + y_size] = 1.0;
  }
  return q;
}

QuantizerFamily QuantizerFamily::flip(int y_size) {
  QuantizerFamily q;
  q.name = "flip";
  q.at_zero = {y_size, y_size, std::vector<double>(static_cast<std::size_t>(y_size) * y_size, 0.0)};
  q.at_one = {y_size, y_size, std::vector<double>(static_cast<std::size_t>(y_size) * y_size, 1.0 / y_size)};
  for (int y = 0; y < y_size; ++y) q.at_zero.table[static_cast<std::size_t>(y) * y_size + y] = 1.0;
  return q;
}

std::vector<double> NodeInput::x_marginal() const {
  if (!has_aux()) return p_x;
  std::vector<double> px(static_cast<std::size_t>(x_given_u.cols), 0.0);
  for (int u = 0; u < x_given_u.rows; ++u) {
    for (int x = 0; x < x_given_u.cols; ++x) px[static_cast<std::size_t>(x)] += p_u[static_cast<std::size_t>(u)] * x_given_u(u, x);
  }
  return px;
}

namespace {

struct Checker {
  std::vector<std::string> violations;

  void pmf(const std::vector<double>& p, const std::string& name, std::size_t expected_size) {
    if (p.size() != expected_size) {
      violations.push_back(name + ": expected " + std::to_string(expected_size) + " entries, got " + std::to_string(p.size()));
      return;
    }
    row(p.data(), p.size(), name);
  }

  void cond(const CondPmf& c, const std::string& name, int rows, int cols) {
    if (c.rows != rows || c.cols != cols || c.table.size() != static_cast<std::size_t>(rows) * cols) {
      std::ostringstream os;
      os << name << ": expected shape " << rows << "x" << cols << ", got " << c.rows << "x" << c.cols << " with "
         << c.table.size() << " entries";
      violations.push_back(os.str());
      return;
    }
    for (int r = 0; r < rows; ++r) {
      row(c.table.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols),
          name + " row " + std::to_string(r));
    }
  }

  void row(const double* p, std::size_t n, const std::string& name) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(p[i] >= 0.0) || !std::isfinite(p[i])) {
        violations.push_back(name + ": entry " + std::to_string(i) + " is negative or not finite");
        return;
      }
      sum += p[i];
    }
    if (std::abs(sum - 1.0) > kPmfTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << name << ": row sum " << sum;
      violations.push_back(os.str());
    }
  }
};

}  // namespace

std::vector<std::string> validate_dm_spec(const DmNetworkSpec& spec) {
  Checker c;
  const int K = spec.num_stages;
  if (K < 1) {
    c.violations.push_back("num_stages must be >= 1");
    return c.violations;
  }
  const auto sz = [](const std::vector<std::vector<std::string>>& a, int k) {
    return k < static_cast<int>(a.size()) ? static_cast<int>(a[static_cast<std::size_t>(k)].size()) : 0;
  };
  if (static_cast<int>(spec.x_alphabets.size()) != K + 1) c.violations.push_back("x_alphabets: expected K+1 entries");
  if (static_cast<int>(spec.u_alphabets.size()) != K + 1) c.violations.push_back("u_alphabets: expected K+1 entries");
  if (static_cast<int>(spec.y_alphabets.size()) != K + 2) c.violations.push_back("y_alphabets: expected K+2 entries");
  if (static_cast<int>(spec.channels.size()) != K + 2) c.violations.push_back("channels: expected K+2 entries");
  if (static_cast<int>(spec.quantizers.size()) != K + 1) c.violations.push_back("quantizers: expected K+1 entries");
  if (spec.inputs.size() != 2) c.violations.push_back("inputs: expected one entry per path");
  if (!c.violations.empty()) return c.violations;

  for (int k = 0; k <= K; ++k) {
    if (sz(spec.x_alphabets, k) < 1) c.violations.push_back("x_alphabets[" + std::to_string(k) + "] is empty");
  }
  for (int k = 1; k <= K + 1; ++k) {
    if (sz(spec.y_alphabets, k) < 1) c.violations.push_back("y_alphabets[" + std::to_string(k) + "] is empty");
  }
  for (int k = 1; k <= K; ++k) {
    if (sz(spec.u_alphabets, k) < 1) c.violations.push_back("u_alphabets[" + std::to_string(k) + "] is empty");
  }
  if (!c.violations.empty()) return c.violations;

  for (int k = 1; k <= K; ++k) {
    const int rows = sz(spec.x_alphabets, k - 1) * sz(spec.x_alphabets, k);
    c.cond(spec.channels[static_cast<std::size_t>(k)], "channels[" + std::to_string(k) + "]", rows, sz(spec.y_alphabets, k));
  }
  c.cond(spec.channels[static_cast<std::size_t>(K + 1)], "channels[" + std::to_string(K + 1) + "]", sz(spec.x_alphabets, K),
         sz(spec.y_alphabets, K + 1));

  for (int k = 1; k <= K; ++k) {
    const auto& q = spec.quantizers[static_cast<std::size_t>(k)];
    const std::string name = "quantizers[" + std::to_string(k) + "]";
    c.cond(q.at_zero, name + ".at_zero", sz(spec.y_alphabets, k), q.at_zero.cols);
    c.cond(q.at_one, name + ".at_one", sz(spec.y_alphabets, k), q.at_zero.cols);
  }

  for (int path = 0; path < 2; ++path) {
    const auto& nodes = spec.inputs[static_cast<std::size_t>(path)];
    if (static_cast<int>(nodes.size()) != K + 1) {
      c.violations.push_back("inputs[" + std::to_string(path) + "]: expected K+1 nodes");
      continue;
    }
    for (int k = 0; k <= K; ++k) {
      const auto& n = nodes[static_cast<std::size_t>(k)];
      const std::string name = "inputs[" + std::to_string(path) + "][" + std::to_string(k) + "]";
      const auto xs = static_cast<std::size_t>(sz(spec.x_alphabets, k));
      if (k == 0) {
        if (n.has_aux()) c.violations.push_back(name + ": the source has no auxiliary variable");
        c.pmf(n.p_x, name + ".p_x", xs);
      } else if (!n.has_aux()) {
        c.violations.push_back(name + ": relays need p_u and p_x_given_u");
      } else {
        const auto us = static_cast<std::size_t>(sz(spec.u_alphabets, k));
        c.pmf(n.p_u, name + ".p_u", us);
        c.cond(n.x_given_u, name + ".p_x_given_u", static_cast<int>(us), static_cast<int>(xs));
      }
    }
  }
  return c.violations;
}

}  // namespace vfd
