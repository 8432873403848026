#include "vfd/dm_region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace vfd {

// ---------------------------------------------------------------------------
// JointPmf

namespace {

std::size_t product_size(const std::vector<Variable>& vars) {
  std::size_t n = 1;
  for (const auto& v : vars) {
    if (v.size < 1) throw std::domain_error("variable " + v.label + " has an empty alphabet");
    n *= static_cast<std::size_t>(v.size);
    if (n > JointPmf::kMaxEntries) {
      throw std::length_error("product alphabet exceeds " + std::to_string(JointPmf::kMaxEntries) + " entries");
    }
  }
  return n;
}

}  // namespace

JointPmf::JointPmf(std::vector<Variable> vars, std::vector<double> table) : vars_(std::move(vars)), table_(std::move(table)) {
  std::set<std::string> seen;
  for (const auto& v : vars_) {
    if (!seen.insert(v.label).second) throw std::domain_error("duplicate variable label " + v.label);
  }
  if (table_.size() != product_size(vars_)) throw std::domain_error("table size does not match the product alphabet");
  double sum = 0.0;
  for (double p : table_) {
    if (!std::isfinite(p) || p < 0.0) throw std::domain_error("joint pmf entries must be finite and >= 0");
    sum += p;
  }
  // Products of rows validated to 1e-12 accumulate a little slack.
  if (std::abs(sum - 1.0) > 1e-9) throw std::domain_error("joint pmf sums to " + std::to_string(sum) + ", not 1");
}

JointPmf JointPmf::product(const std::vector<Factor>& factors) {
  std::vector<Variable> vars;
  for (const auto& f : factors) {
    for (const auto& v : f.vars) {
      auto it = std::find_if(vars.begin(), vars.end(), [&](const Variable& w) { return w.label == v.label; });
      if (it == vars.end()) {
        vars.push_back(v);
      } else if (it->size != v.size) {
        throw std::domain_error("alphabet mismatch for " + v.label + ": " + std::to_string(it->size) + " vs " +
                                std::to_string(v.size));
      }
    }
  }
  const std::size_t n = product_size(vars);

  // Stride of each joint variable inside each factor's table.
  std::vector<std::vector<std::size_t>> strides(factors.size(), std::vector<std::size_t>(vars.size(), 0));
  for (std::size_t f = 0; f < factors.size(); ++f) {
    if (factors[f].table.size() != product_size(factors[f].vars)) {
      throw std::domain_error("factor table size does not match its variables");
    }
    std::size_t stride = 1;
    for (std::size_t j = factors[f].vars.size(); j-- > 0;) {
      const auto& label = factors[f].vars[j].label;
      const auto pos = std::find_if(vars.begin(), vars.end(), [&](const Variable& w) { return w.label == label; }) - vars.begin();
      strides[f][static_cast<std::size_t>(pos)] = stride;
      stride *= static_cast<std::size_t>(factors[f].vars[j].size);
    }
  }

  std::vector<double> table(n, 1.0);
  std::vector<int> idx(vars.size(), 0);
  std::vector<std::size_t> offset(factors.size(), 0);
  for (std::size_t e = 0; e < n; ++e) {
    double p = 1.0;
    for (std::size_t f = 0; f < factors.size() && p != 0.0; ++f) p *= factors[f].table[offset[f]];
    table[e] = p;
    // Advance the odometer and the per-factor offsets together.
    for (std::size_t j = vars.size(); j-- > 0;) {
      for (std::size_t f = 0; f < factors.size(); ++f) offset[f] += strides[f][j];
      if (++idx[j] < vars[j].size) break;
      for (std::size_t f = 0; f < factors.size(); ++f) offset[f] -= strides[f][j] * static_cast<std::size_t>(vars[j].size);
      idx[j] = 0;
    }
  }
  return {std::move(vars), std::move(table)};
}

int JointPmf::position(const std::string& label) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].label == label) return static_cast<int>(i);
  }
  throw std::domain_error("variable " + label + " is not part of the joint pmf");
}

bool JointPmf::has(const std::string& label) const {
  return std::any_of(vars_.begin(), vars_.end(), [&](const Variable& v) { return v.label == label; });
}

JointPmf JointPmf::marginal(const std::vector<std::string>& keep) const {
  std::vector<Variable> out_vars;
  std::vector<int> pos;
  for (const auto& label : keep) {
    pos.push_back(position(label));
    out_vars.push_back(vars_[static_cast<std::size_t>(pos.back())]);
  }
  std::vector<std::size_t> out_stride(vars_.size(), 0);
  std::size_t stride = 1;
  for (std::size_t j = keep.size(); j-- > 0;) {
    out_stride[static_cast<std::size_t>(pos[j])] = stride;
    stride *= static_cast<std::size_t>(out_vars[j].size);
  }
  std::vector<double> out(stride, 0.0);
  std::vector<int> idx(vars_.size(), 0);
  std::size_t target = 0;
  for (double p : table_) {
    out[target] += p;
    for (std::size_t j = vars_.size(); j-- > 0;) {
      target += out_stride[j];
      if (++idx[j] < vars_[j].size) break;
      target -= out_stride[j] * static_cast<std::size_t>(vars_[j].size);
      idx[j] = 0;
    }
  }
  return {std::move(out_vars), std::move(out)};
}

double JointPmf::entropy() const {
  double h = 0.0;
  for (double p : table_) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double mutual_information(const JointPmf& p, const std::vector<std::string>& group_a,
                          const std::vector<std::string>& group_b, const std::vector<std::string>& given) {
  std::set<std::string> seen;
  for (const auto* g : {&group_a, &group_b, &given}) {
    for (const auto& label : *g) {
      if (!seen.insert(label).second) throw std::domain_error("variable " + label + " appears in more than one group");
      p.position(label);
    }
  }
  if (group_a.empty() || group_b.empty()) throw std::domain_error("mutual information needs two nonempty groups");
  auto cat = [](std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  const double h_ac = p.marginal(cat(group_a, given)).entropy();
  const double h_bc = p.marginal(cat(group_b, given)).entropy();
  const double h_abc = p.marginal(cat(cat(group_a, group_b), given)).entropy();
  const double h_c = given.empty() ? 0.0 : p.marginal(given).entropy();
  // Entropy differences can round a few ulps below zero.
  return std::max(0.0, h_ac + h_bc - h_abc - h_c);
}

// ---------------------------------------------------------------------------
// Network terms

std::string x_label(int path, int k) { return "X" + std::to_string(path + 1) + "," + std::to_string(k); }
std::string u_label(int path, int k) { return "U" + std::to_string(path + 1) + "," + std::to_string(k); }
std::string y_label(int path, int k) { return "Y" + std::to_string(path + 1) + "," + std::to_string(k); }
std::string yhat_label(int path, int k) { return "Yhat" + std::to_string(path + 1) + "," + std::to_string(k); }

std::string to_string(DmTermKind kind) {
  switch (kind) {
    case DmTermKind::Link: return "link";
    case DmTermKind::Private: return "private";
    case DmTermKind::Common: return "common";
    case DmTermKind::JointCommon: return "joint_common";
    case DmTermKind::WynerZiv: return "wyner_ziv";
  }
  return "?";
}

bool DmModes::is_qmf(int path, int k) const {
  const auto& v = qmf[static_cast<std::size_t>(path)];
  return std::find(v.begin(), v.end(), k) != v.end();
}

const DmConstraint* DmConstraintSet::find(DmTermKind kind, int path, int k) const {
  for (const auto& t : terms) {
    if (t.kind == kind && t.path == path && t.k == k) return &t;
  }
  return nullptr;
}

double DmConstraintSet::value(DmTermKind kind, int path, int k) const {
  const auto* t = find(kind, path, k);
  if (!t) throw std::out_of_range("no " + to_string(kind) + " term for path " + std::to_string(path + 1) + " stage " + std::to_string(k));
  return t->value;
}

namespace {

int alpha_size(const std::vector<std::vector<std::string>>& a, int k) {
  return static_cast<int>(a[static_cast<std::size_t>(k)].size());
}

void require_valid(const DmNetworkSpec& spec) {
  const auto violations = validate_dm_spec(spec);
  if (!violations.empty()) {
    std::string msg = "invalid network spec:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw std::invalid_argument(msg);
  }
}

}  // namespace

DmNetwork::DmNetwork(const DmNetworkSpec& spec, DmModes modes) : spec_(spec), modes_(std::move(modes)) {
  require_valid(spec_);
  for (auto& v : modes_.qmf) {
    std::sort(v.begin(), v.end());
    segment(spec_.num_stages, v);  // range and duplicate check
  }
}

bool DmNetwork::has_split(int path, int k) const { return k >= 1 && !modes_.is_qmf(1 - path, k); }

Factor DmNetwork::node_factor_x(int path, int k) const {
  const auto& n = spec_.inputs[static_cast<std::size_t>(path)][static_cast<std::size_t>(k)];
  return {{{x_label(path, k), alpha_size(spec_.x_alphabets, k)}}, n.x_marginal()};
}

std::vector<Factor> DmNetwork::node_factors(int path, int k) const {
  if (!has_split(path, k)) return {node_factor_x(path, k)};
  const auto& n = spec_.inputs[static_cast<std::size_t>(path)][static_cast<std::size_t>(k)];
  const Variable u{u_label(path, k), alpha_size(spec_.u_alphabets, k)};
  const Variable x{x_label(path, k), alpha_size(spec_.x_alphabets, k)};
  return {Factor{{u}, n.p_u}, Factor{{u, x}, n.x_given_u.table}};
}

Factor DmNetwork::channel_factor(int path, int k) const {
  const int K = spec_.num_stages;
  const auto& c = spec_.channels[static_cast<std::size_t>(k)];
  if (k == K + 1) {
    return {{{x_label(path, K), alpha_size(spec_.x_alphabets, K)}, {y_label(path, K + 1), alpha_size(spec_.y_alphabets, K + 1)}},
            c.table};
  }
  return {{{x_label(path, k - 1), alpha_size(spec_.x_alphabets, k - 1)},
           {x_label(1 - path, k), alpha_size(spec_.x_alphabets, k)},
           {y_label(path, k), alpha_size(spec_.y_alphabets, k)}},
          c.table};
}

Factor DmNetwork::quantizer_factor(int path, int k, double knob) const {
  const auto& q = spec_.quantizers[static_cast<std::size_t>(k)];
  return {{{y_label(path, k), alpha_size(spec_.y_alphabets, k)}, {yhat_label(path, k), q.output_size()}}, q.at(knob).table};
}

double DmNetwork::knob(const DmDistortions& d, int path, int k) const {
  const auto& m = d[static_cast<std::size_t>(path)];
  const auto it = m.find(k);
  if (it == m.end()) {
    throw std::invalid_argument("missing quantizer knob for QMF relay " + std::to_string(path + 1) + "," + std::to_string(k));
  }
  return it->second;
}

std::vector<Factor> DmNetwork::link_factors(int path, int k, const DmDistortions& d) const {
  const int K = spec_.num_stages;
  std::vector<Factor> fs = node_factors(path, k);
  if (k == K) {
    fs.push_back(channel_factor(path, K + 1));
    return fs;
  }
  for (auto& f : node_factors(1 - path, k + 1)) fs.push_back(std::move(f));
  fs.push_back(channel_factor(path, k + 1));
  if (modes_.is_qmf(path, k + 1)) fs.push_back(quantizer_factor(path, k + 1, knob(d, path, k + 1)));
  return fs;
}

double DmNetwork::link(int path, int k, const DmDistortions& d) const {
  const int K = spec_.num_stages;
  const auto joint = JointPmf::product(link_factors(path, k, d));
  if (k == K) return mutual_information(joint, {x_label(path, K)}, {y_label(path, K + 1)});
  if (modes_.is_qmf(path, k + 1)) {
    return mutual_information(joint, {x_label(path, k)}, {yhat_label(path, k + 1)}, {x_label(1 - path, k + 1)});
  }
  // A DF receiver knows the interferer's common message.
  return mutual_information(joint, {x_label(path, k)}, {y_label(path, k + 1)}, {u_label(1 - path, k + 1)});
}

double DmNetwork::private_part(int path, int k, const DmDistortions& d) const {
  if (!has_split(path, k)) return link(path, k, d);
  const int K = spec_.num_stages;
  const auto joint = JointPmf::product(link_factors(path, k, d));
  const auto u = u_label(path, k);
  if (k == K) return mutual_information(joint, {x_label(path, K)}, {y_label(path, K + 1)}, {u});
  if (modes_.is_qmf(path, k + 1)) {
    return mutual_information(joint, {x_label(path, k)}, {yhat_label(path, k + 1)}, {x_label(1 - path, k + 1), u});
  }
  return mutual_information(joint, {x_label(path, k)}, {y_label(path, k + 1)}, {u_label(1 - path, k + 1), u});
}

double DmNetwork::common(int path, int k) const {
  if (!has_split(path, k)) throw std::invalid_argument("relay has no common message");
  const int other = 1 - path;
  std::vector<Factor> fs{node_factor_x(other, k - 1)};
  for (auto& f : node_factors(path, k)) fs.push_back(std::move(f));
  fs.push_back(channel_factor(other, k));
  return mutual_information(JointPmf::product(fs), {u_label(path, k)}, {y_label(other, k)});
}

double DmNetwork::joint_common(int path, int k) const {
  if (!has_split(path, k)) throw std::invalid_argument("relay has no common message");
  const int other = 1 - path;
  std::vector<Factor> fs{node_factor_x(other, k - 1)};
  for (auto& f : node_factors(path, k)) fs.push_back(std::move(f));
  fs.push_back(channel_factor(other, k));
  return mutual_information(JointPmf::product(fs), {u_label(path, k), x_label(other, k - 1)}, {y_label(other, k)});
}

double DmNetwork::wyner_ziv(int path, int k, double knob_value) const {
  if (!modes_.is_qmf(path, k)) throw std::invalid_argument("Wyner-Ziv term requested for a DF relay");
  std::vector<Factor> fs{node_factor_x(path, k - 1), node_factor_x(1 - path, k), channel_factor(path, k),
                         quantizer_factor(path, k, knob_value)};
  return mutual_information(JointPmf::product(fs), {yhat_label(path, k)}, {y_label(path, k)}, {x_label(1 - path, k)});
}

DmConstraintSet assemble_constraints(const DmNetworkSpec& spec, const DmModes& modes, const DmDistortions& distortions) {
  const DmNetwork net(spec, modes);
  const int K = spec.num_stages;
  DmConstraintSet out;
  for (int path = 0; path < 2; ++path) {
    for (int k = 0; k <= K; ++k) out.terms.push_back({DmTermKind::Link, path, k, net.link(path, k, distortions)});
    for (int k = 1; k <= K; ++k) {
      if (!net.has_split(path, k)) continue;
      out.terms.push_back({DmTermKind::Private, path, k, net.private_part(path, k, distortions)});
      out.terms.push_back({DmTermKind::Common, path, k, net.common(path, k)});
      if (!net.modes().is_qmf(path, k)) out.terms.push_back({DmTermKind::JointCommon, path, k, net.joint_common(path, k)});
    }
    for (int k : net.modes().qmf[static_cast<std::size_t>(path)]) {
      const auto& m = distortions[static_cast<std::size_t>(path)];
      const auto it = m.find(k);
      if (it == m.end()) throw std::invalid_argument("missing quantizer knob for QMF relay " + std::to_string(path + 1) + "," + std::to_string(k));
      out.terms.push_back({DmTermKind::WynerZiv, path, k, net.wyner_ziv(path, k, it->second)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Symmetric solver

namespace {

constexpr double kResidualTolerance = 1e-9;
constexpr int kMonotoneSamples = 65;

void require_monotone(const DmNetwork& net, int path, int k) {
  double prev = net.wyner_ziv(path, k, 0.0);
  for (int s = 1; s < kMonotoneSamples; ++s) {
    const double d = static_cast<double>(s) / (kMonotoneSamples - 1);
    const double v = net.wyner_ziv(path, k, d);
    if (v > prev + 1e-12) {
      std::ostringstream os;
      os.precision(12);
      os << "quantizer family '" << net.spec().quantizers[static_cast<std::size_t>(k)].name << "' at relay " << path + 1 << ","
         << k << " is not monotone: I(Yhat;Y|X) rises from " << prev << " to " << v << " near d = " << d;
      throw NonMonotoneQuantizer(os.str());
    }
    prev = v;
  }
}

// Smallest knob whose Wyner-Ziv rate does not exceed `target`.
double solve_knob(const DmNetwork& net, int path, int k, double target) {
  double lo = 0.0, hi = 1.0;
  if (net.wyner_ziv(path, k, 0.0) <= target) return 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = net.wyner_ziv(path, k, mid);
    if (std::abs(v - target) < 1e-13) return mid;
    (v > target ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

DmRateResult solve_symmetric(const DmNetworkSpec& spec, const DmModes& modes, Decoder decoder) {
  DmModes sorted = modes;
  for (auto& v : sorted.qmf) std::sort(v.begin(), v.end());
  if (sorted.qmf[0] != sorted.qmf[1]) {
    throw std::domain_error("the symmetric solver needs the same QMF set on both paths");
  }
  const DmNetwork net(spec, sorted);
  const int K = spec.num_stages;
  const Segmentation seg = segment(K, sorted.qmf[0]);
  for (int path = 0; path < 2; ++path) {
    for (int k : sorted.qmf[0]) require_monotone(net, path, k);
  }

  DmRateResult out;
  for (int path = 0; path < 2; ++path) {
    for (int k : sorted.qmf[0]) out.distortions[static_cast<std::size_t>(path)][k] = 0.0;
    out.relay_rates[static_cast<std::size_t>(path)].assign(static_cast<std::size_t>(K) + 1, 0.0);
  }

  std::vector<double> segment_rate(static_cast<std::size_t>(seg.num_segments()), 0.0);
  bool dead = false;
  for (int ell = seg.num_segments() - 1; ell >= 0; --ell) {
    const int head = seg.head(ell);
    DmBinding b{DmTermKind::Link, 0, head, 0.0, false};
    if (!dead) {
      b.value = std::numeric_limits<double>::infinity();
      auto consider = [&](DmTermKind kind, int path, int k, double v, bool halved) {
        if (v < b.value) b = {kind, path, k, v, halved};
      };
      for (int k = head; k < seg.end(ell); ++k) {
        for (int path = 0; path < 2; ++path) consider(DmTermKind::Link, path, k, net.link(path, k, out.distortions), false);
        if (k == 0) continue;
        const bool df_pair = !net.modes().is_qmf(0, k) && !net.modes().is_qmf(1, k);
        if (decoder == Decoder::JD && df_pair) {
          // r_{1,g(k)} + r_{2,g(k)} <= min(...) with equal rates on both paths.
          const double a0 = net.joint_common(0, k) + net.private_part(0, k, out.distortions);
          const double a1 = net.joint_common(1, k) + net.private_part(1, k, out.distortions);
          consider(DmTermKind::JointCommon, a1 < a0 ? 1 : 0, k, 0.5 * std::min(a0, a1), true);
          continue;
        }
        for (int path = 0; path < 2; ++path) {
          if (!net.has_split(path, k)) continue;
          consider(DmTermKind::Common, path, k, net.common(path, k) + net.private_part(path, k, out.distortions), false);
        }
      }
    }
    out.binding[head] = b;
    double forwarded = b.value;
    if (ell > 0 && !dead) {
      if (forwarded <= 0.0) {
        dead = true;
        forwarded = 0.0;
        out.infeasible = true;
      } else {
        // The finest quantizer bounds the index rate a relay can produce.
        for (int path = 0; path < 2; ++path) {
          const double lossless = net.wyner_ziv(path, head, 0.0);
          if (forwarded > lossless + kResidualTolerance) {
            out.infeasible = true;
            out.infeasible_brackets[head] = {net.wyner_ziv(path, head, 1.0), lossless};
            forwarded = lossless;
          }
        }
        for (int path = 0; path < 2; ++path) {
          const double coarsest = net.wyner_ziv(path, head, 1.0);
          if (forwarded < coarsest - kResidualTolerance) {
            out.infeasible = true;
            out.infeasible_brackets[head] = {coarsest, net.wyner_ziv(path, head, 0.0)};
          }
          const double d = solve_knob(net, path, head, forwarded);
          out.distortions[static_cast<std::size_t>(path)][head] = d;
        }
      }
    }
    segment_rate[static_cast<std::size_t>(ell)] = dead ? 0.0 : forwarded;
  }

  out.rate = segment_rate[0];
  for (int path = 0; path < 2; ++path) {
    for (int k = 0; k <= K; ++k) {
      out.relay_rates[static_cast<std::size_t>(path)][static_cast<std::size_t>(k)] =
          segment_rate[static_cast<std::size_t>(seg.segment_of(k))];
    }
    for (int k : sorted.qmf[0]) {
      const double d = out.distortions[static_cast<std::size_t>(path)][k];
      out.wz_residual[static_cast<std::size_t>(path)][k] =
          net.wyner_ziv(path, k, d) - segment_rate[static_cast<std::size_t>(seg.segment_of(k))];
    }
  }
  out.constraints = assemble_constraints(spec, sorted, out.distortions);
  return out;
}

}  // namespace vfd
