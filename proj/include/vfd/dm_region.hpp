#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vfd/channel_model.hpp"
#include "vfd/mixed_rate.hpp"

namespace vfd {

struct Variable {
  std::string label;
  int size = 0;
};

/// Nonnegative table over the product alphabet of `vars`, row-major with the
/// first variable slowest. Factors need not be normalized.
struct Factor {
  std::vector<Variable> vars;
  std::vector<double> table;
};

/// Dense joint pmf over labeled finite variables.
class JointPmf {
public:
  static constexpr std::size_t kMaxEntries = 1'000'000;

  JointPmf(std::vector<Variable> vars, std::vector<double> table);

  /// Multiplies factors over the union of their variables (in order of
  /// first appearance). Refuses products above kMaxEntries.
  static JointPmf product(const std::vector<Factor>& factors);

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<double>& table() const { return table_; }
  int position(const std::string& label) const;
  bool has(const std::string& label) const;

  /// Marginal over `keep`, in the order given.
  JointPmf marginal(const std::vector<std::string>& keep) const;
  /// Shannon entropy in bits.
  double entropy() const;

private:
  std::vector<Variable> vars_;
  std::vector<double> table_;
};

/// I(A; B | C) in bits. Groups must be disjoint and present in p.
double mutual_information(const JointPmf& p, const std::vector<std::string>& group_a,
                          const std::vector<std::string>& group_b, const std::vector<std::string>& given = {});

/// QMF stage sets of the two paths (paths are indexed 0 and 1).
struct DmModes {
  std::array<std::vector<int>, 2> qmf;
  bool is_qmf(int path, int k) const;
};

/// Quantizer knob per QMF node, keyed by stage.
using DmDistortions = std::array<std::map<int, double>, 2>;

enum class DmTermKind {
  Link,         // I_{i,k}
  Private,      // I_{i,k1}
  Common,       // I(U_{i,k}; Y_{i',k})
  JointCommon,  // I(U_{i,k}, X_{i',k-1}; Y_{i',k})
  WynerZiv,     // I(Yhat_{i,k}; Y_{i,k} | X_{i',k})
};

std::string to_string(DmTermKind kind);

struct DmConstraint {
  DmTermKind kind;
  int path;
  int k;
  double value;
};

struct DmConstraintSet {
  std::vector<DmConstraint> terms;
  const DmConstraint* find(DmTermKind kind, int path, int k) const;
  double value(DmTermKind kind, int path, int k) const;
};

/// Raised when a quantizer family's Wyner-Ziv term grows with its knob.
class NonMonotoneQuantizer : public std::domain_error {
public:
  explicit NonMonotoneQuantizer(const std::string& what) : std::domain_error(what) {}
};

/// Builds the joint law behind one constraint and evaluates every
/// information term the SD and JD regions use for the given modes.
class DmNetwork {
public:
  DmNetwork(const DmNetworkSpec& spec, DmModes modes);

  const DmNetworkSpec& spec() const { return spec_; }
  const DmModes& modes() const { return modes_; }

  /// Relay (path, k) splits its message iff the same-stage relay of the
  /// other path decodes (is DF).
  bool has_split(int path, int k) const;

  double link(int path, int k, const DmDistortions& d) const;
  double private_part(int path, int k, const DmDistortions& d) const;
  double common(int path, int k) const;
  double joint_common(int path, int k) const;
  double wyner_ziv(int path, int k, double knob) const;

private:
  Factor node_factor_x(int path, int k) const;
  std::vector<Factor> node_factors(int path, int k) const;
  Factor channel_factor(int path, int k) const;
  Factor quantizer_factor(int path, int k, double knob) const;
  std::vector<Factor> link_factors(int path, int k, const DmDistortions& d) const;
  double knob(const DmDistortions& d, int path, int k) const;

  DmNetworkSpec spec_;
  DmModes modes_;
};

std::string x_label(int path, int k);
std::string u_label(int path, int k);
std::string y_label(int path, int k);
std::string yhat_label(int path, int k);

/// Every information term of the SD and JD regions for fixed modes and
/// quantizer knobs.
DmConstraintSet assemble_constraints(const DmNetworkSpec& spec, const DmModes& modes, const DmDistortions& distortions);

struct DmBinding {
  DmTermKind kind = DmTermKind::Link;
  int path = 0;
  int k = 0;
  double value = 0.0;
  bool halved = false;  // JD sum constraint split evenly between the paths
};

struct DmRateResult {
  double rate = 0.0;                          // r_1 = r_2
  std::array<std::vector<double>, 2> relay_rates;  // r_{i,k}, k = 0..K
  DmDistortions distortions;
  DmDistortions wz_residual;
  std::map<int, DmBinding> binding;  // keyed by segment head
  DmConstraintSet constraints;
  bool infeasible = false;
  /// For each stage whose equality could not be met: the range of Wyner-Ziv
  /// rates the family can produce, [I at d=1, I at d=0].
  std::map<int, std::pair<double, double>> infeasible_brackets;
};

/// Maximal symmetric rate with the Wyner-Ziv equality solved by bisection
/// on each quantizer knob, backward over segments. Requires equal modes on
/// both paths.
DmRateResult solve_symmetric(const DmNetworkSpec& spec, const DmModes& modes, Decoder decoder);

}  // namespace vfd
