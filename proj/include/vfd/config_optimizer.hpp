#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vfd/channel_model.hpp"
#include "vfd/mixed_rate.hpp"

namespace vfd {

/// Thrown when a GRID search would exceed the evaluation budget.
class GridTooLarge : public std::length_error {
public:
  explicit GridTooLarge(const std::string& what) : std::length_error(what) {}
};

struct GridSearch {
  int points_per_dim = 101;
};

struct CoordinateSearch {
  int restarts = 8;
  int sweeps = 50;
  double tol = 1e-9;
};

struct SearchSpec {
  /// Empty means all 2^K subsets; otherwise only the given QMF set.
  std::optional<std::vector<int>> given_qmf_set;
  bool use_grid = false;
  GridSearch grid;
  CoordinateSearch coordinate;
  Decoder decoder = Decoder::SD;
  FormulaVariant variant = FormulaVariant::AsPrinted;
  /// Worker threads for the subset loop; results do not depend on it.
  int workers = 1;

  static constexpr double kMaxGridPoints = 1e7;
  static constexpr double kThetaResolution = 1e-9;
  static constexpr double kTieTolerance = 1e-12;
};

struct SubsetResult {
  std::vector<int> qmf_set;
  double rate = 0.0;
  std::vector<double> theta;
};

struct Optimum {
  ModeConfig best_config;
  RateBreakdown best_breakdown;
  long long configs_evaluated = 0;
  std::vector<SubsetResult> per_config_rates;  // lexicographic order of qmf_set
};

/// Maximizes the symmetric rate over QMF sets and free power splits.
Optimum optimize(const ChannelInstance& inst, const SearchSpec& spec);

/// Best rate of every candidate QMF set, in lexicographic order.
std::vector<SubsetResult> best_per_subset(const ChannelInstance& inst, const SearchSpec& spec);

/// All subsets of 1..K sorted lexicographically (empty set first).
std::vector<std::vector<int>> enumerate_qmf_sets(int num_stages);

}  // namespace vfd
