#include "vfd/config_optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "vfd/info_core.hpp"

namespace vfd {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

struct SubsetSearch {
  const ChannelInstance& inst;
  const SearchSpec& spec;
  ModeConfig cfg;
  Segmentation seg;
  long long evaluations = 0;

  SubsetSearch(const ChannelInstance& i, const SearchSpec& s, std::vector<int> qmf_set)
      : inst(i), spec(s), seg(segment(i.num_stages(), qmf_set)) {
    cfg.qmf_set = std::move(qmf_set);
    cfg.decoder = spec.decoder;
    cfg.variant = spec.variant;
    cfg.theta.assign(static_cast<std::size_t>(i.num_stages()), 0.0);
    for (int k : cfg.qmf_set) cfg.theta[static_cast<std::size_t>(k - 1)] = 1.0;
  }

  double& theta(int k) { return cfg.theta[static_cast<std::size_t>(k - 1)]; }

  double segment_value(int ell, double noise_next) {
    ++evaluations;
    return segment_rate(inst, cfg, seg, ell, noise_next).value;
  }

  // Free splits of segment ell are its DF stages (every member but the head).
  std::vector<int> free_stages(int ell) const {
    std::vector<int> out;
    for (int k = std::max(1, seg.head(ell) + 1); k < seg.end(ell); ++k) out.push_back(k);
    return out;
  }

  double grid_block(int ell, double noise_next, const std::vector<int>& dims) {
    const int p = spec.grid.points_per_dim;
    std::vector<int> idx(dims.size(), 0);
    std::vector<double> best_theta(dims.size(), 0.0);
    double best = -std::numeric_limits<double>::infinity();
    while (true) {
      for (std::size_t j = 0; j < dims.size(); ++j) theta(dims[j]) = static_cast<double>(idx[j]) / (p - 1);
      const double v = segment_value(ell, noise_next);
      if (v > best + SearchSpec::kTieTolerance) {
        best = v;
        for (std::size_t j = 0; j < dims.size(); ++j) best_theta[j] = theta(dims[j]);
      }
      // Odometer with the last free stage fastest: lexicographic order.
      std::size_t j = dims.size();
      while (j > 0 && ++idx[j - 1] == p) idx[--j] = 0;
      if (j == 0) break;
    }
    for (std::size_t j = 0; j < dims.size(); ++j) theta(dims[j]) = best_theta[j];
    return best;
  }

  // Maximizes over theta_k in [0, 1] with the other splits held fixed.
  double line_search(int ell, double noise_next, int k, double current_value) {
    const double start = theta(k);
    auto f = [&](double t) {
      theta(k) = t;
      return segment_value(ell, noise_next);
    };
    double a = 0.0, b = 1.0;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > SearchSpec::kThetaResolution) {
      // Ties move toward smaller theta.
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kInvPhi * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kInvPhi * (b - a);
        fd = f(d);
      }
    }
    double best_t = start;
    double best_v = current_value;
    for (double t : {0.0, fc >= fd ? c : d, 1.0}) {
      const double v = f(t);
      if (v > best_v + SearchSpec::kTieTolerance) {
        best_v = v;
        best_t = t;
      }
    }
    theta(k) = best_t;
    return best_v;
  }

  double coordinate_block(int ell, double noise_next, const std::vector<int>& dims, std::uint64_t salt) {
    const auto& cs = spec.coordinate;
    std::vector<std::vector<double>> starts;
    for (double v : {0.0, 0.5, 1.0}) starts.emplace_back(dims.size(), v);
    for (int r = 0; r < cs.restarts; ++r) {
      std::vector<double> s(dims.size());
      for (std::size_t j = 0; j < dims.size(); ++j) s[j] = counter_uniform(salt, static_cast<std::uint64_t>(r), j);
      starts.push_back(std::move(s));
    }

    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> best_theta(dims.size(), 0.0);
    for (const auto& s : starts) {
      for (std::size_t j = 0; j < dims.size(); ++j) theta(dims[j]) = s[j];
      double value = segment_value(ell, noise_next);
      for (int sweep = 0; sweep < cs.sweeps; ++sweep) {
        const double before = value;
        for (int k : dims) value = line_search(ell, noise_next, k, value);
        if (value - before <= cs.tol) break;
      }
      std::vector<double> here(dims.size());
      for (std::size_t j = 0; j < dims.size(); ++j) here[j] = theta(dims[j]);
      if (value > best + SearchSpec::kTieTolerance ||
          (value >= best - SearchSpec::kTieTolerance && here < best_theta)) {
        best = std::max(best, value);
        best_theta = here;
      }
    }
    for (std::size_t j = 0; j < dims.size(); ++j) theta(dims[j]) = best_theta[j];
    return segment_value(ell, noise_next);
  }

  SubsetResult run() {
    const int K = inst.num_stages();
    const int free_dims = K - static_cast<int>(cfg.qmf_set.size());
    if (spec.use_grid && std::pow(static_cast<double>(spec.grid.points_per_dim), free_dims) > SearchSpec::kMaxGridPoints) {
      throw GridTooLarge("GRID search with " + std::to_string(spec.grid.points_per_dim) + " points over " +
                         std::to_string(free_dims) + " free splits exceeds the 1e7 evaluation cap");
    }
    std::uint64_t salt = 0x5eed;
    for (int k : cfg.qmf_set) salt |= std::uint64_t{1} << (k + 16);

    double noise_next = 0.0;
    for (int ell = seg.num_segments() - 1; ell >= 0; --ell) {
      const auto dims = free_stages(ell);
      double rate;
      if (dims.empty()) {
        rate = segment_value(ell, noise_next);
      } else if (spec.use_grid) {
        rate = grid_block(ell, noise_next, dims);
      } else {
        rate = coordinate_block(ell, noise_next, dims, salt + static_cast<std::uint64_t>(ell));
      }
      if (ell == 0) break;
      if (rate <= 0.0) break;  // upstream is dead; remaining splits stay at 0
      noise_next = wyner_ziv_noise(inst.snr(seg.head(ell)), rate);
    }
    return {cfg.qmf_set, evaluate(inst, cfg).symmetric_rate, cfg.theta};
  }
};

void validate_spec(const SearchSpec& spec) {
  if (spec.use_grid && spec.grid.points_per_dim < 2) throw std::invalid_argument("GRID needs points_per_dim >= 2");
  if (!spec.use_grid && (spec.coordinate.restarts < 0 || spec.coordinate.sweeps < 1 || !(spec.coordinate.tol >= 0.0))) {
    throw std::invalid_argument("COORDINATE needs restarts >= 0, sweeps >= 1 and tol >= 0");
  }
}

struct SearchOutcome {
  std::vector<SubsetResult> results;
  long long evaluations = 0;
};

SearchOutcome search_all(const ChannelInstance& inst, const SearchSpec& spec) {
  validate_spec(spec);
  std::vector<std::vector<int>> candidates;
  if (spec.given_qmf_set) {
    std::vector<int> v = *spec.given_qmf_set;
    std::sort(v.begin(), v.end());
    segment(inst.num_stages(), v);  // range check
    candidates.push_back(std::move(v));
  } else {
    candidates = enumerate_qmf_sets(inst.num_stages());
  }

  SearchOutcome out;
  out.results.resize(candidates.size());
  std::vector<long long> evals(candidates.size(), 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < candidates.size() && !failed; i = next++) {
      try {
        SubsetSearch s(inst, spec, candidates[i]);
        out.results[i] = s.run();
        evals[i] = s.evaluations;
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const int n = std::clamp(spec.workers, 1, static_cast<int>(candidates.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  out.evaluations = std::accumulate(evals.begin(), evals.end(), 0LL);
  return out;
}

}  // namespace

std::vector<std::vector<int>> enumerate_qmf_sets(int num_stages) {
  if (num_stages < 1 || num_stages > 30) throw std::invalid_argument("exhaustive search supports 1 <= K <= 30");
  std::vector<std::vector<int>> sets;
  for (std::uint32_t mask = 0; mask < (1u << num_stages); ++mask) {
    std::vector<int> v;
    for (int k = 1; k <= num_stages; ++k) {
      if (mask & (1u << (k - 1))) v.push_back(k);
    }
    sets.push_back(std::move(v));
  }
  std::sort(sets.begin(), sets.end());
  return sets;
}

std::vector<SubsetResult> best_per_subset(const ChannelInstance& inst, const SearchSpec& spec) {
  return search_all(inst, spec).results;
}

Optimum optimize(const ChannelInstance& inst, const SearchSpec& spec) {
  auto outcome = search_all(inst, spec);
  // Fixed-order reduction: candidates are in lexicographic order, so keeping
  // the first result on ties yields the smallest QMF set.
  std::size_t best = 0;
  for (std::size_t i = 1; i < outcome.results.size(); ++i) {
    if (outcome.results[i].rate > outcome.results[best].rate + SearchSpec::kTieTolerance) best = i;
  }
  Optimum opt;
  const auto& b = outcome.results[best];
  opt.best_config.qmf_set = b.qmf_set;
  opt.best_config.theta = b.theta;
  opt.best_config.decoder = spec.decoder;
  opt.best_config.variant = spec.variant;
  opt.best_breakdown = evaluate(inst, opt.best_config);
  opt.configs_evaluated = outcome.evaluations;
  opt.per_config_rates = std::move(outcome.results);
  return opt;
}

}  // namespace vfd
