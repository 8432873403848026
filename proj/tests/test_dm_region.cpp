#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "vfd/dm_region.hpp"
#include "vfd/json_io.hpp"

using namespace vfd;

// 1 - H2(0.11), 40-digit mpmath.
constexpr double kBsc011 = 0.500084041835472;

namespace {

double h2(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

JointPmf bsc_joint(double flip) {
  return JointPmf({{"X", 2}, {"Y", 2}}, {0.5 * (1 - flip), 0.5 * flip, 0.5 * flip, 0.5 * (1 - flip)});
}

// I(A;B|C) summed term by term over a 2x2x2 table indexed [a][b][c].
double naive_cmi(const std::vector<double>& p) {
  auto at = [&](int a, int b, int c) { return p[static_cast<std::size_t>(a * 4 + b * 2 + c)]; };
  double total = 0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        const double pabc = at(a, b, c);
        if (pabc == 0) continue;
        double pc = 0, pac = 0, pbc = 0;
        for (int x = 0; x < 2; ++x) {
          for (int y = 0; y < 2; ++y) pc += at(x, y, c);
          pac += at(a, x, c);
          pbc += at(x, b, c);
        }
        total += pabc * std::log2(pabc * pc / (pac * pbc));
      }
    }
  }
  return total;
}

std::vector<double> random_pmf(std::mt19937_64& rng, std::size_t n, bool sparse) {
  std::exponential_distribution<double> e(1.0);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> p(n);
  double s = 0;
  for (auto& x : p) {
    x = sparse && u(rng) < 0.25 ? 0.0 : e(rng);
    s += x;
  }
  if (s == 0) p[0] = s = 1;
  for (auto& x : p) x /= s;
  return p;
}

DmConstraintSet assemble(const DmNetworkSpec& spec, std::vector<int> v1, std::vector<int> v2, DmDistortions d = {}) {
  return assemble_constraints(spec, DmModes{{std::move(v1), std::move(v2)}}, d);
}

DmModes same(std::vector<int> v) { return DmModes{{v, v}}; }

// Every receiver ignores its interferer: stage k hears X_{k-1} through a BSC.
DmNetworkSpec bsc_chain(const std::vector<double>& flips) {
  auto s = fixtures::noiseless_binary(static_cast<int>(flips.size()) - 1);
  for (std::size_t k = 1; k <= flips.size(); ++k) {
    const double f = flips[k - 1];
    auto& c = s.channels[k];
    for (int r = 0; r < c.rows; ++r) {
      const int x_prev = k == flips.size() ? r : r / 2;
      c.table[static_cast<std::size_t>(r * 2 + x_prev)] = 1 - f;
      c.table[static_cast<std::size_t>(r * 2 + 1 - x_prev)] = f;
    }
  }
  return s;
}

// Single Gaussian hop of the given snr, input on n points with Gaussian
// weights at unit power, output binned into m cells.
CondPmf gaussian_hop(int n, int m, double snr, const std::vector<double>& points, int repeat) {
  const double sigma = 1.0 / std::sqrt(snr);
  const double span = 4.0 * std::sqrt(1.0 + sigma * sigma);
  CondPmf c{n * repeat, m, {}};
  for (int r = 0; r < n * repeat; ++r) {
    const double x = points[static_cast<std::size_t>(r / repeat)];
    auto cdf = [&](double y) { return 0.5 * std::erfc(-(y - x) / (sigma * std::sqrt(2.0))); };
    for (int j = 0; j < m; ++j) {
      const double lo = j == 0 ? -INFINITY : -span + 2 * span * j / m;
      const double hi = j == m - 1 ? INFINITY : -span + 2 * span * (j + 1) / m;
      c.table.push_back((std::isinf(hi) ? 1.0 : cdf(hi)) - (std::isinf(lo) ? 0.0 : cdf(lo)));
    }
  }
  return c;
}

DmNetworkSpec discretized_gaussian(int n, int m, double snr) {
  std::vector<double> pts(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  double sw = 0, power = 0;
  for (int i = 0; i < n; ++i) {
    pts[static_cast<std::size_t>(i)] = n == 1 ? 0 : -2.5 + 5.0 * i / (n - 1);
    w[static_cast<std::size_t>(i)] = std::exp(-0.5 * pts[static_cast<std::size_t>(i)] * pts[static_cast<std::size_t>(i)]);
    sw += w[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)] /= sw;
    power += w[static_cast<std::size_t>(i)] * pts[static_cast<std::size_t>(i)] * pts[static_cast<std::size_t>(i)];
  }
  for (auto& p : pts) p /= std::sqrt(power);

  DmNetworkSpec s;
  s.num_stages = 1;
  std::vector<std::string> xs, ys;
  for (int i = 0; i < n; ++i) xs.push_back(std::to_string(i));
  for (int j = 0; j < m; ++j) ys.push_back(std::to_string(j));
  s.x_alphabets = {xs, xs};
  s.u_alphabets = {{}, {"c"}};
  s.y_alphabets = {{}, ys, ys};
  s.channels = {CondPmf{}, gaussian_hop(n, m, snr, pts, n), gaussian_hop(n, m, snr, pts, 1)};
  s.quantizers = {QuantizerFamily{}, QuantizerFamily::erasure(m)};
  for (int path = 0; path < 2; ++path) s.inputs.push_back({{{}, {}, w}, {{1.0}, {1, n, w}, {}}});
  return s;
}

}  // namespace

TEST_CASE("mutual information examples") {
  CHECK(std::abs(mutual_information(bsc_joint(0.0), {"X"}, {"Y"}) - 1.0) < 1e-15);
  CHECK(mutual_information(bsc_joint(0.5), {"X"}, {"Y"}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(mutual_information(bsc_joint(0.11), {"X"}, {"Y"}) - kBsc011) < 1e-12);
  CHECK(std::abs(mutual_information(bsc_joint(0.11), {"X"}, {"Y"}) - (1 - h2(0.11))) < 1e-12);
}

TEST_CASE("mutual information matches a naive sum on random 2x2x2 tables") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 400; ++trial) {
    const auto p = random_pmf(rng, 8, trial % 3 == 0);
    const JointPmf joint({{"A", 2}, {"B", 2}, {"C", 2}}, p);
    const double got = mutual_information(joint, {"A"}, {"B"}, {"C"});
    REQUIRE(std::abs(got - naive_cmi(p)) < 1e-10);

    // Unconditional: collapse C into a constant.
    std::vector<double> ab(8, 0.0);
    for (int i = 0; i < 8; ++i) ab[static_cast<std::size_t>((i / 2) * 2)] += p[static_cast<std::size_t>(i)];
    REQUIRE(std::abs(mutual_information(joint, {"A"}, {"B"}) - naive_cmi(ab)) < 1e-10);

    const double iab = mutual_information(joint, {"A"}, {"B"});
    REQUIRE(iab >= 0);
    REQUIRE(std::abs(iab - mutual_information(joint, {"B"}, {"A"})) < 1e-14);
    REQUIRE(iab <= std::min(joint.marginal({"A"}).entropy(), joint.marginal({"B"}).entropy()) + 1e-12);
    // Chain rule: I(A;B,C) = I(A;C) + I(A;B|C).
    REQUIRE(std::abs(mutual_information(joint, {"A"}, {"B", "C"}) -
                     mutual_information(joint, {"A"}, {"C"}) - got) < 1e-12);
  }
}

TEST_CASE("mutual information rejects bad groups") {
  const JointPmf joint({{"A", 2}, {"B", 2}}, {0.25, 0.25, 0.25, 0.25});
  CHECK_THROWS_AS(mutual_information(joint, {"A"}, {"A"}), std::domain_error);
  CHECK_THROWS_AS(mutual_information(joint, {"A"}, {"B"}, {"A"}), std::domain_error);
  CHECK_THROWS_AS(mutual_information(joint, {"A"}, {"Z"}), std::domain_error);
  CHECK_THROWS(JointPmf({{"A", 2}}, {0.5, 0.4}));
  CHECK_THROWS(JointPmf({{"A", 2}}, {1.5, -0.5}));
}

TEST_CASE("product refuses oversized tables") {
  std::vector<Factor> fs;
  for (int i = 0; i < 3; ++i) fs.push_back({{{"V" + std::to_string(i), 101}}, std::vector<double>(101, 1.0 / 101)});
  CHECK_THROWS_AS(JointPmf::product(fs), std::length_error);
  fs.pop_back();
  CHECK(JointPmf::product(fs).table().size() == 101u * 101u);
}

TEST_CASE("noiseless binary network: every link carries 1 bit") {
  for (int K = 1; K <= 3; ++K) {
    const auto spec = fixtures::noiseless_binary(K);
    const auto c = assemble(spec, {}, {});
    for (int path = 0; path < 2; ++path) {
      for (int k = 0; k <= K; ++k) CHECK(std::abs(c.value(DmTermKind::Link, path, k) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("constraint count follows the stage pattern") {
  const auto spec = fixtures::binary_reference();
  const int K = spec.num_stages;
  for (unsigned m1 = 0; m1 < 4; ++m1) {
    for (unsigned m2 = 0; m2 < 4; ++m2) {
      std::array<std::vector<int>, 2> v;
      DmDistortions d;
      for (int k = 1; k <= K; ++k) {
        if (m1 & (1u << (k - 1))) v[0].push_back(k), d[0][k] = 0.5;
        if (m2 & (1u << (k - 1))) v[1].push_back(k), d[1][k] = 0.5;
      }
      const DmModes modes{v};
      std::size_t expected = 0;
      for (int path = 0; path < 2; ++path) {
        expected += static_cast<std::size_t>(K) + 1 + v[static_cast<std::size_t>(path)].size();
        for (int k = 1; k <= K; ++k) {
          if (modes.is_qmf(1 - path, k)) continue;
          expected += modes.is_qmf(path, k) ? 2 : 3;
        }
      }
      CHECK(assemble_constraints(spec, modes, d).terms.size() == expected);
    }
  }
}

TEST_CASE("binary reference constraints match the independent oracle") {
  const auto spec = fixtures::binary_reference();
  CHECK(validate_dm_spec(spec).empty());
  const auto oracle = fixtures::load_json("dm_binary_reference_oracle.json");
  int compared = 0;
  for (const auto& c : oracle.at("cases")) {
    DmModes modes;
    DmDistortions d;
    for (int path = 0; path < 2; ++path) {
      modes.qmf[static_cast<std::size_t>(path)] = c.at("modes")[static_cast<std::size_t>(path)].get<std::vector<int>>();
      for (const auto& [k, v] : c.at("distortions")[static_cast<std::size_t>(path)].items()) {
        d[static_cast<std::size_t>(path)][std::stoi(k)] = v.get<double>();
      }
    }
    const auto got = assemble_constraints(spec, modes, d);
    REQUIRE(got.terms.size() == c.at("terms").size());
    for (const auto& t : c.at("terms")) {
      const auto kind = t.at("kind").get<std::string>();
      const DmConstraint* match = nullptr;
      for (const auto& g : got.terms) {
        if (to_string(g.kind) == kind && g.path == t.at("path").get<int>() - 1 && g.k == t.at("k").get<int>()) match = &g;
      }
      REQUIRE_MESSAGE(match != nullptr, kind);
      CHECK(std::abs(match->value - t.at("value").get<double>()) < 1e-12);
      ++compared;
    }
  }
  CHECK(compared == 80);
}

TEST_CASE("noiseless K = 1 QMF relay forwards 1 bit") {
  const auto spec = fixtures::noiseless_binary(1);
  const auto r = solve_symmetric(spec, same({1}), Decoder::SD);
  CHECK(r.rate == 1.0);
  CHECK_FALSE(r.infeasible);
  CHECK(std::abs(r.wz_residual[0].at(1)) < 1e-9);

  // Exhaustive scan: the knob whose Wyner-Ziv rate is closest to the
  // downstream 1 bit, then the upstream link at that knob.
  const DmNetwork net(spec, same({1}));
  double best_gap = INFINITY, best_rate = 0;
  for (int i = 0; i < 10000; ++i) {
    const double d = i / 9999.0;
    const double gap = std::abs(net.wyner_ziv(0, 1, d) - 1.0);
    if (gap < best_gap) {
      best_gap = gap;
      best_rate = std::min(net.link(0, 0, {{{{1, d}}, {{1, d}}}}), 1.0);
    }
  }
  CHECK(best_gap < 1e-9);
  CHECK(std::abs(best_rate - r.rate) < 1e-9);
}

TEST_CASE("noisy QMF relay solves the Wyner-Ziv equality") {
  auto spec = bsc_chain({0.05, 0.2});
  const auto r = solve_symmetric(spec, same({1}), Decoder::SD);
  CHECK_FALSE(r.infeasible);
  CHECK(std::abs(r.relay_rates[0][1] - (1 - h2(0.2))) < 1e-12);
  for (int path = 0; path < 2; ++path) {
    CHECK(std::abs(r.wz_residual[static_cast<std::size_t>(path)].at(1)) < 1e-9);
    CHECK(r.distortions[static_cast<std::size_t>(path)].at(1) > 0.0);
  }
  CHECK(r.rate > 0.0);
  CHECK(r.rate < 1 - h2(0.05));
}

TEST_CASE("interference-free chain reduces to the weakest hop") {
  const auto spec = bsc_chain({0.11, 0.02, 0.2});
  for (auto dec : {Decoder::SD, Decoder::JD}) {
    const auto r = solve_symmetric(spec, same({}), dec);
    CHECK(std::abs(r.rate - (1 - h2(0.2))) < 1e-12);
  }
}

TEST_CASE("a constant channel output gives rate 0") {
  for (int dead = 1; dead <= 3; ++dead) {
    const auto spec = fixtures::constant_output(2, dead);
    for (const auto& v : {std::vector<int>{}, std::vector<int>{1}, std::vector<int>{2}, std::vector<int>{1, 2}}) {
      if (dead == 3) continue;  // channels[K+1] is the destination, exercised below
      const auto r = solve_symmetric(spec, same(v), Decoder::SD);
      CHECK(r.rate == 0.0);
    }
  }
  auto spec = fixtures::noiseless_binary(2);
  spec.channels[3].table = {1, 0, 1, 0};
  CHECK(solve_symmetric(spec, same({}), Decoder::JD).rate == 0.0);
  CHECK(solve_symmetric(spec, same({2}), Decoder::JD).rate == 0.0);
}

TEST_CASE("JD rate is at least the SD rate") {
  std::vector<DmNetworkSpec> specs{fixtures::noiseless_binary(1), fixtures::noiseless_binary(2),
                                   fixtures::binary_reference(), bsc_chain({0.1, 0.2, 0.05})};
  for (const auto& spec : specs) {
    const int K = spec.num_stages;
    for (unsigned m = 0; m < (1u << K); ++m) {
      std::vector<int> v;
      for (int k = 1; k <= K; ++k) {
        if (m & (1u << (k - 1))) v.push_back(k);
      }
      const double sd = solve_symmetric(spec, same(v), Decoder::SD).rate;
      const double jd = solve_symmetric(spec, same(v), Decoder::JD).rate;
      CHECK(jd >= sd - 1e-12);
    }
  }
}

TEST_CASE("binary reference solves consistently") {
  const auto spec = fixtures::binary_reference();
  for (auto dec : {Decoder::SD, Decoder::JD}) {
    for (const auto& v : {std::vector<int>{}, std::vector<int>{1}, std::vector<int>{2}, std::vector<int>{1, 2}}) {
      const auto r = solve_symmetric(spec, same(v), dec);
      CHECK(r.rate >= 0.0);
      for (int path = 0; path < 2; ++path) {
        CHECK(r.relay_rates[static_cast<std::size_t>(path)][0] == r.rate);
        if (r.infeasible) continue;
        for (const auto& [k, res] : r.wz_residual[static_cast<std::size_t>(path)]) CHECK(std::abs(res) < 1e-9);
      }
      // Every link term bounds the rate of the segment it feeds from.
      for (const auto& t : r.constraints.terms) {
        if (t.kind == DmTermKind::Link) CHECK(t.value >= r.relay_rates[static_cast<std::size_t>(t.path)][static_cast<std::size_t>(t.k)] - 1e-9);
      }
    }
  }
}

TEST_CASE("asymmetric modes are refused by the symmetric solver") {
  CHECK_THROWS_AS(solve_symmetric(fixtures::noiseless_binary(2), DmModes{{std::vector<int>{1}, std::vector<int>{2}}},
                                  Decoder::SD),
                  std::domain_error);
}

TEST_CASE("a quantizer that sharpens with its knob is rejected") {
  auto spec = fixtures::noiseless_binary(1);
  auto& q = spec.quantizers[1];
  q = QuantizerFamily::flip(2);
  std::swap(q.at_zero, q.at_one);
  q.name = "reversed";
  try {
    solve_symmetric(spec, same({1}), Decoder::SD);
    FAIL("expected NonMonotoneQuantizer");
  } catch (const NonMonotoneQuantizer& e) {
    CHECK(std::string(e.what()).find("reversed") != std::string::npos);
  }
}

TEST_CASE("unreachable equality reports the bracket") {
  // The finest member of this family already flips 10% of symbols, so no
  // knob reaches the 1-bit index rate the noiseless downstream hop allows.
  auto spec = fixtures::noiseless_binary(1);
  auto& q = spec.quantizers[1];
  q = QuantizerFamily::flip(2);
  q.at_zero = {2, 2, {0.9, 0.1, 0.1, 0.9}};
  q.name = "lossy";
  const auto r = solve_symmetric(spec, same({1}), Decoder::SD);
  CHECK(r.infeasible);
  REQUIRE(r.infeasible_brackets.count(1) == 1);
  CHECK(std::abs(r.infeasible_brackets.at(1).second - (1 - h2(0.1))) < 1e-12);
  CHECK(std::abs(r.relay_rates[0][1] - (1 - h2(0.1))) < 1e-12);
}

// The discretization is real-valued, so it approaches half the complex
// baseband rate log2(1 + snr) the Gaussian engine uses.
TEST_CASE("discretized Gaussian hop approaches the Gaussian rate") {
  const double snr = 3.0;
  const double target = 0.5 * std::log2(1 + snr);
  double prev = 0;
  for (int n : {2, 4, 8, 16}) {
    const auto spec = discretized_gaussian(n, 8 * n, snr);
    REQUIRE(validate_dm_spec(spec).empty());
    const double r = solve_symmetric(spec, same({}), Decoder::SD).rate;
    MESSAGE("n = " << n << ": " << r << " of " << target);
    CHECK(r > prev);
    CHECK(r < target);
    prev = r;
  }
  CHECK(target - prev < 0.005);
}
