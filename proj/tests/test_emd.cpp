#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "rdcat/emd.hpp"
#include "rdcat/error.hpp"
#include "rdcat/min_cost_flow.hpp"

using namespace rdcat;

namespace {

// Exhaustive transportation-LP oracle for 3x3 instances: every vertex of the
// feasible polytope is a basic solution supported on a spanning tree of the
// bipartite row/column graph (5 of the 9 cells). Enumerate all of them, solve
// each tree by peeling leaves, keep the feasible ones and take the cheapest.
double transport_3x3_oracle(const std::array<double, 3>& p, const std::array<double, 3>& q,
                            const std::array<std::array<double, 3>, 3>& cost) {
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << 9); ++mask) {
    if (__builtin_popcount(mask) != 5) continue;
    // Union-find over 6 nodes: rows 0..2, columns 3..5.
    std::array<int, 6> parent{0, 1, 2, 3, 4, 5};
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    bool tree = true;
    for (int c = 0; c < 9 && tree; ++c)
      if (mask >> c & 1) {
        int a = find(c / 3), b = find(3 + c % 3);
        if (a == b) tree = false;
        parent[a] = b;
      }
    if (!tree) continue;

    std::array<double, 6> remaining{p[0], p[1], p[2], q[0], q[1], q[2]};
    std::array<bool, 9> open{};
    for (int c = 0; c < 9; ++c) open[c] = mask >> c & 1;
    std::array<double, 9> flow{};
    for (int round = 0; round < 5; ++round) {
      // A node touching exactly one open cell fixes that cell's flow.
      for (int node = 0; node < 6; ++node) {
        int cell = -1, degree = 0;
        for (int c = 0; c < 9; ++c)
          if (open[c] && (c / 3 == node || 3 + c % 3 == node)) {
            ++degree;
            cell = c;
          }
        if (degree != 1) continue;
        flow[cell] = remaining[node];
        remaining[cell / 3] -= flow[cell];
        remaining[3 + cell % 3] -= flow[cell];
        open[cell] = false;
        break;
      }
    }
    bool feasible = true;
    for (double f : flow) feasible = feasible && f >= -1e-12;
    for (double r : remaining) feasible = feasible && std::abs(r) < 1e-12;
    if (!feasible) continue;
    double total = 0;
    for (int c = 0; c < 9; ++c) total += flow[c] * cost[c / 3][c % 3];
    best = std::min(best, total);
  }
  return best;
}

Histogram random_positional(std::mt19937_64& rng, std::size_t bins, bool random_positions) {
  std::uniform_real_distribution<double> mass(0.0, 1.0), gap(0.1, 3.0);
  std::vector<double> positions(bins), masses(bins);
  double x = random_positions ? gap(rng) * 2 - 3 : 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    positions[i] = x;
    x += random_positions ? gap(rng) : 1.0;
    masses[i] = rng() % 5 == 0 ? 0.0 : mass(rng);
  }
  masses[rng() % bins] += 0.5;
  return Histogram::positional(positions, masses);
}

}  // namespace

TEST(Emd, WorkedExampleIsOne) {
  auto p = Histogram::positional({0, 1, 2}, {0.5, 0.5, 0});
  auto q = Histogram::positional({0, 1, 2}, {0, 0.5, 0.5});
  EXPECT_NEAR(emd(p, q), 1.0, 1e-9);
  EXPECT_NEAR(emd_transport(p, q), 1.0, 1e-9);
  std::array<std::array<double, 3>, 3> cost{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) cost[i][j] = std::abs(i - j);
  EXPECT_NEAR(transport_3x3_oracle({0.5, 0.5, 0}, {0, 0.5, 0.5}, cost), 1.0, 1e-12);
}

TEST(Emd, IdentityAndUnitMassShift) {
  auto p = Histogram::positional({0, 1, 2, 3}, {0.1, 0.2, 0.3, 0.4});
  EXPECT_EQ(emd(p, p), 0.0);
  EXPECT_NEAR(emd_transport(p, p), 0.0, 1e-12);
  auto a = Histogram::positional({0, 1, 2, 3}, {1, 0, 0, 0});
  auto b = Histogram::positional({0, 1, 2, 3}, {0, 0, 0, 1});
  EXPECT_DOUBLE_EQ(emd(a, b), 3.0);
  EXPECT_NEAR(emd_transport(a, b), 3.0, 1e-12);
  // Unnormalised masses are scaled first.
  EXPECT_NEAR(emd(Histogram::positional({0, 1}, {2, 0}), Histogram::positional({0, 1}, {0, 5})), 1.0, 1e-12);
}

TEST(Emd, TransportMatchesVertexEnumerationOn3x3) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::array<double, 3> p{}, q{};
    double sp = 0, sq = 0;
    for (int i = 0; i < 3; ++i) {
      p[i] = u(rng) + 0.01;
      q[i] = u(rng) + 0.01;
      sp += p[i];
      sq += q[i];
    }
    std::array<std::array<double, 3>, 3> cost{};
    std::vector<std::vector<double>> matrix(3, std::vector<double>(3));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) matrix[i][j] = cost[i][j] = u(rng) * 10;
    auto got = emd_transport(Histogram::categorical({p[0], p[1], p[2]}), Histogram::categorical({q[0], q[1], q[2]}),
                             GroundDistance::matrix(matrix));
    for (auto& v : p) v /= sp;
    for (auto& v : q) v /= sq;
    EXPECT_NEAR(got, transport_3x3_oracle(p, q, cost), 1e-9) << "trial " << trial;
  }
}

TEST(Emd, ClosedFormMatchesMinCostFlowOn200RandomPairs) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    const bool shared = trial % 2 == 0;
    std::size_t np = 1 + rng() % 64, nq = shared ? np : 1 + rng() % 64;
    auto p = random_positional(rng, np, !shared);
    auto q = random_positional(rng, nq, !shared);
    if (shared) q.positions = p.positions;
    EXPECT_NEAR(emd_closed_form_1d(p, q), emd_transport(p, q), 1e-9) << "trial " << trial;
  }
}

TEST(Emd, MetricPropertiesOnRandomTriples) {
  std::mt19937_64 rng(55);
  std::vector<double> positions(16);
  std::iota(positions.begin(), positions.end(), 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::array<Histogram, 3> h;
    for (auto& x : h) {
      x = random_positional(rng, 16, false);
      x.positions = positions;
    }
    const double ab = emd(h[0], h[1]), ba = emd(h[1], h[0]), bc = emd(h[1], h[2]), ac = emd(h[0], h[2]);
    EXPECT_GE(ab, 0.0);
    EXPECT_NEAR(ab, ba, 1e-9);
    EXPECT_NEAR(emd(h[0], h[0]), 0.0, 1e-9);
    EXPECT_LE(ac, ab + bc + 1e-9);
    // Flow solver route agrees on the same triple.
    EXPECT_NEAR(emd_transport(h[0], h[2]), ac, 1e-9);
    EXPECT_NEAR(emd_transport(h[2], h[0]), ac, 1e-9);
  }
}

TEST(Emd, Errors) {
  auto code = [](const std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::ParseError;
  };
  auto ok = Histogram::positional({0, 1}, {1, 1});
  EXPECT_EQ(code([&] { emd(Histogram::positional({0, 1}, {-1, 2}), ok); }), Errc::InvalidHistogram);
  EXPECT_EQ(code([&] { emd(Histogram::positional({1, 0}, {1, 1}), ok); }), Errc::InvalidHistogram);
  EXPECT_EQ(code([&] { emd(Histogram::positional({0, 1}, {0, 0}), ok); }), Errc::DegenerateInput);
  EXPECT_EQ(code([&] { emd(Histogram::categorical({1, 1}), Histogram::categorical({1, 1})); }),
            Errc::DimensionMismatch);
  EXPECT_EQ(code([&] {
              emd(Histogram::categorical({1, 1}), Histogram::categorical({1, 1}), GroundDistance::matrix({{0, 1}}));
            }),
            Errc::DimensionMismatch);
  std::vector<double> big(65, 1.0), pos(65);
  std::iota(pos.begin(), pos.end(), 0.0);
  EXPECT_EQ(code([&] { emd_transport(Histogram::positional(pos, big), ok); }), Errc::SizeLimit);
  // The closed form has no bin limit.
  EXPECT_NO_THROW(emd(Histogram::positional(pos, big), ok));
}

TEST(MinCostFlow, SmallNetwork) {
  MinCostFlow<double> f(4);
  f.add_arc(0, 1, 2, 1);
  f.add_arc(0, 2, 1, 2);
  f.add_arc(1, 3, 1, 1);
  f.add_arc(1, 2, 1, 0);
  f.add_arc(2, 3, 2, 1);
  auto r = f.solve(0, 3, 3);
  EXPECT_DOUBLE_EQ(r.flow, 3.0);
  // Paths: 0-1-3 (2), 0-1-2-3 (2), 0-2-3 (3).
  EXPECT_DOUBLE_EQ(r.cost, 7.0);
}
