#include "rdcat/emd.hpp"

#include <algorithm>
#include <cmath>

#include "rdcat/error.hpp"
#include "rdcat/min_cost_flow.hpp"

namespace rdcat {

Histogram Histogram::positional(std::vector<double> positions, std::vector<double> masses) {
  return Histogram{std::move(positions), std::move(masses)};
}

Histogram Histogram::categorical(std::vector<double> masses) { return Histogram{{}, std::move(masses)}; }

GroundDistance GroundDistance::matrix(std::vector<std::vector<double>> cost) {
  for (const auto& row : cost)
    for (double c : row)
      if (!std::isfinite(c) || c < 0.0) throw Error(Errc::InvalidArgument, "ground distances must be finite and >= 0");
  GroundDistance g;
  g.matrix_ = std::move(cost);
  return g;
}

std::vector<double> normalized_masses(const Histogram& h) {
  if (h.masses.empty()) throw Error(Errc::InvalidHistogram, "histogram has no bins");
  if (h.is_positional()) {
    if (h.positions.size() != h.masses.size())
      throw Error(Errc::InvalidHistogram, "positions and masses differ in length");
    for (std::size_t i = 0; i < h.positions.size(); ++i) {
      if (!std::isfinite(h.positions[i])) throw Error(Errc::InvalidHistogram, "non-finite bin position");
      if (i > 0 && !(h.positions[i] > h.positions[i - 1]))
        throw Error(Errc::InvalidHistogram, "bin positions must be strictly increasing");
    }
  }
  double total = 0.0;
  for (double m : h.masses) {
    if (!std::isfinite(m) || m < 0.0) throw Error(Errc::InvalidHistogram, "masses must be finite and non-negative");
    total += m;
  }
  if (total <= 0.0) throw Error(Errc::DegenerateInput, "histogram has zero total mass");
  std::vector<double> out(h.masses);
  for (double& m : out) m /= total;
  return out;
}

double emd_closed_form_1d(const Histogram& p, const Histogram& q) {
  if (!p.is_positional() || !q.is_positional())
    throw Error(Errc::DimensionMismatch, "closed form needs positional histograms");
  const auto mp = normalized_masses(p), mq = normalized_masses(q);

  // Merge both supports; walk the union axis accumulating both CDFs.
  std::size_t i = 0, j = 0;
  double cdf_p = 0.0, cdf_q = 0.0, total = 0.0;
  double x = std::min(p.positions.front(), q.positions.front());
  while (i < mp.size() || j < mq.size()) {
    double next = std::min(i < mp.size() ? p.positions[i] : INFINITY, j < mq.size() ? q.positions[j] : INFINITY);
    total += std::abs(cdf_p - cdf_q) * (next - x);
    x = next;
    if (i < mp.size() && p.positions[i] == x) cdf_p += mp[i++];
    if (j < mq.size() && q.positions[j] == x) cdf_q += mq[j++];
  }
  return total;
}

double emd_transport(const Histogram& p, const Histogram& q, const GroundDistance& ground) {
  if (p.size() > kMaxSignatureSize || q.size() > kMaxSignatureSize)
    throw Error(Errc::SizeLimit, "signatures are limited to " + std::to_string(kMaxSignatureSize) + " bins");
  const auto mp = normalized_masses(p), mq = normalized_masses(q);

  auto distance = [&](std::size_t a, std::size_t b) -> double {
    if (ground.has_matrix()) return ground.cost()[a][b];
    return std::abs(p.positions[a] - q.positions[b]);
  };
  if (ground.has_matrix()) {
    const auto& cost = ground.cost();
    if (cost.size() != mp.size() ||
        std::any_of(cost.begin(), cost.end(), [&](const auto& row) { return row.size() != mq.size(); }))
      throw Error(Errc::DimensionMismatch, "ground matrix does not match the histogram sizes");
  } else if (!p.is_positional() || !q.is_positional()) {
    throw Error(Errc::DimensionMismatch, "categorical histograms need a ground-distance matrix");
  }

  const std::size_t source = 0, first_p = 1, first_q = 1 + mp.size(), sink = first_q + mq.size();
  MinCostFlow<double> flow(sink + 1);
  for (std::size_t a = 0; a < mp.size(); ++a) {
    if (mp[a] <= 0.0) continue;
    flow.add_arc(source, first_p + a, mp[a], 0.0);
    for (std::size_t b = 0; b < mq.size(); ++b)
      if (mq[b] > 0.0) flow.add_arc(first_p + a, first_q + b, mp[a], distance(a, b));
  }
  for (std::size_t b = 0; b < mq.size(); ++b)
    if (mq[b] > 0.0) flow.add_arc(first_q + b, sink, mq[b], 0.0);
  return flow.solve(source, sink, 1.0).cost;
}

double emd(const Histogram& p, const Histogram& q, const GroundDistance& ground) {
  if (!ground.has_matrix() && p.is_positional() && q.is_positional()) return emd_closed_form_1d(p, q);
  return emd_transport(p, q, ground);
}

}  // namespace rdcat
