#include "rdcat/relatedness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rdcat/error.hpp"

namespace rdcat {

namespace {

using std::chrono::microseconds;

struct BinnedSeries {
  std::vector<double> value;
  std::vector<bool> present;
};

BinnedSeries bin_mean(const TimeSeries& s, Instant start, Instant end, microseconds step, std::size_t bins) {
  std::vector<double> sum(bins, 0.0);
  std::vector<std::size_t> count(bins, 0);
  auto first = std::lower_bound(s.times.begin(), s.times.end(), start);
  for (auto it = first; it != s.times.end() && *it < end; ++it) {
    auto i = static_cast<std::size_t>(it - s.times.begin());
    double v = s.values[i];
    if (std::isnan(v) || s.is_gap(i)) continue;
    auto bin = static_cast<std::size_t>((*it - start) / step);
    sum[bin] += v;
    ++count[bin];
  }
  BinnedSeries out{std::vector<double>(bins, 0.0), std::vector<bool>(bins, false)};
  for (std::size_t k = 0; k < bins; ++k) {
    if (count[k] == 0) continue;
    out.value[k] = sum[k] / static_cast<double>(count[k]);
    out.present[k] = true;
  }
  return out;
}

BinnedSeries bin_nearest(const TimeSeries& s, Instant start, Instant end, microseconds step, std::size_t bins,
                         microseconds tolerance) {
  BinnedSeries out{std::vector<double>(bins, 0.0), std::vector<bool>(bins, false)};
  for (std::size_t k = 0; k < bins; ++k) {
    Instant center = start + step * static_cast<long long>(k) + step / 2;
    auto it = std::lower_bound(s.times.begin(), s.times.end(), center);
    microseconds best = microseconds::max();
    std::size_t best_index = 0;
    auto consider = [&](std::vector<Instant>::const_iterator c) {
      auto i = static_cast<std::size_t>(c - s.times.begin());
      if (*c < start || *c >= end || std::isnan(s.values[i]) || s.is_gap(i)) return;
      auto d = *c > center ? *c - center : center - *c;
      if (d < best) {
        best = d;
        best_index = i;
      }
    };
    // Earlier candidate first so ties resolve to the earlier sample.
    if (it != s.times.begin()) consider(std::prev(it));
    if (it != s.times.end()) consider(it);
    if (best <= tolerance) {
      out.value[k] = s.values[best_index];
      out.present[k] = true;
    }
  }
  return out;
}

}  // namespace

microseconds native_cadence(const TimeSeries& series) {
  if (series.times.size() < 2) return microseconds{0};
  std::vector<microseconds::rep> diffs;
  diffs.reserve(series.times.size() - 1);
  for (std::size_t i = 1; i < series.times.size(); ++i) diffs.push_back((series.times[i] - series.times[i - 1]).count());
  auto mid = diffs.begin() + static_cast<std::ptrdiff_t>(diffs.size() / 2);
  std::nth_element(diffs.begin(), mid, diffs.end());
  return microseconds{*mid};
}

AlignedPairs align_series(const TimeSeries& a, const TimeSeries& b, const AlignmentSpec& spec) {
  if (spec.cadence <= microseconds{0}) throw Error(Errc::InvalidArgument, "alignment cadence must be positive");
  if (spec.min_overlap_points < 3) throw Error(Errc::InvalidArgument, "min_overlap_points must be at least 3");
  if (a.times.empty() || b.times.empty()) throw Error(Errc::InvalidArgument, "cannot align an empty series");

  const auto ca = native_cadence(a), cb = native_cadence(b);
  const auto step = std::max({spec.cadence, ca, cb});
  const Instant start = std::max(a.times.front(), b.times.front());
  const Instant end = std::min(a.times.back() + (ca.count() > 0 ? ca : step), b.times.back() + (cb.count() > 0 ? cb : step));
  if (end <= start) throw Error(Errc::NoOverlap, "series do not overlap in time");

  const auto span = end - start;
  const auto bins = static_cast<std::size_t>((span + step - microseconds{1}) / step);
  BinnedSeries ba, bb;
  if (spec.aggregation == Aggregation::mean) {
    ba = bin_mean(a, start, end, step, bins);
    bb = bin_mean(b, start, end, step, bins);
  } else {
    auto tol = spec.nearest_tolerance.count() > 0 ? spec.nearest_tolerance : step / 2;
    ba = bin_nearest(a, start, end, step, bins, tol);
    bb = bin_nearest(b, start, end, step, bins, tol);
  }

  AlignedPairs out;
  out.cadence = step;
  for (std::size_t k = 0; k < bins; ++k) {
    if (!ba.present[k] || !bb.present[k]) continue;
    out.x.push_back(ba.value[k]);
    out.y.push_back(bb.value[k]);
  }
  if (out.x.size() < spec.min_overlap_points)
    throw Error(Errc::NoOverlap, "only " + std::to_string(out.x.size()) + " aligned points, need " +
                                     std::to_string(spec.min_overlap_points));
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(Errc::InvalidArgument, "vectors differ in length");
  if (x.size() < 3) throw Error(Errc::InvalidArgument, "need at least 3 points");
  const auto n = static_cast<double>(x.size());

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;

  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  auto constant = [](std::span<const double> v) { return std::all_of(v.begin(), v.end(), [&](double e) { return e == v[0]; }); };
  if (sxx == 0.0 || syy == 0.0 || constant(x) || constant(y))
    throw Error(Errc::DegenerateInput, "correlation is undefined for a constant vector");
  if (!std::isfinite(sxy) || !std::isfinite(sxx) || !std::isfinite(syy))
    throw Error(Errc::DegenerateInput, "non-finite input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace rdcat
