#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <vector>

#include "rdcat/convert.hpp"

namespace rdcat {

enum class Aggregation { mean, nearest };

struct AlignmentSpec {
  std::chrono::microseconds cadence{std::chrono::minutes{1}};
  Aggregation aggregation = Aggregation::mean;
  std::size_t min_overlap_points = 16;
  // Nearest-sample tolerance; zero means half the grid cadence.
  std::chrono::microseconds nearest_tolerance{0};
};

struct AlignedPairs {
  std::vector<double> x;
  std::vector<double> y;
  std::chrono::microseconds cadence{0};
};

// Typical sample spacing (median of successive differences); zero for
// series with fewer than two samples.
std::chrono::microseconds native_cadence(const TimeSeries& series);

// Resamples both series onto one grid whose step is the coarsest of the
// requested and native cadences. Each sample stands for the interval
// [t, t + native cadence); the grid spans the intersection of both coverages
// and starts at its beginning. Cells empty (or all-gap) on either side are
// dropped. Throws Error(NoOverlap) when fewer than min_overlap_points cells
// survive, Error(InvalidArgument) on an invalid spec or empty series.
AlignedPairs align_series(const TimeSeries& a, const TimeSeries& b, const AlignmentSpec& spec = {});

// Sample Pearson correlation, clamped to [-1, 1]. Throws
// Error(DegenerateInput) for constant input and Error(InvalidArgument) for
// mismatched or too-short (< 3) vectors.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace rdcat
