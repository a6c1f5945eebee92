#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace rdcat {

inline constexpr std::size_t kMaxSignatureSize = 64;

// A mass distribution over bins. Positional histograms carry strictly
// increasing bin positions on a real axis; categorical ones carry masses only
// and need an explicit ground-distance matrix.
struct Histogram {
  std::vector<double> positions;
  std::vector<double> masses;

  static Histogram positional(std::vector<double> positions, std::vector<double> masses);
  static Histogram categorical(std::vector<double> masses);

  bool is_positional() const { return !positions.empty(); }
  std::size_t size() const { return masses.size(); }
};

// Masses scaled to sum to 1. Throws Error(InvalidHistogram) on negative or
// non-finite masses or malformed positions, Error(DegenerateInput) on zero
// total mass.
std::vector<double> normalized_masses(const Histogram& h);

class GroundDistance {
 public:
  // |x - y| between bin positions.
  static GroundDistance absolute_difference() { return {}; }
  // cost[i][j] between bin i of the first and bin j of the second histogram.
  static GroundDistance matrix(std::vector<std::vector<double>> cost);

  bool has_matrix() const { return matrix_.has_value(); }
  const std::vector<std::vector<double>>& cost() const { return *matrix_; }

 private:
  std::optional<std::vector<std::vector<double>>> matrix_;
};

// Earth Mover's Distance between normalized p and q. Positional pairs under
// absolute difference use the cumulative closed form; everything else is
// solved exactly as a transportation problem by min-cost flow.
double emd(const Histogram& p, const Histogram& q, const GroundDistance& ground = GroundDistance::absolute_difference());

// Sum over consecutive support points of |CDF_p - CDF_q| * spacing.
double emd_closed_form_1d(const Histogram& p, const Histogram& q);

// Exact transportation-problem solution. Throws Error(SizeLimit) when either
// signature exceeds kMaxSignatureSize bins and Error(DimensionMismatch) when
// no usable ground distance exists.
double emd_transport(const Histogram& p, const Histogram& q,
                     const GroundDistance& ground = GroundDistance::absolute_difference());

}  // namespace rdcat
