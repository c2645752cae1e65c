#pragma once

#include <vector>

#include "ehdc/model.hpp"

namespace ehdc {

/// Non-negative weights on the two users' totals, not both zero.
struct WeightPair {
  double mu1 = 0.5;
  double mu2 = 0.5;

  WeightPair() = default;
  WeightPair(double m1, double m2);

  /// Same direction with mu1 + mu2 = 1.
  WeightPair normalized() const;
};

/// One SCA iterate: x1 is the power of the user decoded last, x2 the SINR of
/// the user decoded first (which sees the other as noise).
struct SuccessiveIterate {
  std::vector<double> x1;
  std::vector<double> x2;
  double value = 0.0;
};

struct RegionPoint {
  double b1 = 0.0;
  double b2 = 0.0;
  WeightPair weights;
  /// Per-user transmit powers (MAC) or (p_t, p_2) (BC).
  PowerPolicy first{0.0};
  PowerPolicy second{0.0};
  bool converged = true;
  int iterations = 0;
  /// SCA history, successive MAC mode only.
  std::vector<SuccessiveIterate> trace;

  double weighted_value() const { return weights.mu1 * b1 + weights.mu2 * b2; }
};

enum class DecodingMode { Simultaneous, Successive };

struct DepartureRegion {
  std::vector<RegionPoint> points;
  DecodingMode mode = DecodingMode::Simultaneous;
};

/// Sweep order: (1,0), log-spaced mu2/mu1 ratios in [0.1, 10] with the equal
/// weight point inserted, then (0,1). Every pair sums to 1. n >= 3.
std::vector<WeightPair> weight_grid(int n);

}  // namespace ehdc
