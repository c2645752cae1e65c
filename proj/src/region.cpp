#include "ehdc/region.hpp"

#include <algorithm>
#include <cmath>

namespace ehdc {

WeightPair::WeightPair(double m1, double m2) : mu1(m1), mu2(m2) {
  if (!(m1 >= 0.0) || !(m2 >= 0.0) || !std::isfinite(m1) ||
      !std::isfinite(m2) || !(m1 + m2 > 0.0)) {
    throw DomainError("weights must be non-negative and not both zero");
  }
}

WeightPair WeightPair::normalized() const {
  const double s = mu1 + mu2;
  return {mu1 / s, mu2 / s};
}

std::vector<WeightPair> weight_grid(int n) {
  if (n < 3) throw DomainError("a weight sweep needs at least 3 points");
  std::vector<double> ratios;
  const int k = n - 3;
  for (int j = 0; j < k; ++j) {
    const double e = k == 1 ? 0.0 : -1.0 + 2.0 * j / (k - 1);
    ratios.push_back(std::pow(10.0, e));
  }
  ratios.push_back(1.0);
  std::stable_sort(ratios.begin(), ratios.end());

  std::vector<WeightPair> out;
  out.emplace_back(1.0, 0.0);
  for (double r : ratios) out.emplace_back(1.0 / (1.0 + r), r / (1.0 + r));
  out.emplace_back(0.0, 1.0);
  return out;
}

}  // namespace ehdc
