#include "ehdc/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace ehdc::waterfill {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lower(const Bin& b) { return b.min_power.value_or(0.0); }
double upper(const Bin& b) { return b.cap.value_or(kInf); }

double response(const Bin& b, double level) {
  if (level == -kInf) return lower(b);
  if (level == kInf) return upper(b);
  return std::clamp(level - b.floor, lower(b), upper(b));
}

// Smallest level w with sum_j response_j(w) >= water. -inf when the minimums
// already use all the water, +inf when the caps cannot hold it.
double pool_level(std::span<const Bin> bins, double water) {
  double lo_total = 0.0;
  double hi_total = 0.0;
  std::size_t uncapped = 0;
  for (const Bin& b : bins) {
    lo_total += lower(b);
    if (b.cap) {
      hi_total += *b.cap;
    } else {
      ++uncapped;
    }
  }
  if (water <= lo_total) return -kInf;
  if (uncapped == 0 && water > hi_total) return kInf;

  std::vector<double> bp;
  bp.reserve(2 * bins.size());
  for (const Bin& b : bins) {
    bp.push_back(b.floor + lower(b));
    if (b.cap) bp.push_back(b.floor + *b.cap);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  auto total_at = [&](double w) {
    double s = 0.0;
    for (const Bin& b : bins) s += response(b, w);
    return s;
  };

  double prev_w = bp.front();
  double prev_s = total_at(prev_w);
  for (std::size_t k = 1; k < bp.size(); ++k) {
    const double s = total_at(bp[k]);
    if (s >= water) {
      const double slope = (s - prev_s) / (bp[k] - prev_w);
      return prev_w + (water - prev_s) / slope;
    }
    prev_w = bp[k];
    prev_s = s;
  }
  // Past the last breakpoint only uncapped bins keep rising.
  return prev_w + (water - prev_s) / static_cast<double>(uncapped);
}

// Fills one pooled segment and nudges free bins so the segment total matches
// the pooled water to rounding.
void fill_segment(std::span<const Bin> bins, double water, double level,
                  std::span<double> out) {
  double sum = 0.0;
  std::vector<std::size_t> free_bins;
  for (std::size_t j = 0; j < bins.size(); ++j) {
    out[j] = response(bins[j], level);
    sum += out[j];
    if (std::isfinite(level) && out[j] > lower(bins[j]) &&
        out[j] < upper(bins[j])) {
      free_bins.push_back(j);
    }
  }
  if (!free_bins.empty()) {
    const double fix = (water - sum) / static_cast<double>(free_bins.size());
    for (std::size_t j : free_bins) {
      out[j] = std::clamp(out[j] + fix, lower(bins[j]), upper(bins[j]));
    }
  }
}

void check_lengths(std::span<const Bin> bins, std::size_t n) {
  if (bins.size() != n) {
    throw StructuralError("bin count differs from budget length");
  }
}

std::size_t first_min_violation(std::span<const Bin> bins,
                                std::span<const double> arrivals, double tol) {
  double need = 0.0;
  double have = 0.0;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    need += lower(bins[k]);
    have += arrivals[k];
    if (need > have + tol) return k + 1;
  }
  return 0;
}

}  // namespace

std::vector<Bin> bins_with_floors(std::span<const double> floors) {
  std::vector<Bin> out(floors.size());
  for (std::size_t i = 0; i < floors.size(); ++i) out[i].floor = floors[i];
  return out;
}

namespace detail {

std::vector<double> pooled_fill(std::span<const Bin> bins,
                                std::span<const double> arrivals) {
  check_lengths(bins, arrivals.size());
  struct Segment {
    std::size_t begin;
    std::size_t end;
    double water;
    double level;
  };
  std::vector<Segment> stack;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (!(bins[i].floor > 0.0)) throw DomainError("bin floor must be > 0");
    stack.push_back({i, i + 1, arrivals[i],
                     pool_level(bins.subspan(i, 1), arrivals[i])});
    while (stack.size() >= 2 &&
           stack[stack.size() - 2].level > stack.back().level) {
      Segment top = stack.back();
      stack.pop_back();
      Segment& prev = stack.back();
      prev.end = top.end;
      prev.water += top.water;
      prev.level = pool_level(bins.subspan(prev.begin, prev.end - prev.begin),
                              prev.water);
    }
  }

  const double scale = 1.0 + std::abs(prefix_sums(arrivals).back());
  if (std::size_t k = first_min_violation(bins, arrivals, 1e-12 * scale)) {
    throw InfeasibleError("minimum powers exceed the cumulative budget", k);
  }

  std::vector<double> out(bins.size());
  for (const Segment& s : stack) {
    const std::size_t len = s.end - s.begin;
    fill_segment(bins.subspan(s.begin, len), s.water, s.level,
                 std::span<double>(out).subspan(s.begin, len));
  }
  for (double& v : out) v = std::max(v, 0.0);
  return out;
}

}  // namespace detail

PowerPolicy directional_waterfill(std::span<const Bin> bins,
                                  const EnergyProfile& budget) {
  for (const Bin& b : bins) {
    if (b.min_power) {
      throw StructuralError(
          "directional_waterfill does not take minimum powers");
    }
  }
  return PowerPolicy(detail::pooled_fill(bins, budget.values()));
}

namespace {

// Forward-only equalization of equal-floor bins from index `start` on.
void equalize_forward(std::vector<double>& s, std::size_t start) {
  const std::size_t n = s.size();
  std::size_t begin = start;
  while (begin < n) {
    double best = kInf;
    std::size_t best_end = begin;
    double acc = 0.0;
    for (std::size_t j = begin; j < n; ++j) {
      acc += s[j];
      const double avg = acc / static_cast<double>(j - begin + 1);
      if (avg <= best) {
        best = avg;
        best_end = j;
      }
    }
    for (std::size_t j = begin; j <= best_end; ++j) s[j] = best;
    begin = best_end + 1;
  }
}

}  // namespace

PowerPolicy min_power_backward_fill(std::span<const Bin> bins,
                                    const EnergyProfile& budget) {
  const std::size_t n = budget.size();
  check_lengths(bins, n);
  for (std::size_t i = 1; i < n; ++i) {
    if (bins[i].floor != bins[0].floor) {
      throw StructuralError("backward fill needs a common floor");
    }
    if (lower(bins[i]) < lower(bins[i - 1]) - 1e-12) {
      throw StructuralError("minimum powers must be non-decreasing");
    }
  }
  for (const Bin& b : bins) {
    if (b.cap) throw StructuralError("backward fill does not take caps");
  }
  const double scale = 1.0 + budget.total();
  if (std::size_t k =
          first_min_violation(bins, budget.values(), 1e-12 * scale)) {
    throw InfeasibleError("minimum powers exceed the cumulative budget", k);
  }

  std::vector<double> status(budget.begin(), budget.end());
  for (std::size_t k = n; k-- > 0;) {
    const double need = lower(bins[k]);
    if (status[k] < need) {
      double deficit = need - status[k];
      for (std::size_t j = k; j-- > 0 && deficit > 0.0;) {
        const double take = std::min(status[j], deficit);
        status[j] -= take;
        deficit -= take;
      }
      status[k] = need - std::max(deficit, 0.0);
    } else {
      equalize_forward(status, k);
    }
  }
  for (double& v : status) v = std::max(v, 0.0);
  return PowerPolicy(std::move(status));
}

namespace {

class Objective {
 public:
  explicit Objective(const std::function<double(std::span<const double>)>& f)
      : f_(f) {}

  double operator()(std::span<const double> x) {
    std::vector<long long> key(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      key[i] = std::llround(x[i] * 1e12);
    }
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const double v = f_(x);
    if (cache_.size() > 200'000) cache_.clear();
    cache_.emplace(std::move(key), v);
    return v;
  }

 private:
  const std::function<double(std::span<const double>)>& f_;
  std::map<std::vector<long long>, double> cache_;
};

struct Range {
  double lo;
  double hi;
};

// Feasible step interval along d from x.
Range step_range(std::span<const double> x, std::span<const double> d,
                 std::span<const double> cum, bool monotone) {
  double lo = -kInf;
  double hi = kInf;
  auto limit = [&](double slack, double rate) {
    // slack + t * rate >= 0
    slack = std::max(slack, 0.0);
    if (rate > 1e-300) {
      lo = std::max(lo, -slack / rate);
    } else if (rate < -1e-300) {
      hi = std::min(hi, slack / -rate);
    }
  };
  double px = 0.0;
  double pd = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    limit(x[i], d[i]);
    px += x[i];
    pd += d[i];
    limit(cum[i] - px, -pd);
    if (monotone && i + 1 < x.size()) limit(x[i + 1] - x[i], d[i + 1] - d[i]);
  }
  return {lo, hi};
}

}  // namespace

OuterResult outer_waterflow(const OuterProblem& problem,
                            const OuterOptions& options) {
  if (!problem.evaluate) throw StructuralError("outer problem has no objective");
  const std::size_t n = problem.cumulative_budget.size();
  const std::vector<double> cum = problem.cumulative_budget.cumulative();
  const bool monotone = problem.monotone_allocation_required;
  Objective eval(problem.evaluate);

  // Equal-floor directional fill is non-decreasing and exhausts the budget.
  const std::vector<double> equalized = detail::pooled_fill(
      std::vector<Bin>(n), problem.cumulative_budget.values());
  std::vector<double> x = equalized;
  if (problem.allow_discard) {
    for (double& v : x) v *= 0.5;
  }

  // Transfers between bins, single bins, and suffix blocks (the coordinates
  // of the increments, which keep monotone allocations monotone).
  std::vector<std::vector<double>> dirs;
  auto add = [&](std::vector<double> d) {
    double sum = 0.0;
    for (double v : d) sum += v;
    if (!problem.allow_discard && std::abs(sum) > 1e-12) return;
    dirs.push_back(std::move(d));
  };
  auto suffix = [n](std::size_t k) {
    std::vector<double> d(n, 0.0);
    std::fill(d.begin() + static_cast<std::ptrdiff_t>(k), d.end(), 1.0);
    return d;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<double> d(n, 0.0);
      d[i] = -1.0;
      d[j] = 1.0;
      add(std::move(d));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> d(n, 0.0);
    d[i] = 1.0;
    add(std::move(d));
  }
  for (std::size_t k = 0; k < n; ++k) add(suffix(k));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<double> d(n, 0.0);
      d[i] = 1.0;
      d[j] = 1.0;
      add(std::move(d));
      if (monotone) {
        std::vector<double> a = suffix(j), b = suffix(i);
        for (std::size_t m = 0; m < n; ++m) a[m] -= b[m];
        add(std::move(a));
      }
    }
  }

  const double ls_tol = std::max(options.tol / 10.0, 1e-15);
  std::vector<double> trial(n);
  auto point = [&](std::span<const double> d, double t) {
    for (std::size_t i = 0; i < n; ++i) trial[i] = std::max(x[i] + t * d[i], 0.0);
    return std::span<const double>(trial);
  };

  double value = eval(x);
  // Exact maximization of the concave restriction along d; returns the gain.
  auto line_search = [&](std::span<const double> d) {
    const Range r = step_range(x, d, cum, monotone);
    if (!(r.hi - r.lo > 1e-14) || !std::isfinite(r.lo) ||
        !std::isfinite(r.hi)) {
      return 0.0;
    }
    const double width = r.hi - r.lo;
    double best_t = 0.0;
    double best_v = value;
    auto consider = [&](double t) {
      const double v = eval(point(d, t));
      if (v > best_v) {
        best_v = v;
        best_t = t;
      }
      return v;
    };
    consider(r.lo);
    consider(r.hi);
    constexpr double kPhi = 0.6180339887498949;
    double a = r.lo;
    double b = r.hi;
    double c = b - kPhi * (b - a);
    double e = a + kPhi * (b - a);
    double fc = consider(c);
    double fe = consider(e);
    while (b - a > ls_tol * std::max(1.0, width)) {
      if (fc < fe) {
        a = c;
        c = e;
        fc = fe;
        e = a + kPhi * (b - a);
        fe = consider(e);
      } else {
        b = e;
        e = c;
        fe = fc;
        c = b - kPhi * (b - a);
        fc = consider(c);
      }
    }
    const double gain = best_v - value;
    if (gain > 0.0) {
      point(d, best_t);
      x = trial;
      value = best_v;
      return gain;
    }
    return 0.0;
  };

  OuterResult res;
  res.value_history.push_back(value);
  std::mt19937_64 rng(0x5eed5eedULL);
  std::normal_distribution<double> normal(0.0, 1.0);

  while (res.iterations < options.max_iters) {
    ++res.iterations;
    double gain = 0.0;
    for (const auto& d : dirs) gain += line_search(d);
    const double threshold = options.tol * std::max(1.0, std::abs(value));
    if (gain < threshold) {
      // Coordinate moves can stall on a kink; probe random directions.
      for (std::size_t k = 0; k < 2 * n + 4; ++k) {
        std::vector<double> d(n);
        double mean = 0.0;
        for (double& v : d) {
          v = normal(rng);
          mean += v;
        }
        if (!problem.allow_discard) {
          for (double& v : d) v -= mean / static_cast<double>(n);
        }
        gain += line_search(d);
      }
    }
    res.value_history.push_back(value);
    if (gain < threshold) {
      res.converged = true;
      break;
    }
  }
  res.allocation = x;
  res.value = value;
  return res;
}

}  // namespace ehdc::waterfill
