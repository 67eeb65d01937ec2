#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>

namespace ndr {

// Two-sided normal quantiles used throughout: 95% and 99% coverage.
inline constexpr double z_95 = 1.959963984540054;
inline constexpr double z_99 = 2.5758293035489004;

struct interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// Wilson score interval for a binomial proportion. Chosen over the Wald
// interval for sane behavior at counts near 0 and n.
inline interval wilson_interval(std::uint64_t count, std::uint64_t n, double z = z_95) {
  if (n == 0) return {0.0, 1.0};
  const double p = static_cast<double>(count) / static_cast<double>(n);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / static_cast<double>(n);
  const double center = p + z2 / (2.0 * static_cast<double>(n));
  const double spread =
      z * std::sqrt(p * (1.0 - p) / static_cast<double>(n) +
                    z2 / (4.0 * static_cast<double>(n) * static_cast<double>(n)));
  return {(center - spread) / denom, (center + spread) / denom};
}

// Symmetric normal-approximation interval around a known success probability
// p: the band that holds the empirical frequency with the given coverage.
inline interval binomial_frequency_interval(double p, std::uint64_t n, double z) {
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return {p - z * sigma, p + z * sigma};
}

// Total variation distance between two probability maps over string keys.
inline double tv_distance(const std::map<std::string, double>& a,
                          const std::map<std::string, double>& b) {
  double sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      sum += std::abs(ia->second);
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      sum += std::abs(ib->second);
      ++ib;
    } else {
      sum += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * sum;
}

// Shannon entropy in bits of a weight map (weights assumed normalized).
template <typename Map>
double entropy_bits(const Map& weights) {
  double h = 0.0;
  for (const auto& [key, w] : weights) {
    (void)key;
    if (w > 0.0) h -= w * std::log2(w);
  }
  return h;
}

}  // namespace ndr
