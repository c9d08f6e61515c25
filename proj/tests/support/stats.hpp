#pragma once
#include <cstdint>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace beskar::testing {

// Pearson statistic against a uniform expectation over counts.size() bins.
inline double
chi_square_uniform(const std::vector<uint64_t>& counts)
{
  uint64_t total = 0;
  for (auto c : counts) {
    total += c;
  }
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return stat;
}

inline double
chi_square_critical(double df, double significance)
{
  return boost::math::quantile(boost::math::chi_squared(df), 1.0 - significance);
}

inline bool
chi_square_uniform_passes(const std::vector<uint64_t>& counts, double significance = 0.01)
{
  return chi_square_uniform(counts) <= chi_square_critical(static_cast<double>(counts.size() - 1), significance);
}

}
