#pragma once
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "beskar/common/errors.hpp"
#include "beskar/mask/prf.hpp"

// Fixed-point embedding of real updates into Z_{2^32}: round(w * scale) as a
// two's-complement int32. Sums of up to n encodings wrap back to the exact
// integer sum as long as every |w_i| * scale stays below 2^31 / n.
namespace beskar::agg {

inline mask::mask_vector
encode_update(std::span<const double> w, double scale, size_t n)
{
  if (!(scale > 0) || n == 0) {
    throw parameter_error("encoding needs scale > 0 and n >= 1");
  }
  const double limit = 2147483648.0 / static_cast<double>(n);
  mask::mask_vector out(w.size());
  for (size_t i = 0; i < w.size(); i++) {
    const double v = w[i] * scale;
    if (!(std::abs(v) < limit)) {
      throw encoding_error("coordinate " + std::to_string(i) + " = " + std::to_string(w[i]) +
                           " overflows the aggregate range at scale " + std::to_string(scale) + " and n = " +
                           std::to_string(n));
    }
    out[i] = static_cast<uint32_t>(static_cast<int32_t>(std::llround(v)));
  }
  return out;
}

inline std::vector<double>
decode_aggregate(const mask::mask_vector& v, double scale)
{
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); i++) {
    out[i] = static_cast<double>(static_cast<int32_t>(v[i])) / scale;
  }
  return out;
}

}
