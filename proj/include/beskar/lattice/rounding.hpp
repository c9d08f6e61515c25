#pragma once
#include <cstdint>
#include <cstdlib>

#include "beskar/lattice/params.hpp"
#include "beskar/lattice/poly.hpp"

namespace beskar::lattice {

struct decomposition
{
  uint32_t high = 0;
  int32_t low = 0;
};

// r = high * 2*gamma2 + low (mod q) with low in (-gamma2, gamma2]. When
// r - low = q - 1 the high part would equal (q-1)/(2 gamma2), which aliases
// 0; it is folded to high = 0, low = low - 1 instead, so high always lies in
// [0, (q-1)/(2 gamma2)).
inline decomposition
decompose(uint32_t r, uint32_t q, uint32_t gamma2)
{
  const int64_t alpha = 2 * static_cast<int64_t>(gamma2);
  int64_t low = static_cast<int64_t>(r) % alpha;
  if (low > gamma2) {
    low -= alpha;
  }
  if (static_cast<int64_t>(r) - low == static_cast<int64_t>(q) - 1) {
    return { 0, static_cast<int32_t>(low - 1) };
  }
  return { static_cast<uint32_t>((static_cast<int64_t>(r) - low) / alpha), static_cast<int32_t>(low) };
}

inline uint32_t
high_bits(uint32_t r, uint32_t q, uint32_t gamma2)
{
  return decompose(r, q, gamma2).high;
}

inline int32_t
low_bits(uint32_t r, uint32_t q, uint32_t gamma2)
{
  return decompose(r, q, gamma2).low;
}

inline poly
high_bits(const poly& a, uint32_t q, uint32_t gamma2)
{
  poly r(a.size());
  for (size_t i = 0; i < a.size(); i++) {
    r[i] = high_bits(a[i], q, gamma2);
  }
  return r;
}

inline poly_vec
high_bits(const poly_vec& v, uint32_t q, uint32_t gamma2)
{
  poly_vec r;
  r.reserve(v.size());
  for (const auto& p : v) {
    r.push_back(high_bits(p, q, gamma2));
  }
  return r;
}

// Max |low_bits| over every coefficient.
inline uint32_t
low_bits_norm(const poly_vec& v, uint32_t q, uint32_t gamma2)
{
  uint32_t m = 0;
  for (const auto& p : v) {
    for (uint32_t c : p.coeffs) {
      const uint32_t a = static_cast<uint32_t>(std::abs(low_bits(c, q, gamma2)));
      m = a > m ? a : m;
    }
  }
  return m;
}

// Max over coefficients of the centered absolute value, representatives
// taken in (-q/2, q/2].
inline uint32_t
inf_norm(const poly& p, uint32_t q)
{
  uint32_t m = 0;
  const uint32_t half = (q - 1) / 2;
  for (uint32_t c : p.coeffs) {
    const uint32_t a = c > half ? q - c : c;
    m = a > m ? a : m;
  }
  return m;
}

inline uint32_t
inf_norm(const poly_vec& v, uint32_t q)
{
  uint32_t m = 0;
  for (const auto& p : v) {
    const uint32_t a = inf_norm(p, q);
    m = a > m ? a : m;
  }
  return m;
}

}
