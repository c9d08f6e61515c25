#pragma once
#include <cstdint>
#include <vector>

#include "beskar/common/errors.hpp"

namespace beskar::lattice {

// Arithmetic modulo a prime q < 2^31 with Barrett reduction.
class modulus
{
public:
  modulus() = default;

  explicit modulus(uint32_t q)
    : q_(q)
  {
    if (q < 3 || q >= (1u << 31)) {
      throw parameter_error("modulus must lie in [3, 2^31)");
    }
    barrett_ = static_cast<uint64_t>((static_cast<unsigned __int128>(1) << 64) / q);
  }

  uint32_t value() const { return q_; }

  // x < 2^62
  uint32_t reduce(uint64_t x) const
  {
    const uint64_t quot = static_cast<uint64_t>((static_cast<unsigned __int128>(x) * barrett_) >> 64);
    uint64_t r = x - quot * q_;
    while (r >= q_) {
      r -= q_;
    }
    return static_cast<uint32_t>(r);
  }

  uint32_t add(uint32_t a, uint32_t b) const
  {
    uint32_t s = a + b;
    return s >= q_ ? s - q_ : s;
  }

  uint32_t sub(uint32_t a, uint32_t b) const { return a >= b ? a - b : a + q_ - b; }

  uint32_t neg(uint32_t a) const { return a == 0 ? 0 : q_ - a; }

  uint32_t mul(uint32_t a, uint32_t b) const { return reduce(static_cast<uint64_t>(a) * b); }

  uint32_t pow(uint32_t base, uint64_t e) const
  {
    uint32_t r = 1;
    uint32_t b = base % q_;
    while (e > 0) {
      if (e & 1) {
        r = mul(r, b);
      }
      b = mul(b, b);
      e >>= 1;
    }
    return r;
  }

  // q prime, so a^(q-2) is the inverse.
  uint32_t inv(uint32_t a) const { return pow(a, q_ - 2); }

  // Maps a small signed value into [0, q).
  uint32_t from_signed(int64_t v) const
  {
    int64_t r = v % static_cast<int64_t>(q_);
    if (r < 0) {
      r += q_;
    }
    return static_cast<uint32_t>(r);
  }

  // Centered representative in (-q/2, q/2].
  int32_t centered(uint32_t a) const
  {
    return a > (q_ - 1) / 2 ? static_cast<int32_t>(a) - static_cast<int32_t>(q_) : static_cast<int32_t>(a);
  }

  bool operator==(const modulus& o) const { return q_ == o.q_; }

private:
  uint32_t q_ = 0;
  uint64_t barrett_ = 0;
};

inline bool
is_prime(uint64_t v)
{
  if (v < 2) {
    return false;
  }
  for (uint64_t d = 2; d * d <= v; d++) {
    if (v % d == 0) {
      return false;
    }
  }
  return true;
}

inline std::vector<uint64_t>
prime_factors(uint64_t v)
{
  std::vector<uint64_t> fs;
  for (uint64_t d = 2; d * d <= v; d++) {
    if (v % d == 0) {
      fs.push_back(d);
      while (v % d == 0) {
        v /= d;
      }
    }
  }
  if (v > 1) {
    fs.push_back(v);
  }
  return fs;
}

inline constexpr bool
is_pow2(uint64_t v)
{
  return v != 0 && (v & (v - 1)) == 0;
}

inline constexpr uint32_t
bit_length(uint64_t v)
{
  uint32_t b = 0;
  while (v > 0) {
    b++;
    v >>= 1;
  }
  return b;
}

}
