#pragma once
#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "beskar/common/bytes.hpp"
#include "beskar/common/errors.hpp"
#include "beskar/sponge/ascon.hpp"

// Threshold sharing of 32-byte secrets over GF(2^61 - 1). The secret is cut
// into 7-byte little-endian chunks (5 chunks, zero padded) and each chunk is
// shared with its own random polynomial of degree threshold - 1. Share m is
// the evaluation at x = m + 1.
namespace beskar::agg {

inline constexpr uint64_t SHAMIR_PRIME = (1ull << 61) - 1;
inline constexpr size_t SHAMIR_CHUNK = 7;
inline constexpr size_t SHAMIR_CHUNKS = (32 + SHAMIR_CHUNK - 1) / SHAMIR_CHUNK;

struct shamir_share
{
  uint32_t holder = 0;
  uint64_t x = 0;
  uint32_t threshold = 0;
  std::array<uint64_t, SHAMIR_CHUNKS> y{};
  bool operator==(const shamir_share&) const = default;
};

namespace gf {

inline uint64_t
reduce(unsigned __int128 v)
{
  uint64_t r = static_cast<uint64_t>(v & SHAMIR_PRIME) + static_cast<uint64_t>(v >> 61);
  r = (r & SHAMIR_PRIME) + (r >> 61);
  return r >= SHAMIR_PRIME ? r - SHAMIR_PRIME : r;
}

inline uint64_t
add(uint64_t a, uint64_t b)
{
  const uint64_t s = a + b;
  return s >= SHAMIR_PRIME ? s - SHAMIR_PRIME : s;
}

inline uint64_t
sub(uint64_t a, uint64_t b)
{
  return a >= b ? a - b : a + SHAMIR_PRIME - b;
}

inline uint64_t
mul(uint64_t a, uint64_t b)
{
  return reduce(static_cast<unsigned __int128>(a) * b);
}

inline uint64_t
pow(uint64_t a, uint64_t e)
{
  uint64_t r = 1;
  while (e) {
    if (e & 1) {
      r = mul(r, a);
    }
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

inline uint64_t
inv(uint64_t a)
{
  return pow(a, SHAMIR_PRIME - 2);
}

}

// randomness seeds the polynomial coefficients, so sharing is reproducible.
inline std::vector<shamir_share>
shamir_split(std::span<const uint8_t> secret, size_t k_total, size_t threshold, const seed32& randomness)
{
  if (secret.size() != 32) {
    throw parameter_error("shamir: secret must be 32 bytes");
  }
  if (threshold < 1 || threshold > k_total) {
    throw parameter_error("shamir: need 1 <= threshold <= share count");
  }
  std::array<uint8_t, SHAMIR_CHUNKS * SHAMIR_CHUNK> padded{};
  std::copy(secret.begin(), secret.end(), padded.begin());

  sponge::xof rng(sponge::domain::shamir);
  rng.absorb(randomness);
  auto draw = [&] {
    while (true) {
      const auto b = rng.squeeze<8>();
      uint64_t v = 0;
      for (size_t i = 0; i < 8; i++) {
        v |= static_cast<uint64_t>(b[i]) << (8 * i);
      }
      v &= SHAMIR_PRIME;
      if (v < SHAMIR_PRIME) {
        return v;
      }
    }
  };

  std::vector<shamir_share> shares(k_total);
  for (size_t m = 0; m < k_total; m++) {
    shares[m].holder = static_cast<uint32_t>(m);
    shares[m].x = m + 1;
    shares[m].threshold = static_cast<uint32_t>(threshold);
  }
  for (size_t c = 0; c < SHAMIR_CHUNKS; c++) {
    std::vector<uint64_t> coeffs(threshold);
    uint64_t s = 0;
    for (size_t b = 0; b < SHAMIR_CHUNK; b++) {
      s |= static_cast<uint64_t>(padded[c * SHAMIR_CHUNK + b]) << (8 * b);
    }
    coeffs[0] = s;
    for (size_t i = 1; i < threshold; i++) {
      coeffs[i] = draw();
    }
    for (auto& sh : shares) {
      uint64_t acc = 0;
      for (size_t i = threshold; i-- > 0;) {
        acc = gf::add(gf::mul(acc, sh.x), coeffs[i]);
      }
      sh.y[c] = acc;
    }
  }
  return shares;
}

// Lagrange interpolation at zero over the first `threshold` shares.
inline std::array<uint8_t, 32>
shamir_reconstruct(std::span<const shamir_share> shares)
{
  if (shares.empty()) {
    throw protocol_error("shamir: no shares supplied");
  }
  const size_t threshold = shares[0].threshold;
  if (shares.size() < threshold) {
    throw protocol_error("shamir: " + std::to_string(shares.size()) + " shares supplied, threshold is " +
                         std::to_string(threshold));
  }
  const auto use = shares.first(threshold);
  for (size_t i = 0; i < use.size(); i++) {
    for (size_t j = i + 1; j < use.size(); j++) {
      if (use[i].x == use[j].x) {
        throw protocol_error("shamir: duplicate share x-coordinate");
      }
    }
  }
  std::vector<uint64_t> lambda(use.size());
  for (size_t i = 0; i < use.size(); i++) {
    uint64_t num = 1;
    uint64_t den = 1;
    for (size_t j = 0; j < use.size(); j++) {
      if (i != j) {
        num = gf::mul(num, use[j].x);
        den = gf::mul(den, gf::sub(use[j].x, use[i].x));
      }
    }
    lambda[i] = gf::mul(num, gf::inv(den));
  }
  std::array<uint8_t, SHAMIR_CHUNKS * SHAMIR_CHUNK> padded{};
  for (size_t c = 0; c < SHAMIR_CHUNKS; c++) {
    uint64_t s = 0;
    for (size_t i = 0; i < use.size(); i++) {
      s = gf::add(s, gf::mul(lambda[i], use[i].y[c]));
    }
    for (size_t b = 0; b < SHAMIR_CHUNK; b++) {
      padded[c * SHAMIR_CHUNK + b] = static_cast<uint8_t>(s >> (8 * b));
    }
  }
  std::array<uint8_t, 32> out{};
  std::copy_n(padded.begin(), 32, out.begin());
  return out;
}

}
