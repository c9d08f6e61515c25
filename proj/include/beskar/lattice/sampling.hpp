#pragma once
#include <array>
#include <cstdint>
#include <span>

#include "beskar/common/bytes.hpp"
#include "beskar/lattice/params.hpp"
#include "beskar/lattice/poly.hpp"
#include "beskar/sponge/ascon.hpp"

namespace beskar::lattice {

namespace detail {

// Uniform value in [0, bound) by rejection on ceil(log2 bound)-bit chunks read
// little-endian from the stream.
inline uint32_t
uniform_below(sponge::xof& x, uint32_t bound)
{
  const uint32_t bits = bit_length(bound - 1);
  const uint32_t nbytes = (bits + 7) / 8;
  const uint32_t mask = bits >= 32 ? 0xffffffffu : ((1u << bits) - 1);
  std::array<uint8_t, 4> buf{};
  while (true) {
    x.squeeze(std::span<uint8_t>(buf.data(), nbytes));
    uint32_t v = 0;
    for (uint32_t i = 0; i < nbytes; i++) {
      v |= static_cast<uint32_t>(buf[i]) << (8 * i);
    }
    v &= mask;
    if (v < bound) {
      return v;
    }
  }
}

}

// A in R_q^{k x l}: entry (i, j) is rejection-sampled from
// XOF_expand_a(rho || i || j) with i, j as single bytes.
inline poly_mat
expand_matrix(const ring_params& p, std::span<const uint8_t> rho)
{
  if (rho.size() != 32) {
    throw parameter_error("matrix seed must be 32 bytes");
  }
  poly_mat a{ p.k, p.l, {} };
  a.entries.reserve(p.k * p.l);
  for (size_t i = 0; i < p.k; i++) {
    for (size_t j = 0; j < p.l; j++) {
      sponge::xof x(sponge::domain::expand_a);
      x.absorb(rho);
      const std::array<uint8_t, 2> ij = { static_cast<uint8_t>(i), static_cast<uint8_t>(j) };
      x.absorb(ij);
      poly e(p.n);
      for (size_t c = 0; c < p.n; c++) {
        e[c] = detail::uniform_below(x, p.q);
      }
      a.entries.push_back(std::move(e));
    }
  }
  return a;
}

// len polynomials with coefficients uniform on [-eta, eta], stored canonically.
// Polynomial i draws from XOF_sample_eta(seed || u16le(nonce + i)); values
// come from 4-bit nibbles (low nibble first) by rejection when 2*eta+1 <= 16,
// from whole bytes otherwise.
inline poly_vec
sample_eta(const ring_params& p, std::span<const uint8_t> seed, uint16_t nonce, size_t len)
{
  const modulus mod(p.q);
  const uint32_t range = 2 * p.eta + 1;
  poly_vec out;
  out.reserve(len);
  for (size_t i = 0; i < len; i++) {
    sponge::xof x(sponge::domain::sample_eta);
    x.absorb(seed);
    const uint16_t ni = static_cast<uint16_t>(nonce + i);
    const std::array<uint8_t, 2> nb = { static_cast<uint8_t>(ni), static_cast<uint8_t>(ni >> 8) };
    x.absorb(nb);
    poly e(p.n);
    size_t c = 0;
    if (range <= 16) {
      const uint32_t limit = 16 - 16 % range;
      while (c < p.n) {
        const uint8_t b = x.squeeze_byte();
        for (uint32_t v : { static_cast<uint32_t>(b & 0x0f), static_cast<uint32_t>(b >> 4) }) {
          if (v < limit && c < p.n) {
            e[c++] = mod.from_signed(static_cast<int64_t>(p.eta) - static_cast<int64_t>(v % range));
          }
        }
      }
    } else {
      while (c < p.n) {
        const uint32_t v = detail::uniform_below(x, range);
        e[c++] = mod.from_signed(static_cast<int64_t>(p.eta) - static_cast<int64_t>(v));
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

// Masking vector y in S_{gamma1-1}^l: coefficients uniform on
// [-(gamma1-1), gamma1-1]. Polynomial i draws from
// XOF_expand_mask(seed || u64le(nonce) || u8(i)).
inline poly_vec
sample_gamma(const ring_params& p, std::span<const uint8_t> seed, uint64_t nonce)
{
  const modulus mod(p.q);
  const uint32_t range = 2 * p.gamma1 - 1;
  poly_vec out;
  out.reserve(p.l);
  for (size_t i = 0; i < p.l; i++) {
    sponge::xof x(sponge::domain::expand_mask);
    x.absorb(seed);
    x.absorb_u64_le(nonce);
    const uint8_t idx = static_cast<uint8_t>(i);
    x.absorb(std::span<const uint8_t>(&idx, 1));
    poly e(p.n);
    for (size_t c = 0; c < p.n; c++) {
      const uint32_t v = detail::uniform_below(x, range);
      e[c] = mod.from_signed(static_cast<int64_t>(v) - static_cast<int64_t>(p.gamma1 - 1));
    }
    out.push_back(std::move(e));
  }
  return out;
}

}
