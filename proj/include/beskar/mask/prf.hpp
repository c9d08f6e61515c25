#pragma once
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "beskar/common/bytes.hpp"
#include "beskar/common/errors.hpp"
#include "beskar/common/op_counts.hpp"
#include "beskar/sponge/ascon.hpp"

// Keyed mask expansion and precomputed mask tables over Z_{2^32}.
//
// prf_expand(key, t, d) splits the output into blocks of BLOCK_WORDS words.
// Block b is the first 4 * BLOCK_WORDS bytes squeezed from
//   XOF_mask_prf(key || u64be(t) || u64be(b))
// read as little-endian 32-bit words.
namespace beskar::mask {

using prf_key = std::array<uint8_t, 32>;
using mask_vector = std::vector<uint32_t>;

inline constexpr size_t BLOCK_WORDS = 256;

// PRF key bound to a KEM shared secret.
inline prf_key
derive_prf_key(std::span<const uint8_t> shared_secret)
{
  return sponge::hash<32>(sponge::domain::prf_key, shared_secret);
}

inline mask_vector
prf_expand(const prf_key& key, uint64_t t, size_t d)
{
  if (d == 0) {
    throw parameter_error("mask dimension must be positive");
  }
  thread_ops().prf_expansions++;
  thread_ops().prf_words += d;
  mask_vector out(d);
  std::array<uint64_t, BLOCK_WORDS / 2> lanes{};
  for (size_t base = 0, block = 0; base < d; base += BLOCK_WORDS, block++) {
    sponge::xof x(sponge::domain::mask_prf);
    x.absorb(key);
    x.absorb_u64_be(t);
    x.absorb_u64_be(block);
    const size_t words = std::min(BLOCK_WORDS, d - base);
    const size_t need = (words + 1) / 2;
    x.squeeze_lanes(std::span<uint64_t>(lanes.data(), need));
    // A lane is squeezed as 8 big-endian bytes; little-endian words over
    // that byte stream are the byte-swapped halves.
    for (size_t i = 0; i < words; i++) {
      const uint64_t lane = lanes[i / 2];
      const uint32_t half = (i % 2 == 0) ? static_cast<uint32_t>(lane >> 32) : static_cast<uint32_t>(lane);
      out[base + i] = __builtin_bswap32(half);
    }
  }
  return out;
}

inline void
check_dims(const mask_vector& a, const mask_vector& b)
{
  if (a.size() != b.size()) {
    throw parameter_error("mask dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
}

// Wrapping word-wise arithmetic. Each call counts as one vector summation.
inline void
mask_add_into(mask_vector& acc, const mask_vector& b)
{
  check_dims(acc, b);
  thread_ops().vector_sums++;
  thread_ops().sum_words += acc.size();
  for (size_t i = 0; i < acc.size(); i++) {
    acc[i] += b[i];
  }
}

inline void
mask_sub_into(mask_vector& acc, const mask_vector& b)
{
  check_dims(acc, b);
  thread_ops().vector_sums++;
  thread_ops().sum_words += acc.size();
  for (size_t i = 0; i < acc.size(); i++) {
    acc[i] -= b[i];
  }
}

inline mask_vector
mask_add(mask_vector a, const mask_vector& b)
{
  mask_add_into(a, b);
  return a;
}

inline mask_vector
mask_sub(mask_vector a, const mask_vector& b)
{
  mask_sub_into(a, b);
  return a;
}

// T masks for iterations t = 1..T, fixed at construction.
class mask_table
{
public:
  mask_table() = default;

  mask_table(const prf_key& key, uint64_t iterations, size_t d)
    : d_(d)
  {
    if (iterations == 0) {
      throw parameter_error("mask table needs at least one iteration");
    }
    entries_.reserve(iterations);
    for (uint64_t t = 1; t <= iterations; t++) {
      entries_.push_back(prf_expand(key, t, d));
    }
  }

  // Test hook: a table of all-zero masks.
  static mask_table zeros(uint64_t iterations, size_t d)
  {
    mask_table m;
    m.d_ = d;
    m.entries_.assign(iterations, mask_vector(d, 0));
    return m;
  }

  size_t iterations() const { return entries_.size(); }
  size_t dimension() const { return d_; }

  const mask_vector& at(uint64_t t) const
  {
    if (t == 0 || t > entries_.size()) {
      throw parameter_error("iteration " + std::to_string(t) + " outside mask table [1, " +
                            std::to_string(entries_.size()) + "]");
    }
    return entries_[t - 1];
  }

  bool operator==(const mask_table&) const = default;

  // u64le(T) || u64le(d) || T*d words little-endian.
  bytes serialize() const
  {
    bytes out;
    out.reserve(16 + 4 * d_ * entries_.size());
    bytes_io::put_u64_le(out, entries_.size());
    bytes_io::put_u64_le(out, d_);
    for (const auto& e : entries_) {
      for (uint32_t w : e) {
        bytes_io::put_u32_le(out, w);
      }
    }
    return out;
  }

  static std::optional<mask_table> deserialize(std::span<const uint8_t> in)
  {
    if (in.size() < 16) {
      return std::nullopt;
    }
    const uint64_t t = bytes_io::get_u64_le(in);
    const uint64_t d = bytes_io::get_u64_le(in.subspan(8));
    if (d == 0 || t == 0 || (in.size() - 16) / 4 / d != t || (in.size() - 16) != 4 * d * t) {
      return std::nullopt;
    }
    mask_table m;
    m.d_ = d;
    m.entries_.assign(t, mask_vector(d));
    size_t off = 16;
    for (auto& e : m.entries_) {
      for (auto& w : e) {
        w = bytes_io::get_u32_le(in.subspan(off));
        off += 4;
      }
    }
    return m;
  }

private:
  size_t d_ = 0;
  std::vector<mask_vector> entries_;
};

inline mask_table
build_mask_table(const prf_key& key, uint64_t iterations, size_t d)
{
  return mask_table(key, iterations, d);
}

}
