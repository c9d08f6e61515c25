#pragma once
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>

// 320-bit Ascon permutation and the sponge built on it. This is the single
// hash/XOF used across the library (matrix expansion, mask sampling, CRH,
// challenge hashing, KEM hashing, mask PRF). Instances are separated by a
// domain byte folded into the initialization vector; domain 0 reproduces
// Ascon-Xof (v1.2) exactly.
namespace beskar::sponge {

using state_t = std::array<uint64_t, 5>;

inline constexpr std::array<uint8_t, 12> ROUND_CONSTANTS = {
  0xf0, 0xe1, 0xd2, 0xc3, 0xb4, 0xa5, 0x96, 0x87, 0x78, 0x69, 0x5a, 0x4b
};

inline constexpr void
round(state_t& s, uint8_t rc)
{
  s[2] ^= rc;

  s[0] ^= s[4];
  s[4] ^= s[3];
  s[2] ^= s[1];
  uint64_t t0 = s[0] ^ (~s[1] & s[2]);
  uint64_t t1 = s[1] ^ (~s[2] & s[3]);
  uint64_t t2 = s[2] ^ (~s[3] & s[4]);
  uint64_t t3 = s[3] ^ (~s[4] & s[0]);
  uint64_t t4 = s[4] ^ (~s[0] & s[1]);
  t1 ^= t0;
  t0 ^= t4;
  t3 ^= t2;
  t2 = ~t2;

  s[0] = t0 ^ std::rotr(t0, 19) ^ std::rotr(t0, 28);
  s[1] = t1 ^ std::rotr(t1, 61) ^ std::rotr(t1, 39);
  s[2] = t2 ^ std::rotr(t2, 1) ^ std::rotr(t2, 6);
  s[3] = t3 ^ std::rotr(t3, 10) ^ std::rotr(t3, 17);
  s[4] = t4 ^ std::rotr(t4, 7) ^ std::rotr(t4, 41);
}

template<size_t rounds = 12>
inline constexpr void
permute(state_t& s)
  requires(rounds >= 1 && rounds <= 12)
{
  for (size_t r = 12 - rounds; r < 12; r++) {
    round(s, ROUND_CONSTANTS[r]);
  }
}

// Domain separation tags. One byte each; fixed forever since every derived
// key, matrix and mask depends on them.
enum class domain : uint8_t
{
  xof = 0x00,
  hash_h = 0x01,
  crh = 0x02,
  expand_a = 0x03,
  expand_mask = 0x04,
  sample_eta = 0x05,
  challenge = 0x06,
  sig_keygen = 0x07,
  kem_g = 0x10,
  kem_h = 0x11,
  kem_kdf = 0x12,
  kem_noise = 0x13,
  kem_matrix = 0x14,
  kem_keygen = 0x15,
  mask_prf = 0x20,
  prf_key = 0x21,
  shamir = 0x30,
  sim_rng = 0x40,
};

inline constexpr uint64_t XOF_IV = 0x00400c0000000000ull;

inline constexpr uint64_t
load_be(const uint8_t* p, size_t len)
{
  uint64_t v = 0;
  for (size_t i = 0; i < len; i++) {
    v |= static_cast<uint64_t>(p[i]) << (56 - 8 * i);
  }
  return v;
}

inline constexpr void
store_be(uint64_t v, uint8_t* p, size_t len)
{
  for (size_t i = 0; i < len; i++) {
    p[i] = static_cast<uint8_t>(v >> (56 - 8 * i));
  }
}

// Sponge with 64-bit rate, 12-round permutation for init, absorb and squeeze.
// Absorption may be split over several calls; the first squeeze pads and
// finalizes. Copying an instance forks the sponge, which lets callers hash a
// common prefix once and branch on different suffixes.
class xof
{
public:
  static constexpr size_t RATE = 8;

  explicit xof(domain d = domain::xof)
    : xof(XOF_IV | static_cast<uint64_t>(d))
  {
  }

  static xof with_iv(uint64_t iv) { return xof(iv); }

  xof& absorb(std::span<const uint8_t> in)
  {
    size_t off = 0;
    if (buffered_ > 0) {
      const size_t take = std::min(RATE - buffered_, in.size());
      std::memcpy(buf_.data() + buffered_, in.data(), take);
      buffered_ += take;
      off = take;
      if (buffered_ < RATE) {
        return *this;
      }
      s_[0] ^= load_be(buf_.data(), RATE);
      permute(s_);
      buffered_ = 0;
    }
    while (in.size() - off >= RATE) {
      s_[0] ^= load_be(in.data() + off, RATE);
      permute(s_);
      off += RATE;
    }
    const size_t rest = in.size() - off;
    std::memcpy(buf_.data(), in.data() + off, rest);
    buffered_ = rest;
    return *this;
  }

  xof& absorb(std::string_view s)
  {
    return absorb(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
  }

  xof& absorb_u64_be(uint64_t v)
  {
    std::array<uint8_t, 8> b{};
    store_be(v, b.data(), 8);
    return absorb(b);
  }

  xof& absorb_u64_le(uint64_t v)
  {
    std::array<uint8_t, 8> b{};
    for (size_t i = 0; i < 8; i++) {
      b[i] = static_cast<uint8_t>(v >> (8 * i));
    }
    return absorb(b);
  }

  void squeeze(std::span<uint8_t> out)
  {
    if (!finalized_) {
      finalize();
    }
    size_t off = 0;
    while (off < out.size()) {
      if (avail_ == 0) {
        permute(s_);
        store_be(s_[0], sq_.data(), RATE);
        avail_ = RATE;
      }
      const size_t take = std::min(avail_, out.size() - off);
      std::memcpy(out.data() + off, sq_.data() + (RATE - avail_), take);
      avail_ -= take;
      off += take;
    }
  }

  // Squeezes whole 64-bit lanes; faster than byte-wise squeeze for bulk
  // output. Only valid when no partial lane is pending.
  void squeeze_lanes(std::span<uint64_t> out)
  {
    if (!finalized_) {
      finalize();
    }
    for (auto& lane : out) {
      permute(s_);
      lane = s_[0];
    }
  }

  template<size_t N>
  std::array<uint8_t, N> squeeze()
  {
    std::array<uint8_t, N> out{};
    squeeze(out);
    return out;
  }

  uint8_t squeeze_byte()
  {
    uint8_t b = 0;
    squeeze(std::span<uint8_t>(&b, 1));
    return b;
  }

private:
  explicit xof(uint64_t iv)
  {
    s_ = { iv, 0, 0, 0, 0 };
    permute(s_);
  }

  void finalize()
  {
    s_[0] ^= load_be(buf_.data(), buffered_);
    s_[0] ^= 0x80ull << (56 - 8 * buffered_);
    buffered_ = 0;
    finalized_ = true;
    // The first squeeze lane is produced by the permutation call in
    // squeeze(), matching the reference finalization.
    avail_ = 0;
  }

  state_t s_{};
  std::array<uint8_t, RATE> buf_{};
  std::array<uint8_t, RATE> sq_{};
  size_t buffered_ = 0;
  size_t avail_ = 0;
  bool finalized_ = false;
};

// One-shot helpers.
template<size_t N>
inline std::array<uint8_t, N>
hash(domain d, std::span<const uint8_t> in)
{
  xof x(d);
  x.absorb(in);
  return x.squeeze<N>();
}

}
