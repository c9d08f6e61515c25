#pragma once
#include <cstdint>
#include <optional>
#include <span>

#include "beskar/common/bytes.hpp"
#include "beskar/mask/prf.hpp"

// Wire frames of the aggregation phase. All integers little-endian.
//
//   masked update    : u8 1 | u32 sender | u64 t | u64 d | d x u32 y | u32 len | sig
//   participation    : u8 2 | u32 sender | u64 t | u32 len | sig
//   aggregated mask  : u8 3 | u32 sender | u32 slot | u64 t | u64 count | u64 d | d x u32 a | u32 len | sig
//   final update     : u8 4 | u32 sender | u64 t | u64 count | u64 d | d x u32 w
//
// A signature covers every byte of its frame before the length field. The
// slot of an aggregated mask names the node whose masks it carries; it
// differs from the sender only when a surviving node stands in for a
// dropped one.
namespace beskar::agg {

enum class msg_tag : uint8_t
{
  masked_update = 1,
  participation = 2,
  aggregated_mask = 3,
  final_update = 4,
};

struct masked_update
{
  uint32_t sender = 0;
  uint64_t t = 0;
  mask::mask_vector y;
  bytes sig;

  bytes body() const
  {
    bytes out;
    out.reserve(21 + 4 * y.size());
    out.push_back(static_cast<uint8_t>(msg_tag::masked_update));
    bytes_io::put_u32_le(out, sender);
    bytes_io::put_u64_le(out, t);
    bytes_io::put_u64_le(out, y.size());
    for (uint32_t w : y) {
      bytes_io::put_u32_le(out, w);
    }
    return out;
  }
};

struct participation_msg
{
  uint32_t sender = 0;
  uint64_t t = 0;
  bytes sig;

  bytes body() const
  {
    bytes out;
    out.push_back(static_cast<uint8_t>(msg_tag::participation));
    bytes_io::put_u32_le(out, sender);
    bytes_io::put_u64_le(out, t);
    return out;
  }
};

struct aggregated_mask
{
  uint32_t sender = 0;
  uint32_t slot = 0;
  uint64_t t = 0;
  uint64_t count = 0;
  mask::mask_vector a;
  bytes sig;

  bytes body() const
  {
    bytes out;
    out.reserve(33 + 4 * a.size());
    out.push_back(static_cast<uint8_t>(msg_tag::aggregated_mask));
    bytes_io::put_u32_le(out, sender);
    bytes_io::put_u32_le(out, slot);
    bytes_io::put_u64_le(out, t);
    bytes_io::put_u64_le(out, count);
    bytes_io::put_u64_le(out, a.size());
    for (uint32_t w : a) {
      bytes_io::put_u32_le(out, w);
    }
    return out;
  }
};

struct final_update
{
  uint32_t sender = 0;
  uint64_t t = 0;
  uint64_t count = 0;
  mask::mask_vector w;

  bytes body() const
  {
    bytes out;
    out.reserve(29 + 4 * w.size());
    out.push_back(static_cast<uint8_t>(msg_tag::final_update));
    bytes_io::put_u32_le(out, sender);
    bytes_io::put_u64_le(out, t);
    bytes_io::put_u64_le(out, count);
    bytes_io::put_u64_le(out, w.size());
    for (uint32_t v : w) {
      bytes_io::put_u32_le(out, v);
    }
    return out;
  }
};

namespace detail {

inline bytes
with_signature(bytes body, const bytes& sig)
{
  bytes_io::put_u32_le(body, static_cast<uint32_t>(sig.size()));
  bytes_io::append(body, sig);
  return body;
}

inline bool
read_words(bytes_io::reader& r, mask::mask_vector& out)
{
  uint64_t d = 0;
  if (!r.u64(d) || d > r.remaining() / 4) {
    return false;
  }
  out.resize(d);
  for (auto& w : out) {
    if (!r.u32(w)) {
      return false;
    }
  }
  return true;
}

inline bool
read_sig(bytes_io::reader& r, bytes& sig)
{
  uint32_t len = 0;
  if (!r.u32(len) || len != r.remaining()) {
    return false;
  }
  std::span<const uint8_t> raw;
  if (!r.take(len, raw)) {
    return false;
  }
  sig.assign(raw.begin(), raw.end());
  return true;
}

inline bool
expect_tag(bytes_io::reader& r, msg_tag tag)
{
  uint8_t b = 0;
  return r.u8(b) && b == static_cast<uint8_t>(tag);
}

}

inline bytes
serialize(const masked_update& m)
{
  return detail::with_signature(m.body(), m.sig);
}

inline bytes
serialize(const participation_msg& m)
{
  return detail::with_signature(m.body(), m.sig);
}

inline bytes
serialize(const aggregated_mask& m)
{
  return detail::with_signature(m.body(), m.sig);
}

inline bytes
serialize(const final_update& m)
{
  return m.body();
}

inline size_t
frame_size(const masked_update& m)
{
  return 21 + 4 * m.y.size() + 4 + m.sig.size();
}

inline size_t
frame_size(const participation_msg& m)
{
  return 13 + 4 + m.sig.size();
}

inline size_t
frame_size(const aggregated_mask& m)
{
  return 33 + 4 * m.a.size() + 4 + m.sig.size();
}

inline size_t
frame_size(const final_update& m)
{
  return 29 + 4 * m.w.size();
}

inline std::optional<masked_update>
parse_masked_update(std::span<const uint8_t> in)
{
  bytes_io::reader r(in);
  masked_update m;
  if (!detail::expect_tag(r, msg_tag::masked_update) || !r.u32(m.sender) || !r.u64(m.t) ||
      !detail::read_words(r, m.y) || !detail::read_sig(r, m.sig)) {
    return std::nullopt;
  }
  return m;
}

inline std::optional<participation_msg>
parse_participation(std::span<const uint8_t> in)
{
  bytes_io::reader r(in);
  participation_msg m;
  if (!detail::expect_tag(r, msg_tag::participation) || !r.u32(m.sender) || !r.u64(m.t) ||
      !detail::read_sig(r, m.sig)) {
    return std::nullopt;
  }
  return m;
}

inline std::optional<aggregated_mask>
parse_aggregated_mask(std::span<const uint8_t> in)
{
  bytes_io::reader r(in);
  aggregated_mask m;
  if (!detail::expect_tag(r, msg_tag::aggregated_mask) || !r.u32(m.sender) || !r.u32(m.slot) || !r.u64(m.t) ||
      !r.u64(m.count) || !detail::read_words(r, m.a) || !detail::read_sig(r, m.sig)) {
    return std::nullopt;
  }
  return m;
}

inline std::optional<final_update>
parse_final_update(std::span<const uint8_t> in)
{
  bytes_io::reader r(in);
  final_update m;
  if (!detail::expect_tag(r, msg_tag::final_update) || !r.u32(m.sender) || !r.u64(m.t) || !r.u64(m.count) ||
      !detail::read_words(r, m.w) || r.remaining() != 0) {
    return std::nullopt;
  }
  return m;
}

}
