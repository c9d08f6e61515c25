#pragma once
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace beskar {

using bytes = std::vector<uint8_t>;
using seed32 = std::array<uint8_t, 32>;

namespace bytes_io {

inline void
put_u32_le(bytes& out, uint32_t v)
{
  for (int i = 0; i < 4; i++) {
    out.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
}

inline void
put_u64_le(bytes& out, uint64_t v)
{
  for (int i = 0; i < 8; i++) {
    out.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
}

inline void
put_u64_be(bytes& out, uint64_t v)
{
  for (int i = 7; i >= 0; i--) {
    out.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
}

inline uint32_t
get_u32_le(std::span<const uint8_t> in)
{
  uint32_t v = 0;
  for (int i = 0; i < 4; i++) {
    v |= static_cast<uint32_t>(in[i]) << (8 * i);
  }
  return v;
}

inline uint64_t
get_u64_le(std::span<const uint8_t> in)
{
  uint64_t v = 0;
  for (int i = 0; i < 8; i++) {
    v |= static_cast<uint64_t>(in[i]) << (8 * i);
  }
  return v;
}

inline void
append(bytes& out, std::span<const uint8_t> in)
{
  out.insert(out.end(), in.begin(), in.end());
}

// Bounds-checked sequential reader. Every accessor returns false instead of
// reading past the end, so decoders can reject truncated input.
class reader
{
public:
  explicit reader(std::span<const uint8_t> in)
    : buf_(in)
  {
  }

  bool u8(uint8_t& v)
  {
    if (remaining() < 1) {
      return false;
    }
    v = buf_[pos_++];
    return true;
  }

  bool u32(uint32_t& v)
  {
    if (remaining() < 4) {
      return false;
    }
    v = get_u32_le(buf_.subspan(pos_, 4));
    pos_ += 4;
    return true;
  }

  bool u64(uint64_t& v)
  {
    if (remaining() < 8) {
      return false;
    }
    v = get_u64_le(buf_.subspan(pos_, 8));
    pos_ += 8;
    return true;
  }

  bool take(size_t n, std::span<const uint8_t>& out)
  {
    if (remaining() < n) {
      return false;
    }
    out = buf_.subspan(pos_, n);
    pos_ += n;
    return true;
  }

  size_t remaining() const { return buf_.size() - pos_; }
  size_t position() const { return pos_; }

private:
  std::span<const uint8_t> buf_;
  size_t pos_ = 0;
};

}

inline std::string
to_hex(std::span<const uint8_t> in)
{
  static constexpr char digits[] = "0123456789abcdef";
  std::string s;
  s.reserve(in.size() * 2);
  for (uint8_t b : in) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0x0f]);
  }
  return s;
}

inline bytes
from_hex(std::string_view hex)
{
  auto nibble = [](char c) -> uint8_t {
    if (c >= '0' && c <= '9') {
      return static_cast<uint8_t>(c - '0');
    }
    if (c >= 'a' && c <= 'f') {
      return static_cast<uint8_t>(c - 'a' + 10);
    }
    return static_cast<uint8_t>(c - 'A' + 10);
  };
  bytes out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); i++) {
    out[i] = static_cast<uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  }
  return out;
}

}
