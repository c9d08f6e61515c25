#pragma once
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beskar/common/bytes.hpp"
#include "beskar/common/errors.hpp"
#include "beskar/lattice/modarith.hpp"
#include "beskar/lattice/ntt.hpp"

namespace beskar::lattice {

// Element of R_q = Z_q[X]/(X^n + 1); coefficients canonical in [0, q).
struct poly
{
  std::vector<uint32_t> coeffs;

  poly() = default;
  explicit poly(size_t n)
    : coeffs(n, 0)
  {
  }

  size_t size() const { return coeffs.size(); }
  uint32_t& operator[](size_t i) { return coeffs[i]; }
  uint32_t operator[](size_t i) const { return coeffs[i]; }
  bool operator==(const poly&) const = default;
};

using poly_vec = std::vector<poly>;

// Row-major rows x cols matrix of polynomials.
struct poly_mat
{
  size_t rows = 0;
  size_t cols = 0;
  std::vector<poly> entries;

  poly& at(size_t i, size_t j) { return entries[i * cols + j]; }
  const poly& at(size_t i, size_t j) const { return entries[i * cols + j]; }
  bool operator==(const poly_mat&) const = default;
};

enum class mul_strategy
{
  schoolbook,
  ntt,
};

// Arithmetic context for one (q, n). Cheap to copy; NTT tables are shared.
//
// The "eval" domain is whatever representation makes products cheap: the NTT
// domain for the ntt strategy, plain coefficients for schoolbook. Algorithms
// that cache transformed operands (signing keys, expanded matrices) are
// written once against to_eval / eval_mul / from_eval and work with either
// strategy.
class ring
{
public:
  ring() = default;

  ring(uint32_t q, size_t n, mul_strategy strategy)
    : mod_(q)
    , n_(n)
    , strategy_(strategy)
  {
    if (!is_pow2(n)) {
      throw parameter_error("polynomial degree must be a power of two");
    }
    if (!is_prime(q)) {
      throw parameter_error("ring modulus must be prime");
    }
    if (ntt_tables::supported(q, n)) {
      ntt_ = std::make_shared<const ntt_tables>(mod_, n);
    } else if (strategy == mul_strategy::ntt) {
      throw parameter_error("NTT strategy requested but 2n does not divide q-1");
    }
  }

  const modulus& mod() const { return mod_; }
  uint32_t q() const { return mod_.value(); }
  size_t degree() const { return n_; }
  mul_strategy strategy() const { return strategy_; }
  bool has_ntt() const { return ntt_ != nullptr; }

  poly zero() const { return poly(n_); }

  poly one() const
  {
    poly p(n_);
    p[0] = 1;
    return p;
  }

  poly monomial(size_t e) const
  {
    poly p(n_);
    if (e >= n_) {
      p[e - n_] = q() - 1;
    } else {
      p[e] = 1;
    }
    return p;
  }

  void check(const poly& a) const
  {
    if (a.size() != n_) {
      throw parameter_error("polynomial has " + std::to_string(a.size()) + " coefficients, ring degree is " +
                            std::to_string(n_));
    }
  }

  poly add(const poly& a, const poly& b) const
  {
    check(a);
    check(b);
    poly r(n_);
    for (size_t i = 0; i < n_; i++) {
      r[i] = mod_.add(a[i], b[i]);
    }
    return r;
  }

  poly sub(const poly& a, const poly& b) const
  {
    check(a);
    check(b);
    poly r(n_);
    for (size_t i = 0; i < n_; i++) {
      r[i] = mod_.sub(a[i], b[i]);
    }
    return r;
  }

  poly neg(const poly& a) const
  {
    check(a);
    poly r(n_);
    for (size_t i = 0; i < n_; i++) {
      r[i] = mod_.neg(a[i]);
    }
    return r;
  }

  void add_into(poly& acc, const poly& b) const
  {
    check(acc);
    check(b);
    for (size_t i = 0; i < n_; i++) {
      acc[i] = mod_.add(acc[i], b[i]);
    }
  }

  // Product in R_q using the configured strategy.
  poly mul(const poly& a, const poly& b) const
  {
    if (strategy_ == mul_strategy::ntt) {
      return mul_ntt(a, b);
    }
    return mul_schoolbook(a, b);
  }

  // O(n^2) negacyclic convolution.
  poly mul_schoolbook(const poly& a, const poly& b) const
  {
    check(a);
    check(b);
    const uint64_t q = this->q();
    std::vector<uint64_t> acc(n_, 0);
    for (size_t i = 0; i < n_; i++) {
      if (a[i] == 0) {
        continue;
      }
      for (size_t j = 0; j < n_; j++) {
        const uint64_t prod = mod_.mul(a[i], b[j]);
        const size_t k = i + j;
        if (k < n_) {
          acc[k] += prod;
        } else {
          acc[k - n_] += q - prod;
        }
      }
    }
    poly r(n_);
    for (size_t i = 0; i < n_; i++) {
      r[i] = static_cast<uint32_t>(acc[i] % q);
    }
    return r;
  }

  poly mul_ntt(const poly& a, const poly& b) const
  {
    if (!ntt_) {
      throw parameter_error("ring has no NTT");
    }
    poly ah = ntt_forward(a);
    const poly bh = ntt_forward(b);
    for (size_t i = 0; i < n_; i++) {
      ah[i] = mod_.mul(ah[i], bh[i]);
    }
    ntt_->inverse(ah.coeffs);
    return ah;
  }

  poly ntt_forward(poly a) const
  {
    check(a);
    ntt_->forward(a.coeffs);
    return a;
  }

  poly ntt_inverse(poly a) const
  {
    check(a);
    ntt_->inverse(a.coeffs);
    return a;
  }

  poly to_eval(poly a) const
  {
    check(a);
    if (strategy_ == mul_strategy::ntt) {
      ntt_->forward(a.coeffs);
    }
    return a;
  }

  poly from_eval(poly a) const
  {
    check(a);
    if (strategy_ == mul_strategy::ntt) {
      ntt_->inverse(a.coeffs);
    }
    return a;
  }

  poly eval_mul(const poly& a, const poly& b) const
  {
    if (strategy_ == mul_strategy::ntt) {
      check(a);
      check(b);
      poly r(n_);
      for (size_t i = 0; i < n_; i++) {
        r[i] = mod_.mul(a[i], b[i]);
      }
      return r;
    }
    return mul_schoolbook(a, b);
  }

  void eval_mul_acc(poly& acc, const poly& a, const poly& b) const
  {
    if (strategy_ == mul_strategy::ntt) {
      for (size_t i = 0; i < n_; i++) {
        acc[i] = mod_.add(acc[i], mod_.mul(a[i], b[i]));
      }
      return;
    }
    add_into(acc, mul_schoolbook(a, b));
  }

  // Vector/matrix helpers.

  poly_vec zero_vec(size_t len) const { return poly_vec(len, zero()); }

  poly_vec add(const poly_vec& a, const poly_vec& b) const
  {
    check_len(a, b);
    poly_vec r;
    r.reserve(a.size());
    for (size_t i = 0; i < a.size(); i++) {
      r.push_back(add(a[i], b[i]));
    }
    return r;
  }

  poly_vec sub(const poly_vec& a, const poly_vec& b) const
  {
    check_len(a, b);
    poly_vec r;
    r.reserve(a.size());
    for (size_t i = 0; i < a.size(); i++) {
      r.push_back(sub(a[i], b[i]));
    }
    return r;
  }

  poly_vec to_eval(const poly_vec& v) const
  {
    poly_vec r;
    r.reserve(v.size());
    for (const auto& p : v) {
      r.push_back(to_eval(p));
    }
    return r;
  }

  poly_vec from_eval(const poly_vec& v) const
  {
    poly_vec r;
    r.reserve(v.size());
    for (const auto& p : v) {
      r.push_back(from_eval(p));
    }
    return r;
  }

  poly_mat to_eval(const poly_mat& m) const
  {
    poly_mat r{ m.rows, m.cols, {} };
    r.entries.reserve(m.entries.size());
    for (const auto& p : m.entries) {
      r.entries.push_back(to_eval(p));
    }
    return r;
  }

  // Matrix-vector product with both operands already in the eval domain;
  // the result is in the coefficient domain.
  poly_vec eval_mat_vec(const poly_mat& m_hat, const poly_vec& v_hat) const
  {
    if (v_hat.size() != m_hat.cols) {
      throw parameter_error("matrix/vector dimension mismatch");
    }
    poly_vec r;
    r.reserve(m_hat.rows);
    for (size_t i = 0; i < m_hat.rows; i++) {
      poly acc = zero();
      for (size_t j = 0; j < m_hat.cols; j++) {
        eval_mul_acc(acc, m_hat.at(i, j), v_hat[j]);
      }
      r.push_back(from_eval(std::move(acc)));
    }
    return r;
  }

  // Plain matrix-vector product in coefficient domain.
  poly_vec mat_vec(const poly_mat& m, const poly_vec& v) const
  {
    return eval_mat_vec(to_eval(m), to_eval(v));
  }

  // Scalar polynomial (eval domain) times vector (eval domain), returned in
  // the coefficient domain.
  poly_vec eval_scale(const poly& c_hat, const poly_vec& v_hat) const
  {
    poly_vec r;
    r.reserve(v_hat.size());
    for (const auto& p : v_hat) {
      r.push_back(from_eval(eval_mul(c_hat, p)));
    }
    return r;
  }

private:
  static void check_len(const poly_vec& a, const poly_vec& b)
  {
    if (a.size() != b.size()) {
      throw parameter_error("polynomial vector length mismatch");
    }
  }

  modulus mod_;
  size_t n_ = 0;
  mul_strategy strategy_ = mul_strategy::schoolbook;
  std::shared_ptr<const ntt_tables> ntt_;
};

// Little-endian bit packing of fixed-width values: value i occupies bits
// [i*width, (i+1)*width) of the output stream, least-significant bit first.
inline bytes
pack_bits(std::span<const uint32_t> values, uint32_t width)
{
  bytes out((values.size() * width + 7) / 8, 0);
  size_t bit = 0;
  for (uint32_t v : values) {
    for (uint32_t b = 0; b < width; b++, bit++) {
      if ((v >> b) & 1u) {
        out[bit / 8] |= static_cast<uint8_t>(1u << (bit % 8));
      }
    }
  }
  return out;
}

inline std::optional<std::vector<uint32_t>>
unpack_bits(std::span<const uint8_t> in, size_t count, uint32_t width)
{
  if (in.size() != (count * width + 7) / 8) {
    return std::nullopt;
  }
  std::vector<uint32_t> out(count, 0);
  size_t bit = 0;
  for (size_t i = 0; i < count; i++) {
    uint32_t v = 0;
    for (uint32_t b = 0; b < width; b++, bit++) {
      v |= static_cast<uint32_t>((in[bit / 8] >> (bit % 8)) & 1u) << b;
    }
    out[i] = v;
  }
  return out;
}

// Canonical Poly encoding: ceil(log2 q) bits per coefficient, packed as above.
inline uint32_t
coeff_bits(uint32_t q)
{
  return bit_length(q - 1);
}

inline bytes
encode_poly(const ring& r, const poly& p)
{
  r.check(p);
  return pack_bits(p.coeffs, coeff_bits(r.q()));
}

inline std::optional<poly>
decode_poly(const ring& r, std::span<const uint8_t> in)
{
  auto vals = unpack_bits(in, r.degree(), coeff_bits(r.q()));
  if (!vals) {
    return std::nullopt;
  }
  for (uint32_t v : *vals) {
    if (v >= r.q()) {
      return std::nullopt;
    }
  }
  poly p;
  p.coeffs = std::move(*vals);
  return p;
}

inline size_t
encoded_poly_size(const ring& r)
{
  return (r.degree() * coeff_bits(r.q()) + 7) / 8;
}

inline bytes
encode_poly_vec(const ring& r, const poly_vec& v)
{
  bytes out;
  for (const auto& p : v) {
    bytes_io::append(out, encode_poly(r, p));
  }
  return out;
}

inline std::optional<poly_vec>
decode_poly_vec(const ring& r, std::span<const uint8_t> in, size_t len)
{
  const size_t each = encoded_poly_size(r);
  if (in.size() != each * len) {
    return std::nullopt;
  }
  poly_vec v;
  v.reserve(len);
  for (size_t i = 0; i < len; i++) {
    auto p = decode_poly(r, in.subspan(i * each, each));
    if (!p) {
      return std::nullopt;
    }
    v.push_back(std::move(*p));
  }
  return v;
}

}
