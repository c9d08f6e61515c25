#pragma once
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "beskar/common/bytes.hpp"
#include "beskar/common/errors.hpp"
#include "beskar/common/op_counts.hpp"
#include "beskar/lattice/params.hpp"
#include "beskar/lattice/poly.hpp"
#include "beskar/lattice/sampling.hpp"
#include "beskar/sponge/ascon.hpp"

// Module-LWE KEM: IND-CPA encryption wrapped in an FO transform with
// implicit rejection. pk keeps t uncompressed so t = A s + e is checkable.
namespace beskar::kem {

using lattice::kem_params;
using lattice::poly;
using lattice::poly_mat;
using lattice::poly_vec;
using lattice::ring;

using shared_secret = std::array<uint8_t, 32>;

struct public_key
{
  seed32 rho{};
  poly_vec t;
  bool operator==(const public_key&) const = default;
};

struct secret_key
{
  poly_vec s;
  bytes pk_bytes;
  std::array<uint8_t, 32> pk_hash{};
  seed32 z{};
  bool operator==(const secret_key&) const = default;
};

struct keypair
{
  public_key pk;
  secret_key sk;
  // Error vector of t = A s + e; kept for audits, never serialized.
  poly_vec e;
};

struct encapsulation
{
  bytes ct;
  shared_secret key{};
};

namespace detail {

inline poly_mat
expand_matrix(const kem_params& p, const seed32& rho)
{
  poly_mat a{ p.k, p.k, {} };
  for (size_t i = 0; i < p.k; i++) {
    for (size_t j = 0; j < p.k; j++) {
      sponge::xof x(sponge::domain::kem_matrix);
      x.absorb(rho);
      const std::array<uint8_t, 2> ij = { static_cast<uint8_t>(i), static_cast<uint8_t>(j) };
      x.absorb(ij);
      poly e(p.n);
      for (auto& c : e.coeffs) {
        c = lattice::detail::uniform_below(x, p.q);
      }
      a.entries.push_back(std::move(e));
    }
  }
  return a;
}

inline poly_mat
transpose(const poly_mat& a)
{
  poly_mat t{ a.cols, a.rows, {} };
  t.entries.resize(a.entries.size());
  for (size_t i = 0; i < a.rows; i++) {
    for (size_t j = 0; j < a.cols; j++) {
      t.at(j, i) = a.at(i, j);
    }
  }
  return t;
}

// Centered binomial: each coefficient is (sum of eta bits) - (sum of eta
// bits), bits read LSB-first from XOF_kem_noise(seed || nonce).
inline poly
cbd(const kem_params& p, std::span<const uint8_t> seed, uint8_t nonce)
{
  sponge::xof x(sponge::domain::kem_noise);
  x.absorb(seed);
  x.absorb(std::span<const uint8_t>(&nonce, 1));
  bytes buf((p.n * 2 * p.eta + 7) / 8);
  x.squeeze(buf);
  const lattice::modulus mod(p.q);
  poly out(p.n);
  size_t bit = 0;
  auto next = [&] {
    const uint32_t b = (buf[bit / 8] >> (bit % 8)) & 1u;
    bit++;
    return b;
  };
  for (size_t i = 0; i < p.n; i++) {
    int64_t a = 0;
    int64_t b = 0;
    for (uint32_t j = 0; j < p.eta; j++) {
      a += next();
    }
    for (uint32_t j = 0; j < p.eta; j++) {
      b += next();
    }
    out[i] = mod.from_signed(a - b);
  }
  return out;
}

}

// round(2^d * x / q) mod 2^d
inline uint32_t
compress(uint32_t x, uint32_t d, uint32_t q)
{
  const uint64_t num = (static_cast<uint64_t>(x) << d) + q / 2;
  return static_cast<uint32_t>((num / q) & ((1ull << d) - 1));
}

// round(q * y / 2^d)
inline uint32_t
decompress(uint32_t y, uint32_t d, uint32_t q)
{
  return static_cast<uint32_t>((static_cast<uint64_t>(y) * q + (1ull << (d - 1))) >> d);
}

inline size_t
public_key_bytes(const kem_params& p)
{
  return 32 + p.k * ((p.n * lattice::coeff_bits(p.q) + 7) / 8);
}

inline size_t
ciphertext_bytes(const kem_params& p)
{
  return (p.k * p.n * p.du + 7) / 8 + (p.n * p.dv + 7) / 8;
}

inline bytes
encode_public_key(const kem_params& p, const public_key& pk)
{
  bytes out(pk.rho.begin(), pk.rho.end());
  bytes_io::append(out, lattice::encode_poly_vec(p.make_ring(), pk.t));
  return out;
}

// Structural validation of an encoded public key.
inline public_key
decode_public_key(const kem_params& p, std::span<const uint8_t> in)
{
  if (in.size() != public_key_bytes(p)) {
    throw parameter_error("KEM public key has " + std::to_string(in.size()) + " bytes, expected " +
                          std::to_string(public_key_bytes(p)));
  }
  auto t = lattice::decode_poly_vec(p.make_ring(), in.subspan(32), p.k);
  if (!t) {
    throw parameter_error("KEM public key coefficient out of range");
  }
  public_key pk;
  std::copy_n(in.begin(), 32, pk.rho.begin());
  pk.t = std::move(*t);
  return pk;
}

// IND-CPA encryption of an n/8-byte message with explicit coins.
inline bytes
cpa_encrypt(const kem_params& p, const public_key& pk, std::span<const uint8_t> msg, std::span<const uint8_t> coins)
{
  const ring r = p.make_ring();
  const poly_mat at = detail::transpose(detail::expand_matrix(p, pk.rho));
  poly_vec rv;
  poly_vec e1;
  for (size_t i = 0; i < p.k; i++) {
    rv.push_back(detail::cbd(p, coins, static_cast<uint8_t>(i)));
  }
  for (size_t i = 0; i < p.k; i++) {
    e1.push_back(detail::cbd(p, coins, static_cast<uint8_t>(p.k + i)));
  }
  const poly e2 = detail::cbd(p, coins, static_cast<uint8_t>(2 * p.k));

  const poly_vec r_hat = r.to_eval(rv);
  const poly_vec u = r.add(r.eval_mat_vec(r.to_eval(at), r_hat), e1);
  poly v = e2;
  {
    poly acc = r.zero();
    for (size_t i = 0; i < p.k; i++) {
      r.eval_mul_acc(acc, r.to_eval(pk.t[i]), r_hat[i]);
    }
    r.add_into(v, r.from_eval(std::move(acc)));
  }
  const uint32_t half = (p.q + 1) / 2;
  for (size_t i = 0; i < p.n; i++) {
    if ((msg[i / 8] >> (i % 8)) & 1u) {
      v[i] = r.mod().add(v[i], half);
    }
  }

  std::vector<uint32_t> cu;
  cu.reserve(p.k * p.n);
  for (const auto& ui : u) {
    for (uint32_t c : ui.coeffs) {
      cu.push_back(compress(c, p.du, p.q));
    }
  }
  std::vector<uint32_t> cv;
  cv.reserve(p.n);
  for (uint32_t c : v.coeffs) {
    cv.push_back(compress(c, p.dv, p.q));
  }
  bytes out = lattice::pack_bits(cu, p.du);
  bytes_io::append(out, lattice::pack_bits(cv, p.dv));
  return out;
}

inline bytes
cpa_decrypt(const kem_params& p, const poly_vec& s, std::span<const uint8_t> ct)
{
  const ring r = p.make_ring();
  const size_t ulen = (p.k * p.n * p.du + 7) / 8;
  const auto cu = lattice::unpack_bits(ct.first(ulen), p.k * p.n, p.du);
  const auto cv = lattice::unpack_bits(ct.subspan(ulen), p.n, p.dv);
  poly acc = r.zero();
  for (size_t i = 0; i < p.k; i++) {
    poly ui(p.n);
    for (size_t j = 0; j < p.n; j++) {
      ui[j] = decompress((*cu)[i * p.n + j], p.du, p.q);
    }
    r.eval_mul_acc(acc, r.to_eval(s[i]), r.to_eval(ui));
  }
  const poly su = r.from_eval(std::move(acc));
  bytes msg(p.message_bytes(), 0);
  for (size_t j = 0; j < p.n; j++) {
    const uint32_t x = r.mod().sub(decompress((*cv)[j], p.dv, p.q), su[j]);
    if (compress(x, 1, p.q)) {
      msg[j / 8] |= static_cast<uint8_t>(1u << (j % 8));
    }
  }
  return msg;
}

inline keypair
kem_keygen(const kem_params& p, const seed32& seed)
{
  p.validate();
  thread_ops().kem_keygen++;
  sponge::xof x(sponge::domain::kem_keygen);
  x.absorb(seed);
  const auto d = x.squeeze<32>();
  const auto z = x.squeeze<32>();
  sponge::xof g(sponge::domain::kem_g);
  g.absorb(d);
  const auto rho = g.squeeze<32>();
  const auto sigma = g.squeeze<32>();

  const ring r = p.make_ring();
  const poly_mat a = detail::expand_matrix(p, rho);
  keypair kp;
  for (size_t i = 0; i < p.k; i++) {
    kp.sk.s.push_back(detail::cbd(p, sigma, static_cast<uint8_t>(i)));
  }
  for (size_t i = 0; i < p.k; i++) {
    kp.e.push_back(detail::cbd(p, sigma, static_cast<uint8_t>(p.k + i)));
  }
  kp.pk.rho = rho;
  kp.pk.t = r.add(r.mat_vec(a, kp.sk.s), kp.e);
  kp.sk.pk_bytes = encode_public_key(p, kp.pk);
  kp.sk.pk_hash = sponge::hash<32>(sponge::domain::kem_h, kp.sk.pk_bytes);
  kp.sk.z = z;
  return kp;
}

namespace detail {

inline shared_secret
kdf(std::span<const uint8_t> pre_key, std::span<const uint8_t> ct)
{
  const auto hc = sponge::hash<32>(sponge::domain::kem_h, ct);
  sponge::xof k(sponge::domain::kem_kdf);
  k.absorb(pre_key);
  k.absorb(hc);
  return k.squeeze<32>();
}

// (K-bar, r) = G(m || H(pk))
inline std::pair<std::array<uint8_t, 32>, std::array<uint8_t, 32>>
derive(std::span<const uint8_t> msg, std::span<const uint8_t> pk_hash)
{
  sponge::xof g(sponge::domain::kem_g);
  g.absorb(msg);
  g.absorb(pk_hash);
  const auto kbar = g.squeeze<32>();
  const auto coins = g.squeeze<32>();
  return { kbar, coins };
}

}

inline encapsulation
encaps(const kem_params& p, std::span<const uint8_t> pk_bytes, std::span<const uint8_t> coins)
{
  p.validate();
  const public_key pk = decode_public_key(p, pk_bytes);
  thread_ops().encaps++;
  sponge::xof mx(sponge::domain::kem_h);
  mx.absorb(coins);
  bytes msg(p.message_bytes());
  mx.squeeze(msg);
  const auto pk_hash = sponge::hash<32>(sponge::domain::kem_h, pk_bytes);
  const auto [kbar, r] = detail::derive(msg, pk_hash);
  encapsulation out;
  out.ct = cpa_encrypt(p, pk, msg, r);
  out.key = detail::kdf(kbar, out.ct);
  return out;
}

// nullopt only for structurally malformed ciphertexts; a well-formed but
// tampered ciphertext yields the implicit-rejection key KDF(z || H(c)).
inline std::optional<shared_secret>
decaps(const kem_params& p, const secret_key& sk, std::span<const uint8_t> ct)
{
  if (ct.size() != ciphertext_bytes(p)) {
    return std::nullopt;
  }
  thread_ops().decaps++;
  const bytes msg = cpa_decrypt(p, sk.s, ct);
  const auto [kbar, r] = detail::derive(msg, sk.pk_hash);
  const public_key pk = decode_public_key(p, sk.pk_bytes);
  const bytes again = cpa_encrypt(p, pk, msg, r);
  if (std::equal(again.begin(), again.end(), ct.begin())) {
    return detail::kdf(kbar, ct);
  }
  return detail::kdf(sk.z, ct);
}

}
