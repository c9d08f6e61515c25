#pragma once
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>

#include "beskar/common/bytes.hpp"
#include "beskar/common/errors.hpp"
#include "beskar/common/op_counts.hpp"
#include "beskar/lattice/params.hpp"
#include "beskar/lattice/poly.hpp"
#include "beskar/lattice/rounding.hpp"
#include "beskar/lattice/sampling.hpp"
#include "beskar/sponge/ascon.hpp"

// Fiat-Shamir-with-aborts lattice signature without hint compression: the
// public key carries the full t = A s1 + s2, so the verifier recomputes
// w - c s2 = A z - c t exactly.
//
// Challenge derivation is identical for plain and precomputed signing:
//   tr = CRH(encode(pk)), u = CRH(tr)            (48 bytes each)
//   c~ = H(u || m || pack(w1))                   (32 bytes)
//   c  = sample_in_ball(c~)                      (tau coefficients in {-1, 1})
namespace beskar::sig {

using lattice::poly;
using lattice::poly_mat;
using lattice::poly_vec;
using lattice::ring;
using lattice::ring_params;

inline constexpr size_t CRH_BYTES = 48;
inline constexpr size_t CHALLENGE_BYTES = 32;
inline constexpr uint32_t MAX_SIGN_ATTEMPTS = 1000;

using crh_digest = std::array<uint8_t, CRH_BYTES>;
using challenge_digest = std::array<uint8_t, CHALLENGE_BYTES>;

struct public_key
{
  seed32 rho{};
  poly_vec t;
  bool operator==(const public_key&) const = default;
};

struct secret_key
{
  seed32 rho{};
  seed32 key{};
  crh_digest tr{};
  poly_vec s1;
  poly_vec s2;
  poly_vec t;
  bool operator==(const secret_key&) const = default;
};

struct keypair
{
  public_key pk;
  secret_key sk;
};

struct signature
{
  poly_vec z;
  challenge_digest c{};
  bool operator==(const signature&) const = default;
};

struct sign_stats
{
  uint32_t attempts = 0;
  uint32_t entries_consumed = 0;
  bool fell_back = false;
};

// pk = rho || t packed at ceil(log2 q) bits per coefficient.
inline bytes
encode_public_key(const ring_params& p, const public_key& pk)
{
  const ring r = p.make_ring();
  bytes out(pk.rho.begin(), pk.rho.end());
  bytes_io::append(out, lattice::encode_poly_vec(r, pk.t));
  return out;
}

inline size_t
public_key_bytes(const ring_params& p)
{
  return 32 + p.k * ((p.n * lattice::coeff_bits(p.q) + 7) / 8);
}

inline std::optional<public_key>
decode_public_key(const ring_params& p, std::span<const uint8_t> in)
{
  if (in.size() != public_key_bytes(p)) {
    return std::nullopt;
  }
  public_key pk;
  std::copy_n(in.begin(), 32, pk.rho.begin());
  auto t = lattice::decode_poly_vec(p.make_ring(), in.subspan(32), p.k);
  if (!t) {
    return std::nullopt;
  }
  pk.t = std::move(*t);
  return pk;
}

// z coefficients stored as z + (gamma1 - 1) in bit_length(2 gamma1 - 2) bits,
// followed by the 32-byte challenge digest.
inline uint32_t
z_bits(const ring_params& p)
{
  return lattice::bit_length(2 * static_cast<uint64_t>(p.gamma1) - 2);
}

inline size_t
signature_bytes(const ring_params& p)
{
  return (p.l * p.n * z_bits(p) + 7) / 8 + CHALLENGE_BYTES;
}

inline bytes
encode_signature(const ring_params& p, const signature& s)
{
  const lattice::modulus mod(p.q);
  std::vector<uint32_t> vals;
  vals.reserve(p.l * p.n);
  for (const auto& zp : s.z) {
    for (uint32_t c : zp.coeffs) {
      vals.push_back(static_cast<uint32_t>(mod.centered(c) + static_cast<int32_t>(p.gamma1 - 1)));
    }
  }
  bytes out = lattice::pack_bits(vals, z_bits(p));
  bytes_io::append(out, s.c);
  return out;
}

inline std::optional<signature>
decode_signature(const ring_params& p, std::span<const uint8_t> in)
{
  if (in.size() != signature_bytes(p)) {
    return std::nullopt;
  }
  const size_t zlen = in.size() - CHALLENGE_BYTES;
  auto vals = lattice::unpack_bits(in.first(zlen), p.l * p.n, z_bits(p));
  if (!vals) {
    return std::nullopt;
  }
  const lattice::modulus mod(p.q);
  signature s;
  s.z.assign(p.l, poly(p.n));
  for (size_t i = 0; i < vals->size(); i++) {
    const uint32_t v = (*vals)[i];
    if (v > 2 * p.gamma1 - 2) {
      return std::nullopt;
    }
    s.z[i / p.n][i % p.n] = mod.from_signed(static_cast<int64_t>(v) - static_cast<int64_t>(p.gamma1 - 1));
  }
  std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(zlen), CHALLENGE_BYTES, s.c.begin());
  return s;
}

inline crh_digest
crh(std::span<const uint8_t> in)
{
  return sponge::hash<CRH_BYTES>(sponge::domain::crh, in);
}

// w1 coefficients lie in [0, w1_range); packed at bit_length(w1_range - 1)
// bits each.
inline bytes
pack_w1(const ring_params& p, const poly_vec& w1)
{
  const uint32_t bits = lattice::bit_length(p.w1_range() - 1);
  std::vector<uint32_t> vals;
  vals.reserve(p.k * p.n);
  for (const auto& w : w1) {
    vals.insert(vals.end(), w.coeffs.begin(), w.coeffs.end());
  }
  return lattice::pack_bits(vals, bits);
}

// Sponge primed with u || m; clone it and absorb pack(w1) per attempt.
inline sponge::xof
challenge_prefix(const crh_digest& u, std::span<const uint8_t> msg)
{
  thread_ops().hashed_bytes += msg.size();
  sponge::xof x(sponge::domain::hash_h);
  x.absorb(u);
  x.absorb(msg);
  return x;
}

inline challenge_digest
challenge_from_prefix(sponge::xof prefix, std::span<const uint8_t> w1_packed)
{
  prefix.absorb(w1_packed);
  return prefix.squeeze<CHALLENGE_BYTES>();
}

// Sparse challenge with exactly tau nonzero coefficients in {-1, +1}.
//
// XOF_challenge(c~) stream: the first 8 bytes, little-endian, give sign bits
// s_0..s_63. Then for i = n - tau .. n - 1: read bytes b, mask to
// log2(n) bits, reject until b <= i; set c[i] = c[b], c[b] = (-1)^{s_{i-(n-tau)}}.
inline poly
sample_in_ball(const ring_params& p, const challenge_digest& digest)
{
  sponge::xof x(sponge::domain::challenge);
  x.absorb(digest);
  const auto sb = x.squeeze<8>();
  uint64_t signs = 0;
  for (size_t i = 0; i < 8; i++) {
    signs |= static_cast<uint64_t>(sb[i]) << (8 * i);
  }
  const uint32_t mask = static_cast<uint32_t>(p.n - 1) & 0xff;
  const bool wide = p.n > 256;
  poly c(p.n);
  for (size_t i = p.n - p.tau; i < p.n; i++) {
    size_t j = 0;
    do {
      if (wide) {
        const auto two = x.squeeze<2>();
        j = (static_cast<size_t>(two[0]) | (static_cast<size_t>(two[1]) << 8)) & (p.n - 1);
      } else {
        j = x.squeeze_byte() & mask;
      }
    } while (j > i);
    c[i] = c[j];
    c[j] = (signs & 1) ? p.q - 1 : 1;
    signs >>= 1;
  }
  return c;
}

inline keypair
sig_keygen(const ring_params& p, const seed32& seed)
{
  p.validate();
  thread_ops().sig_keygen++;
  sponge::xof x(sponge::domain::sig_keygen);
  x.absorb(seed);
  const auto rho = x.squeeze<32>();
  const auto rho_prime = x.squeeze<64>();
  const auto key = x.squeeze<32>();

  const ring r = p.make_ring();
  const poly_mat a = lattice::expand_matrix(p, rho);
  poly_vec s1 = lattice::sample_eta(p, rho_prime, 0, p.l);
  poly_vec s2 = lattice::sample_eta(p, rho_prime, static_cast<uint16_t>(p.l), p.k);
  poly_vec t = r.add(r.mat_vec(a, s1), s2);

  keypair kp;
  kp.pk.rho = rho;
  kp.pk.t = t;
  kp.sk.rho = rho;
  kp.sk.key = key;
  kp.sk.s1 = std::move(s1);
  kp.sk.s2 = std::move(s2);
  kp.sk.t = std::move(t);
  kp.sk.tr = crh(encode_public_key(p, kp.pk));
  return kp;
}

// Source of masking vectors y for a given attempt counter kappa.
using mask_source = std::function<poly_vec(uint64_t kappa)>;

// Outcome of trying one masking vector against a message.
struct attempt_result
{
  bool accepted = false;
  signature sig;
};

// Prepared secret key: matrix, secrets and u cached in the eval domain so an
// online attempt costs one challenge hash plus (l + k + 1) transforms.
class signing_key
{
public:
  signing_key(ring_params p, secret_key sk)
    : p_(std::move(p))
    , r_(p_.make_ring())
    , sk_(std::move(sk))
  {
    p_.validate();
    thread_ops().key_expansions++;
    a_hat_ = r_.to_eval(lattice::expand_matrix(p_, sk_.rho));
    s1_hat_ = r_.to_eval(sk_.s1);
    s2_hat_ = r_.to_eval(sk_.s2);
    u_ = crh(sk_.tr);
  }

  const ring_params& params() const { return p_; }
  const ring& ring_ctx() const { return r_; }
  const secret_key& secret() const { return sk_; }
  const crh_digest& u() const { return u_; }
  const poly_mat& a_hat() const { return a_hat_; }

  poly_vec commit(const poly_vec& y) const { return r_.eval_mat_vec(a_hat_, r_.to_eval(y)); }

  // One rejection-sampling attempt with precomputed (y, w = A y, pack(w1)).
  attempt_result try_attempt(const sponge::xof& prefix,
                             const poly_vec& y,
                             const poly_vec& w,
                             std::span<const uint8_t> w1_packed) const
  {
    thread_ops().sign_attempts++;
    attempt_result res;
    res.sig.c = challenge_from_prefix(prefix, w1_packed);
    const poly c_hat = r_.to_eval(sample_in_ball(p_, res.sig.c));

    poly_vec cs1 = r_.eval_scale(c_hat, s1_hat_);
    poly_vec z = r_.add(y, cs1);
    if (lattice::inf_norm(z, p_.q) >= p_.gamma1 - p_.beta) {
      return res;
    }
    const poly_vec cs2 = r_.eval_scale(c_hat, s2_hat_);
    const poly_vec r0src = r_.sub(w, cs2);
    if (lattice::low_bits_norm(r0src, p_.q, p_.gamma2) >= p_.gamma2 - p_.beta) {
      return res;
    }
    res.accepted = true;
    res.sig.z = std::move(z);
    return res;
  }

  // Rejection loop drawing y from `source`. Challenge is H(u || m || w1).
  signature sign_with(std::span<const uint8_t> msg, const mask_source& source, sign_stats* stats = nullptr) const
  {
    const sponge::xof prefix = challenge_prefix(u_, msg);
    for (uint32_t kappa = 0; kappa < MAX_SIGN_ATTEMPTS; kappa++) {
      thread_ops().mask_draws++;
      const poly_vec y = source(kappa);
      const poly_vec w = commit(y);
      const bytes w1p = pack_w1(p_, lattice::high_bits(w, p_.q, p_.gamma2));
      auto res = try_attempt(prefix, y, w, w1p);
      if (stats) {
        stats->attempts++;
      }
      if (res.accepted) {
        return std::move(res.sig);
      }
    }
    throw configuration_error("signing did not terminate within " + std::to_string(MAX_SIGN_ATTEMPTS) +
                              " attempts; check parameters");
  }

  // Deterministic signing: y_kappa = ExpandMask(K || mu, kappa) with
  // mu = CRH(tr || m).
  signature sign(std::span<const uint8_t> msg, sign_stats* stats = nullptr) const
  {
    thread_ops().sign++;
    return sign_unmetered(msg, stats);
  }

  signature sign_unmetered(std::span<const uint8_t> msg, sign_stats* stats = nullptr) const
  {
    thread_ops().hashed_bytes += msg.size();
    sponge::xof mx(sponge::domain::crh);
    mx.absorb(sk_.tr);
    mx.absorb(msg);
    const auto mu = mx.squeeze<CRH_BYTES>();
    bytes seed(sk_.key.begin(), sk_.key.end());
    seed.insert(seed.end(), mu.begin(), mu.end());
    return sign_with(msg, [&](uint64_t kappa) { return lattice::sample_gamma(p_, seed, kappa); }, stats);
  }

private:
  ring_params p_;
  ring r_;
  secret_key sk_;
  poly_mat a_hat_;
  poly_vec s1_hat_;
  poly_vec s2_hat_;
  crh_digest u_{};
};

// Prepared public key for repeated verification.
class verifying_key
{
public:
  verifying_key(ring_params p, public_key pk)
    : p_(std::move(p))
    , r_(p_.make_ring())
    , pk_(std::move(pk))
  {
    p_.validate();
    if (pk_.t.size() != p_.k) {
      throw parameter_error("public key t has wrong length");
    }
    thread_ops().key_expansions++;
    a_hat_ = r_.to_eval(lattice::expand_matrix(p_, pk_.rho));
    t_hat_ = r_.to_eval(pk_.t);
    u_ = crh(crh(encode_public_key(p_, pk_)));
  }

  const public_key& key() const { return pk_; }
  const ring_params& params() const { return p_; }

  bool verify(std::span<const uint8_t> msg, const signature& sig) const
  {
    thread_ops().verify++;
    if (sig.z.size() != p_.l) {
      return false;
    }
    for (const auto& zp : sig.z) {
      if (zp.size() != p_.n) {
        return false;
      }
    }
    if (lattice::inf_norm(sig.z, p_.q) >= p_.gamma1 - p_.beta) {
      return false;
    }
    const poly c_hat = r_.to_eval(sample_in_ball(p_, sig.c));
    const poly_vec z_hat = r_.to_eval(sig.z);
    poly_vec w1(p_.k);
    for (size_t i = 0; i < p_.k; i++) {
      poly acc = r_.zero();
      for (size_t j = 0; j < p_.l; j++) {
        r_.eval_mul_acc(acc, a_hat_.at(i, j), z_hat[j]);
      }
      acc = r_.sub(acc, r_.eval_mul(c_hat, t_hat_[i]));
      w1[i] = lattice::high_bits(r_.from_eval(std::move(acc)), p_.q, p_.gamma2);
    }
    const auto expect = challenge_from_prefix(challenge_prefix(u_, msg), pack_w1(p_, w1));
    return expect == sig.c;
  }

  // Malformed encodings reject rather than throw.
  bool verify(std::span<const uint8_t> msg, std::span<const uint8_t> sig_bytes) const
  {
    auto sig = decode_signature(p_, sig_bytes);
    if (!sig) {
      thread_ops().verify++;
      return false;
    }
    return verify(msg, *sig);
  }

private:
  ring_params p_;
  ring r_;
  public_key pk_;
  poly_mat a_hat_;
  poly_vec t_hat_;
  crh_digest u_{};
};

inline signature
sign(const ring_params& p, const secret_key& sk, std::span<const uint8_t> msg, sign_stats* stats = nullptr)
{
  return signing_key(p, sk).sign(msg, stats);
}

inline bool
verify(const ring_params& p, const public_key& pk, std::span<const uint8_t> msg, const signature& sig)
{
  return verifying_key(p, pk).verify(msg, sig);
}

}
