#pragma once
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "beskar/common/errors.hpp"
#include "beskar/lattice/modarith.hpp"
#include "beskar/lattice/poly.hpp"

namespace beskar::lattice {

// Parameters of the Fiat-Shamir-with-aborts signature.
struct ring_params
{
  std::string name;
  uint32_t q = 0;
  size_t n = 0;
  size_t k = 0;    // rows of A
  size_t l = 0;    // columns of A
  uint32_t eta = 0;
  uint32_t gamma1 = 0;
  uint32_t gamma2 = 0;
  uint32_t beta = 0;
  uint32_t tau = 0; // nonzero coefficients of the challenge polynomial
  mul_strategy strategy = mul_strategy::schoolbook;

  // Number of distinct high-bits values, (q-1) / (2 gamma2).
  uint32_t w1_range() const { return (q - 1) / (2 * gamma2); }

  void validate() const
  {
    if (!is_prime(q)) {
      throw parameter_error(name + ": q must be prime");
    }
    if (!is_pow2(n)) {
      throw parameter_error(name + ": n must be a power of two");
    }
    if (k == 0 || l == 0) {
      throw parameter_error(name + ": module dimensions must be positive");
    }
    if (eta < 1) {
      throw parameter_error(name + ": eta must be at least 1");
    }
    if (!(beta > 0 && beta < gamma1)) {
      throw parameter_error(name + ": need 0 < beta < gamma1");
    }
    if (gamma2 == 0 || (q - 1) % (2 * gamma2) != 0) {
      throw parameter_error(name + ": 2*gamma2 must divide q-1");
    }
    if (beta >= gamma2) {
      throw parameter_error(name + ": need beta < gamma2");
    }
    if (tau == 0 || tau > n) {
      throw parameter_error(name + ": tau must lie in [1, n]");
    }
    if (static_cast<uint64_t>(tau) * eta > beta) {
      throw parameter_error(name + ": beta must bound tau*eta");
    }
    if (2 * static_cast<uint64_t>(gamma1) >= q) {
      throw parameter_error(name + ": gamma1 must be below q/2");
    }
  }

  ring make_ring() const { return ring(q, n, strategy); }

  // Heuristic expected number of signing attempts: each z coefficient is
  // rejected with probability ~beta/gamma1, each low-bits coefficient with
  // ~beta/gamma2.
  double expected_attempts() const
  {
    const double pz = std::pow(1.0 - static_cast<double>(beta) / gamma1, static_cast<double>(l * n));
    const double pw = std::pow(1.0 - static_cast<double>(beta) / gamma2, static_cast<double>(k * n));
    return 1.0 / (pz * pw);
  }
};

// Desk parameters: small enough for exhaustive scans over Z_q.
inline ring_params
sig_desk()
{
  return { "sig-desk", 12289, 64, 2, 2, 1, 2048, 768, 8, 8, mul_strategy::schoolbook };
}

// Dilithium-shaped parameter sets over q = 8380417, n = 256, with the
// challenge weight fixed at 60.
inline ring_params
sig_level2()
{
  constexpr uint32_t q = 8380417;
  return { "sig-level2", q, 256, 4, 4, 2, 1u << 17, (q - 1) / 88, 120, 60, mul_strategy::ntt };
}

inline ring_params
sig_level3()
{
  constexpr uint32_t q = 8380417;
  return { "sig-level3", q, 256, 6, 5, 4, 1u << 19, (q - 1) / 32, 240, 60, mul_strategy::ntt };
}

inline ring_params
sig_level5()
{
  constexpr uint32_t q = 8380417;
  return { "sig-level5", q, 256, 8, 7, 2, 1u << 19, (q - 1) / 32, 120, 60, mul_strategy::ntt };
}

// Parameters of the module-LWE KEM.
struct kem_params
{
  std::string name;
  uint32_t q = 0;
  size_t n = 0;
  size_t k = 0;
  uint32_t eta = 0; // centered binomial parameter
  uint32_t du = 0;  // ciphertext u compression bits
  uint32_t dv = 0;  // ciphertext v compression bits
  mul_strategy strategy = mul_strategy::schoolbook;

  size_t message_bytes() const { return n / 8; }

  void validate() const
  {
    if (!is_prime(q) || !is_pow2(n) || n < 8) {
      throw parameter_error(name + ": invalid ring");
    }
    if (k == 0 || eta == 0) {
      throw parameter_error(name + ": invalid module rank or noise");
    }
    if (du == 0 || dv == 0 || du > coeff_bits(q) || dv > coeff_bits(q)) {
      throw parameter_error(name + ": compression widths out of range");
    }
  }

  ring make_ring() const { return ring(q, n, strategy); }
};

// Desk set: decryption failure probability exactly zero (worst case noise
// stays below q/4; see the exhaustive bound test).
inline kem_params
kem_desk()
{
  return { "kem-desk", 3329, 64, 2, 1, 10, 4, mul_strategy::schoolbook };
}

// q = 7681 module-LWE KEM shape with a complete negacyclic NTT.
inline kem_params
kem_768()
{
  return { "kem-768", 7681, 256, 3, 4, 11, 3, mul_strategy::ntt };
}

inline kem_params
kem_512()
{
  return { "kem-512", 7681, 256, 2, 5, 11, 3, mul_strategy::ntt };
}

inline kem_params
kem_1024()
{
  return { "kem-1024", 7681, 256, 4, 3, 11, 3, mul_strategy::ntt };
}

enum class param_set
{
  desk,
  paper,
};

inline param_set
parse_param_set(std::string_view s)
{
  if (s == "desk") {
    return param_set::desk;
  }
  if (s == "paper") {
    return param_set::paper;
  }
  throw parameter_error("unknown parameter set '" + std::string(s) + "' (expected desk or paper)");
}

inline std::string_view
to_string(param_set p)
{
  return p == param_set::desk ? "desk" : "paper";
}

inline ring_params
sig_params_for(param_set p, int level = 2)
{
  if (p == param_set::desk) {
    return sig_desk();
  }
  switch (level) {
    case 2:
      return sig_level2();
    case 3:
      return sig_level3();
    case 5:
      return sig_level5();
    default:
      throw parameter_error("signature level must be 2, 3 or 5");
  }
}

inline kem_params
kem_params_for(param_set p, int level = 768)
{
  if (p == param_set::desk) {
    return kem_desk();
  }
  switch (level) {
    case 512:
      return kem_512();
    case 768:
      return kem_768();
    case 1024:
      return kem_1024();
    default:
      throw parameter_error("KEM level must be 512, 768 or 1024");
  }
}

}
