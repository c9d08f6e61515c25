#pragma once
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "beskar/lattice/modarith.hpp"

namespace beskar::lattice {

// Negacyclic number-theoretic transform over Z_q[X]/(X^n + 1), requiring
// 2n | q - 1. Twiddles are powers of a primitive 2n-th root of unity psi
// stored in bit-reversed order; multiplication by a twiddle uses Shoup's
// precomputed quotient.
class ntt_tables
{
public:
  static bool supported(uint32_t q, size_t n)
  {
    return is_pow2(n) && n >= 2 && (static_cast<uint64_t>(q) - 1) % (2 * n) == 0;
  }

  ntt_tables(const modulus& mod, size_t n)
    : mod_(mod)
    , n_(n)
  {
    const uint32_t q = mod.value();
    if (!supported(q, n)) {
      throw parameter_error("NTT requires n a power of two with 2n | q-1");
    }
    const uint32_t psi = primitive_root_of_unity(2 * n);
    size_t logn = 0;
    while ((size_t{ 1 } << logn) < n) {
      logn++;
    }
    zetas_.resize(n);
    zetas_shoup_.resize(n);
    neg_zetas_shoup_.resize(n);
    for (size_t k = 0; k < n; k++) {
      zetas_[k] = mod.pow(psi, bit_reverse(k, logn));
      zetas_shoup_[k] = shoup(zetas_[k]);
      neg_zetas_shoup_[k] = shoup(q - zetas_[k]);
    }
    n_inv_ = mod.inv(static_cast<uint32_t>(n % q));
    n_inv_shoup_ = shoup(n_inv_);
  }

  size_t degree() const { return n_; }

  void forward(std::span<uint32_t> a) const
  {
    const uint32_t q = mod_.value();
    size_t k = 0;
    for (size_t len = n_ / 2; len >= 1; len >>= 1) {
      for (size_t start = 0; start < n_; start += 2 * len) {
        k++;
        const uint32_t z = zetas_[k];
        const uint32_t zs = zetas_shoup_[k];
        for (size_t j = start; j < start + len; j++) {
          const uint32_t t = mul_shoup(a[j + len], z, zs);
          const uint32_t x = a[j];
          a[j + len] = x >= t ? x - t : x + q - t;
          const uint32_t s = x + t;
          a[j] = s >= q ? s - q : s;
        }
      }
    }
  }

  void inverse(std::span<uint32_t> a) const
  {
    const uint32_t q = mod_.value();
    size_t k = n_;
    for (size_t len = 1; len < n_; len <<= 1) {
      for (size_t start = 0; start < n_; start += 2 * len) {
        k--;
        const uint32_t z = q - zetas_[k];
        const uint32_t zs = neg_zetas_shoup_[k];
        for (size_t j = start; j < start + len; j++) {
          const uint32_t x = a[j];
          const uint32_t y = a[j + len];
          const uint32_t s = x + y;
          a[j] = s >= q ? s - q : s;
          const uint32_t d = x >= y ? x - y : x + q - y;
          a[j + len] = mul_shoup(d, z, zs);
        }
      }
    }
    for (size_t j = 0; j < n_; j++) {
      a[j] = mul_shoup(a[j], n_inv_, n_inv_shoup_);
    }
  }

private:
  uint32_t primitive_root_of_unity(uint64_t order) const
  {
    const uint32_t q = mod_.value();
    const auto factors = prime_factors(q - 1);
    for (uint32_t g = 2; g < q; g++) {
      bool generator = true;
      for (uint64_t p : factors) {
        if (mod_.pow(g, (q - 1) / p) == 1) {
          generator = false;
          break;
        }
      }
      if (generator) {
        return mod_.pow(g, (q - 1) / order);
      }
    }
    throw parameter_error("no generator found; modulus not prime?");
  }

  static uint64_t bit_reverse(uint64_t v, size_t bits)
  {
    uint64_t r = 0;
    for (size_t i = 0; i < bits; i++) {
      r = (r << 1) | ((v >> i) & 1);
    }
    return r;
  }

  uint32_t shoup(uint32_t w) const
  {
    return static_cast<uint32_t>((static_cast<uint64_t>(w) << 32) / mod_.value());
  }

  uint32_t mul_shoup(uint32_t a, uint32_t w, uint32_t ws) const
  {
    const uint32_t q = mod_.value();
    const uint64_t quot = (static_cast<uint64_t>(ws) * a) >> 32;
    uint32_t r = static_cast<uint32_t>(static_cast<uint64_t>(w) * a - quot * q);
    return r >= q ? r - q : r;
  }

  modulus mod_;
  size_t n_;
  std::vector<uint32_t> zetas_;
  std::vector<uint32_t> zetas_shoup_;
  std::vector<uint32_t> neg_zetas_shoup_;
  uint32_t n_inv_ = 0;
  uint32_t n_inv_shoup_ = 0;
};

}
