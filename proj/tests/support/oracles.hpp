#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <ostream>
#include <utility>
#include <vector>

#include "beskar/lattice/params.hpp"
#include "beskar/lattice/poly.hpp"
#include "beskar/lattice/rounding.hpp"

// Deliberately naive reference computations used as test oracles.
namespace beskar::testing {

inline lattice::poly
random_poly(std::mt19937_64& rng, uint32_t q, size_t n)
{
  std::uniform_int_distribution<uint32_t> dist(0, q - 1);
  lattice::poly p(n);
  for (auto& c : p.coeffs) {
    c = dist(rng);
  }
  return p;
}

// Negacyclic convolution over signed 128-bit accumulators, reduced once.
inline lattice::poly
negacyclic_oracle(const lattice::poly& a, const lattice::poly& b, uint32_t q)
{
  const size_t n = a.size();
  std::vector<__int128> acc(n, 0);
  for (size_t i = 0; i < n; i++) {
    for (size_t j = 0; j < n; j++) {
      const __int128 prod = static_cast<__int128>(a[i]) * b[j];
      if (i + j < n) {
        acc[i + j] += prod;
      } else {
        acc[i + j - n] -= prod;
      }
    }
  }
  lattice::poly r(n);
  for (size_t i = 0; i < n; i++) {
    __int128 v = acc[i] % q;
    if (v < 0) {
      v += q;
    }
    r[i] = static_cast<uint32_t>(v);
  }
  return r;
}

inline int64_t
centered(uint32_t c, uint32_t q)
{
  return c > (q - 1) / 2 ? static_cast<int64_t>(c) - q : static_cast<int64_t>(c);
}

struct acceptance_estimate
{
  double p_accept = 0;
  double mean_restarts = 0; // (1 - p) / p
  double se_restarts = 0;   // delta method
};

// Monte-Carlo estimate of the per-attempt acceptance probability of the
// rejection loop for a fixed secret (s1, s2). y is drawn uniformly, the
// challenge is a random weight-tau sign vector, c*s1 and c*s2 are formed by
// sparse rotation, and w = A y is modeled as uniform in Z_q.
inline acceptance_estimate
restart_oracle(const lattice::ring_params& p,
               const lattice::poly_vec& s1,
               const lattice::poly_vec& s2,
               int trials,
               std::mt19937_64& rng)
{
  const int64_t q = p.q;
  auto centered_vec = [&](const lattice::poly_vec& v) {
    std::vector<std::vector<int64_t>> out;
    for (const auto& poly : v) {
      std::vector<int64_t> c(p.n);
      for (size_t j = 0; j < p.n; j++) {
        c[j] = centered(poly[j], p.q);
      }
      out.push_back(std::move(c));
    }
    return out;
  };
  const auto cs1v = centered_vec(s1);
  const auto cs2v = centered_vec(s2);
  auto sparse_mul = [&](const std::vector<std::pair<size_t, int>>& c, const std::vector<int64_t>& s) {
    std::vector<int64_t> out(p.n, 0);
    for (auto [pos, sgn] : c) {
      for (size_t j = 0; j < p.n; j++) {
        const int64_t v = s[j] * sgn;
        if (pos + j < p.n) {
          out[pos + j] += v;
        } else {
          out[pos + j - p.n] -= v;
        }
      }
    }
    return out;
  };
  std::uniform_int_distribution<int64_t> ydist(-(static_cast<int64_t>(p.gamma1) - 1), p.gamma1 - 1);
  std::uniform_int_distribution<int64_t> wdist(0, q - 1);
  int accepted = 0;
  std::vector<size_t> idx(p.n);
  for (int t = 0; t < trials; t++) {
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<std::pair<size_t, int>> c;
    for (size_t i = 0; i < p.tau; i++) {
      c.emplace_back(idx[i], (rng() & 1) ? 1 : -1);
    }
    bool ok = true;
    for (size_t j = 0; j < p.l && ok; j++) {
      const auto cs1 = sparse_mul(c, cs1v[j]);
      for (size_t i = 0; i < p.n; i++) {
        if (std::abs(ydist(rng) + cs1[i]) >= static_cast<int64_t>(p.gamma1 - p.beta)) {
          ok = false;
          break;
        }
      }
    }
    for (size_t j = 0; j < p.k && ok; j++) {
      const auto cs2 = sparse_mul(c, cs2v[j]);
      for (size_t i = 0; i < p.n; i++) {
        const int64_t v = (((wdist(rng) - cs2[i]) % q) + q) % q;
        if (std::abs(lattice::low_bits(static_cast<uint32_t>(v), p.q, p.gamma2)) >=
            static_cast<int32_t>(p.gamma2 - p.beta)) {
          ok = false;
          break;
        }
      }
    }
    accepted += ok;
  }
  acceptance_estimate e;
  e.p_accept = static_cast<double>(accepted) / trials;
  e.mean_restarts = (1 - e.p_accept) / e.p_accept;
  e.se_restarts = std::sqrt(e.p_accept * (1 - e.p_accept) / trials) / (e.p_accept * e.p_accept);
  return e;
}

}

// Readable names for parameterized tests.
namespace beskar::lattice {

inline void
PrintTo(const ring_params& p, std::ostream* os)
{
  *os << p.name;
}

inline void
PrintTo(const kem_params& p, std::ostream* os)
{
  *os << p.name;
}

}
