#pragma once
#include <cstdint>

namespace beskar {

// Per-thread tallies of primitive invocations. The primitives bump these
// themselves, so a caller can audit what an operation actually did by taking
// a snapshot before and after it.
struct op_counts
{
  uint64_t prf_expansions = 0;
  uint64_t vector_sums = 0;
  uint64_t sign = 0;
  uint64_t psgn = 0;
  uint64_t psgn_fallbacks = 0;
  uint64_t verify = 0;
  uint64_t precmp_entries = 0;
  uint64_t sig_keygen = 0;
  uint64_t kem_keygen = 0;
  uint64_t encaps = 0;
  uint64_t decaps = 0;
  uint64_t sign_attempts = 0;
  // Work volume, for the cost model.
  uint64_t hashed_bytes = 0;
  uint64_t prf_words = 0;
  uint64_t sum_words = 0;
  uint64_t mask_draws = 0;     // y sampled and committed inside the signing loop
  uint64_t key_expansions = 0; // signing or verifying key prepared from its seed

  op_counts operator-(const op_counts& o) const
  {
    return { prf_expansions - o.prf_expansions,
             vector_sums - o.vector_sums,
             sign - o.sign,
             psgn - o.psgn,
             psgn_fallbacks - o.psgn_fallbacks,
             verify - o.verify,
             precmp_entries - o.precmp_entries,
             sig_keygen - o.sig_keygen,
             kem_keygen - o.kem_keygen,
             encaps - o.encaps,
             decaps - o.decaps,
             sign_attempts - o.sign_attempts,
             hashed_bytes - o.hashed_bytes,
             prf_words - o.prf_words,
             sum_words - o.sum_words,
             mask_draws - o.mask_draws,
             key_expansions - o.key_expansions };
  }

  op_counts& operator+=(const op_counts& o)
  {
    prf_expansions += o.prf_expansions;
    vector_sums += o.vector_sums;
    sign += o.sign;
    psgn += o.psgn;
    psgn_fallbacks += o.psgn_fallbacks;
    verify += o.verify;
    precmp_entries += o.precmp_entries;
    sig_keygen += o.sig_keygen;
    kem_keygen += o.kem_keygen;
    encaps += o.encaps;
    decaps += o.decaps;
    sign_attempts += o.sign_attempts;
    hashed_bytes += o.hashed_bytes;
    prf_words += o.prf_words;
    sum_words += o.sum_words;
    mask_draws += o.mask_draws;
    key_expansions += o.key_expansions;
    return *this;
  }

  bool operator==(const op_counts&) const = default;
};

inline op_counts&
thread_ops()
{
  static thread_local op_counts counts;
  return counts;
}

// Captures the delta of thread_ops() over its lifetime.
class op_scope
{
public:
  op_scope()
    : start_(thread_ops())
  {
  }
  op_counts delta() const { return thread_ops() - start_; }

private:
  op_counts start_;
};

}
