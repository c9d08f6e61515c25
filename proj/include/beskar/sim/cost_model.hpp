#pragma once
#include "beskar/common/op_counts.hpp"
#include "beskar/lattice/params.hpp"

// Deterministic timing: counted primitive work times fixed unit costs. Unit
// costs are single-core thread-CPU measurements of this implementation
// (-O2, x86-64) and only serve to make simulated time reproducible; ratios
// between them, not their absolute values, carry meaning.
namespace beskar::sim {

struct unit_costs
{
  double prf_word;
  double sum_word;
  double hashed_byte;
  double sig_keygen;
  double key_expansion;
  double mask_draw; // sample y, commit, pack w1
  double sign_attempt; // challenge, z and hint checks
  double precmp_entry;
  double verify;
  double kem_keygen;
  double encaps;
  double decaps;
};

// Microseconds.
inline constexpr unit_costs PAPER_COSTS = {
  0.0452, 0.00075, 0.0105, 716.0, 418.0, 168.0, 58.6, 168.0, 108.0, 358.0, 445.0, 507.0,
};

inline constexpr unit_costs DESK_COSTS = {
  0.0452, 0.00080, 0.0110, 109.0, 25.5, 66.2, 11.2, 65.6, 60.7, 108.0, 142.0, 151.0,
};

inline const unit_costs&
costs_for(lattice::param_set p)
{
  return p == lattice::param_set::paper ? PAPER_COSTS : DESK_COSTS;
}

inline double
model_us(const op_counts& ops, const unit_costs& c)
{
  // precmp_one draws its own mask outside the signing loop, so precmp
  // entries and mask_draws never overlap.
  return static_cast<double>(ops.prf_words) * c.prf_word + static_cast<double>(ops.sum_words) * c.sum_word +
         static_cast<double>(ops.hashed_bytes) * c.hashed_byte + static_cast<double>(ops.sig_keygen) * c.sig_keygen +
         static_cast<double>(ops.key_expansions) * c.key_expansion +
         static_cast<double>(ops.mask_draws) * c.mask_draw + static_cast<double>(ops.sign_attempts) * c.sign_attempt +
         static_cast<double>(ops.precmp_entries) * c.precmp_entry + static_cast<double>(ops.verify) * c.verify +
         static_cast<double>(ops.kem_keygen) * c.kem_keygen + static_cast<double>(ops.encaps) * c.encaps +
         static_cast<double>(ops.decaps) * c.decaps;
}

}
