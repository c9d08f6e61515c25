#pragma once
#include <cmath>
#include <cstdint>
#include <string>

#include "beskar/common/errors.hpp"
#include "beskar/lattice/params.hpp"

namespace beskar::agg {

// Denominator of the participation threshold: the declared honest population
// |P_H| (as in the aggregation algorithm) or all n clients.
enum class alpha_basis
{
  honest,
  total,
};

struct protocol_config
{
  size_t n = 100;
  size_t k = 3;
  size_t d = 16000;
  uint64_t T = 5;
  double alpha = 0.5;
  size_t p_h = 0; // 0 means all n clients are declared honest
  alpha_basis basis = alpha_basis::honest;
  double quant_scale = 65536.0;
  double max_magnitude = 1.0;
  lattice::param_set params = lattice::param_set::paper;
  int sig_level = 2;
  int kem_level = 768;
  bool precompute = true;
  size_t precmp_entries = 0; // 0 derives N from the expected signing attempts
  double precmp_margin = 1.5;
  size_t shamir_threshold = 0; // 0 disables sharing of node secrets

  lattice::ring_params sig_params() const { return lattice::sig_params_for(params, sig_level); }
  lattice::kem_params kem_params() const { return lattice::kem_params_for(params, kem_level); }

  size_t honest_count() const { return p_h == 0 ? n : p_h; }

  double alpha_base() const { return basis == alpha_basis::honest ? static_cast<double>(honest_count()) : static_cast<double>(n); }

  // Participation check of the assisting nodes: refuse when |L| < alpha * base.
  bool meets_alpha(size_t listed) const { return !(static_cast<double>(listed) < alpha * alpha_base()); }

  // Precomputed entries per signer: expected attempts per signature times the
  // signatures it issues over T rounds, with margin.
  size_t precmp_count(size_t signs_per_round) const
  {
    if (precmp_entries > 0) {
      return precmp_entries;
    }
    const double expected = sig_params().expected_attempts() * static_cast<double>(signs_per_round * T);
    return static_cast<size_t>(std::ceil(expected * precmp_margin)) + 8;
  }

  void validate() const
  {
    if (n == 0) {
      throw parameter_error("need at least one client");
    }
    if (k == 0) {
      throw parameter_error("need at least one assisting node");
    }
    if (d == 0) {
      throw parameter_error("model dimension must be positive");
    }
    if (T == 0) {
      throw parameter_error("need at least one iteration");
    }
    if (!(alpha > 0 && alpha <= 1)) {
      throw parameter_error("alpha must lie in (0, 1]");
    }
    if (p_h > n) {
      throw parameter_error("declared honest count exceeds n");
    }
    if (!(quant_scale > 0) || !(max_magnitude > 0)) {
      throw parameter_error("quantization scale and magnitude must be positive");
    }
    if (static_cast<double>(n) * quant_scale * max_magnitude >= 2147483648.0) {
      throw parameter_error("n * quant_scale * max_magnitude must stay below 2^31");
    }
    if (shamir_threshold > k) {
      throw parameter_error("shamir threshold exceeds node count");
    }
    sig_params().validate();
    kem_params().validate();
  }
};

}
