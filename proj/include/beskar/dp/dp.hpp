#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "beskar/common/errors.hpp"

// Gaussian mechanism, Renyi-DP accounting and noise calibration.
namespace beskar::dp {

enum class placement
{
  none,
  ldp,
  cdp,
  both,
};

inline const char*
to_string(placement p)
{
  switch (p) {
    case placement::none:
      return "none";
    case placement::ldp:
      return "ldp";
    case placement::cdp:
      return "cdp";
    default:
      return "both";
  }
}

inline placement
parse_placement(std::string_view s)
{
  if (s == "none") {
    return placement::none;
  }
  if (s == "ldp") {
    return placement::ldp;
  }
  if (s == "cdp") {
    return placement::cdp;
  }
  if (s == "both") {
    return placement::both;
  }
  throw configuration_error("unknown DP placement '" + std::string(s) + "' (none, ldp, cdp, both)");
}

struct dp_config
{
  double epsilon = 10.0;
  double delta = 1e-5;
  double clip = 1.0;
  double sample_rate = 1.0;
  uint64_t steps = 1;
  dp::placement where = placement::none;

  void validate() const
  {
    if (!(epsilon > 0)) {
      throw configuration_error("epsilon must be positive");
    }
    if (!(delta > 0 && delta < 1)) {
      throw configuration_error("delta must lie in (0, 1)");
    }
    if (!(clip > 0)) {
      throw configuration_error("clip norm must be positive");
    }
    if (!(sample_rate > 0 && sample_rate <= 1)) {
      throw configuration_error("sample rate must lie in (0, 1]");
    }
    if (steps == 0) {
      throw configuration_error("need at least one noisy step");
    }
  }
};

inline double
l2_norm(std::span<const double> v)
{
  double s = 0;
  for (double x : v) {
    s += x * x;
  }
  return std::sqrt(s);
}

// v * min(1, c / |v|_2)
inline std::vector<double>
clip(std::span<const double> v, double c)
{
  if (!(c > 0)) {
    throw parameter_error("clip norm must be positive");
  }
  std::vector<double> out(v.begin(), v.end());
  const double norm = l2_norm(v);
  if (norm > c) {
    const double f = c / norm;
    for (auto& x : out) {
      x *= f;
    }
  }
  return out;
}

// v + N(0, (sigma * c)^2 I)
inline std::vector<double>
add_gaussian(std::span<const double> v, double sigma, double c, std::mt19937_64& rng)
{
  if (!(sigma > 0) || !(c > 0)) {
    throw parameter_error("noise multiplier and clip norm must be positive");
  }
  std::normal_distribution<double> g(0.0, sigma * c);
  std::vector<double> out(v.begin(), v.end());
  for (auto& x : out) {
    x += g(rng);
  }
  return out;
}

// Renyi orders searched by the accountant.
inline const std::vector<double>&
alpha_grid()
{
  static const std::vector<double> grid = [] {
    std::vector<double> g = { 1.25, 1.5, 1.75 };
    for (int a = 2; a <= 64; a++) {
      g.push_back(a);
    }
    g.insert(g.end(), { 128, 256, 512 });
    return g;
  }();
  return grid;
}

// RDP of one Gaussian release at order alpha. For sample_rate < 1 this is
// the upper bound q^2 alpha / sigma^2, capped by the unsampled value since
// subsampling never costs more than releasing on the full data.
inline double
rdp_gaussian(double alpha, double sigma, double sample_rate = 1.0)
{
  if (!(alpha > 1) || !(sigma > 0)) {
    throw parameter_error("RDP needs alpha > 1 and sigma > 0");
  }
  const double full = alpha / (2 * sigma * sigma);
  if (sample_rate >= 1) {
    return full;
  }
  return std::min(full, sample_rate * sample_rate * alpha / (sigma * sigma));
}

struct rdp_point
{
  double alpha = 0;
  double rdp = 0; // composed over all steps
  double epsilon = 0; // (epsilon, delta) conversion at this order
};

struct privacy_spent
{
  double epsilon = 0;
  double delta = 0;
  double best_alpha = 0;
  std::vector<rdp_point> curve;
};

inline privacy_spent
account(uint64_t steps, double sample_rate, double sigma, double delta)
{
  if (!(delta > 0 && delta < 1)) {
    throw parameter_error("delta must lie in (0, 1)");
  }
  privacy_spent out;
  out.delta = delta;
  out.epsilon = std::numeric_limits<double>::infinity();
  const double log_inv_delta = std::log(1 / delta);
  for (double a : alpha_grid()) {
    rdp_point p;
    p.alpha = a;
    p.rdp = static_cast<double>(steps) * rdp_gaussian(a, sigma, sample_rate);
    p.epsilon = p.rdp + log_inv_delta / (a - 1);
    if (p.epsilon < out.epsilon) {
      out.epsilon = p.epsilon;
      out.best_alpha = a;
    }
    out.curve.push_back(p);
  }
  return out;
}

inline constexpr double NOISE_TOLERANCE = 0.01;
inline constexpr int NOISE_SEARCH_LIMIT = 64;

struct noise_multiplier
{
  double sigma = 0;
  double epsilon = 0; // spent at sigma
  int iterations = 0;
};

// Smallest sigma (to relative tolerance 0.01) whose accounted epsilon meets
// the target: expand an upper bound by doubling, then bisect.
inline noise_multiplier
find_noise_multiplier(const dp_config& cfg)
{
  cfg.validate();
  auto eps_at = [&](double s) { return account(cfg.steps, cfg.sample_rate, s, cfg.delta).epsilon; };
  int it = 0;
  double hi = 1.0;
  while (eps_at(hi) > cfg.epsilon) {
    if (++it > NOISE_SEARCH_LIMIT) {
      throw configuration_error("noise multiplier search did not converge: epsilon " + std::to_string(cfg.epsilon) +
                                " unreachable at delta " + std::to_string(cfg.delta));
    }
    hi *= 2;
  }
  double lo = hi / 2;
  while (eps_at(lo) <= cfg.epsilon) {
    if (++it > NOISE_SEARCH_LIMIT) {
      throw configuration_error("noise multiplier search did not converge: epsilon " + std::to_string(cfg.epsilon) +
                                " is met by vanishing noise");
    }
    hi = lo;
    lo /= 2;
  }
  // Invariant: eps(lo) > target >= eps(hi).
  while (hi - lo > NOISE_TOLERANCE * hi) {
    if (++it > NOISE_SEARCH_LIMIT) {
      throw configuration_error("noise multiplier bisection did not converge");
    }
    const double mid = (lo + hi) / 2;
    if (eps_at(mid) <= cfg.epsilon) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return { hi, eps_at(hi), it };
}

enum class threat_model
{
  tm1,
  tm2,
  tm3,
};

enum class round_stage
{
  intermediate,
  final,
};

struct noise_plan
{
  bool client_noise = false;
  bool server_noise = false;
  bool operator==(const noise_plan&) const = default;
};

// TM1 protects client gradients from the server: local noise only. TM2 and
// TM3 also protect intermediate and final models: local and central noise.
// The placement is the same at every stage of training.
inline noise_plan
apply_policy(threat_model tm, round_stage = round_stage::intermediate)
{
  switch (tm) {
    case threat_model::tm1:
      return { true, false };
    case threat_model::tm2:
    case threat_model::tm3:
      return { true, true };
  }
  return { true, true };
}

inline placement
placement_for(threat_model tm)
{
  const auto p = apply_policy(tm);
  return p.server_noise ? placement::both : placement::ldp;
}

// A round under local DP is as private as its weakest participant.
inline double
ldp_round_budget(std::span<const double> client_epsilons)
{
  if (client_epsilons.empty()) {
    throw parameter_error("no participating clients");
  }
  return *std::max_element(client_epsilons.begin(), client_epsilons.end());
}

}
