#pragma once
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "beskar/agg/config.hpp"
#include "beskar/common/errors.hpp"
#include "beskar/dp/dp.hpp"

// Simulation settings and the key = value config file.
//
//   # comment
//   clients = 100
//   nodes = 3
//   dp = cdp
//
// Keys: clients nodes dim rounds dropout alpha honest alpha_basis
// quant_scale max_magnitude precompute precmp_entries params sig_level
// kem_level shamir_threshold drop_nodes node_drop_round dp epsilon delta
// clip sample_rate dp_steps seed timing out trace.
// drop_nodes is a comma-separated list of node ids.
namespace beskar::sim {

enum class timing_mode
{
  measured, // thread CPU time of each entity step
  model,    // deterministic cost model over counted primitive work
};

struct sim_config
{
  agg::protocol_config protocol;
  double dropout_rate = 0.0;
  std::vector<uint32_t> drop_nodes;
  uint64_t node_drop_round = 0; // 0: nodes in drop_nodes are gone every round
  dp::dp_config dp;
  uint64_t dp_steps = 0; // 0: one noisy release per round
  uint64_t seed = 1;
  timing_mode timing = timing_mode::measured;
  std::string out;
  std::string trace;

  void validate() const
  {
    protocol.validate();
    if (!(dropout_rate >= 0 && dropout_rate < 1)) {
      throw configuration_error("dropout rate must lie in [0, 1)");
    }
    for (uint32_t j : drop_nodes) {
      if (j >= protocol.k) {
        throw configuration_error("dropped node " + std::to_string(j) + " does not exist");
      }
    }
    if (dp.where != dp::placement::none) {
      dp.validate();
    }
  }

  uint64_t noisy_steps() const { return dp_steps == 0 ? protocol.T : dp_steps; }
};

namespace detail {

inline std::string
trim(std::string s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template<typename T>
T
parse_number(const std::string& key, const std::string& v)
{
  T out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw configuration_error("invalid value '" + v + "' for " + key);
  }
  return out;
}

inline bool
parse_switch(const std::string& key, const std::string& v)
{
  if (v == "on" || v == "true" || v == "1") {
    return true;
  }
  if (v == "off" || v == "false" || v == "0") {
    return false;
  }
  throw configuration_error("invalid value '" + v + "' for " + key + " (on or off)");
}

}

// Applies one setting; unknown keys are errors.
inline void
apply_setting(sim_config& c, const std::string& key, const std::string& value)
{
  using detail::parse_number;
  auto& p = c.protocol;
  if (key == "clients") {
    p.n = parse_number<size_t>(key, value);
  } else if (key == "nodes") {
    p.k = parse_number<size_t>(key, value);
  } else if (key == "dim") {
    p.d = parse_number<size_t>(key, value);
  } else if (key == "rounds") {
    p.T = parse_number<uint64_t>(key, value);
  } else if (key == "dropout") {
    c.dropout_rate = parse_number<double>(key, value);
  } else if (key == "alpha") {
    p.alpha = parse_number<double>(key, value);
  } else if (key == "honest") {
    p.p_h = parse_number<size_t>(key, value);
  } else if (key == "alpha_basis") {
    if (value == "honest") {
      p.basis = agg::alpha_basis::honest;
    } else if (value == "total") {
      p.basis = agg::alpha_basis::total;
    } else {
      throw configuration_error("alpha_basis must be honest or total");
    }
  } else if (key == "quant_scale") {
    p.quant_scale = parse_number<double>(key, value);
  } else if (key == "max_magnitude") {
    p.max_magnitude = parse_number<double>(key, value);
  } else if (key == "precompute") {
    p.precompute = detail::parse_switch(key, value);
  } else if (key == "precmp_entries") {
    p.precmp_entries = parse_number<size_t>(key, value);
  } else if (key == "params") {
    p.params = lattice::parse_param_set(value);
  } else if (key == "sig_level") {
    p.sig_level = parse_number<int>(key, value);
  } else if (key == "kem_level") {
    p.kem_level = parse_number<int>(key, value);
  } else if (key == "shamir_threshold") {
    p.shamir_threshold = parse_number<size_t>(key, value);
  } else if (key == "drop_nodes") {
    c.drop_nodes.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = detail::trim(item);
      if (!item.empty()) {
        c.drop_nodes.push_back(parse_number<uint32_t>(key, item));
      }
    }
  } else if (key == "node_drop_round") {
    c.node_drop_round = parse_number<uint64_t>(key, value);
  } else if (key == "dp") {
    c.dp.where = dp::parse_placement(value);
  } else if (key == "epsilon") {
    c.dp.epsilon = parse_number<double>(key, value);
  } else if (key == "delta") {
    c.dp.delta = parse_number<double>(key, value);
  } else if (key == "clip") {
    c.dp.clip = parse_number<double>(key, value);
  } else if (key == "sample_rate") {
    c.dp.sample_rate = parse_number<double>(key, value);
  } else if (key == "dp_steps") {
    c.dp_steps = parse_number<uint64_t>(key, value);
  } else if (key == "seed") {
    c.seed = parse_number<uint64_t>(key, value);
  } else if (key == "timing") {
    if (value == "measured") {
      c.timing = timing_mode::measured;
    } else if (value == "model") {
      c.timing = timing_mode::model;
    } else {
      throw configuration_error("timing must be measured or model");
    }
  } else if (key == "out") {
    c.out = value;
  } else if (key == "trace") {
    c.trace = value;
  } else {
    throw configuration_error("unknown setting '" + key + "'");
  }
}

inline std::map<std::string, std::string>
parse_settings(std::istream& in, const std::string& origin = "config")
{
  std::map<std::string, std::string> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.resize(hash);
    }
    line = detail::trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw configuration_error(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key.empty()) {
      throw configuration_error(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    out[key] = value;
  }
  return out;
}

inline void
load_config_file(sim_config& c, const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw configuration_error("cannot open config file " + path);
  }
  for (const auto& [k, v] : parse_settings(in, path)) {
    apply_setting(c, k, v);
  }
}

}
