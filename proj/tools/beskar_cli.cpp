#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beskar/beskar.hpp"

using namespace beskar;

namespace {

enum exit_code
{
  exit_ok = 0,
  exit_config = 1,
  exit_bottom = 2,
  exit_self_check = 3,
  exit_io = 4,
};

// Flags mirror config-file keys. Each is kept as text and applied after
// the config file, so flags override it.
struct flag_set
{
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help)
  {
    options[key] = app->add_option(flag, values[key], help);
  }

  void apply(sim::sim_config& cfg) const
  {
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) {
        sim::apply_setting(cfg, key, values.at(key));
      }
    }
  }
};

void
add_sim_flags(CLI::App* app, flag_set& f, std::string& config_path)
{
  app->add_option("--config", config_path, "key = value settings file; flags override it");
  f.add(app, "--clients", "clients", "number of clients n");
  f.add(app, "--nodes", "nodes", "number of assisting nodes k");
  f.add(app, "--dim", "dim", "model dimension d");
  f.add(app, "--rounds", "rounds", "training iterations T");
  f.add(app, "--dropout", "dropout", "fraction of clients absent each round, in [0, 1)");
  f.add(app, "--alpha", "alpha", "participation threshold");
  f.add(app, "--dp", "dp", "noise placement: none, ldp, cdp, both");
  f.add(app, "--epsilon", "epsilon", "privacy budget");
  f.add(app, "--delta", "delta", "privacy failure probability");
  f.add(app, "--clip", "clip", "L2 clipping norm");
  f.add(app, "--sample-rate", "sample_rate", "client sampling rate used by the accountant");
  f.add(app, "--precompute", "precompute", "on or off");
  f.add(app, "--params", "params", "desk or paper");
  f.add(app, "--seed", "seed", "master seed");
  f.add(app, "--out", "out", "metrics CSV path");
  f.add(app, "--trace", "trace", "message trace path");
  f.add(app, "--timing", "timing", "measured or model");
  f.add(app, "--shamir-threshold", "shamir_threshold", "share node secrets with this threshold (0: off)");
  f.add(app, "--drop-nodes", "drop_nodes", "comma-separated node ids that go offline");
}

sim::sim_config
build_config(const std::string& config_path, const flag_set& f)
{
  sim::sim_config cfg;
  if (!config_path.empty()) {
    sim::load_config_file(cfg, config_path);
  }
  f.apply(cfg);
  cfg.validate();
  return cfg;
}

int
run_simulate(const sim::sim_config& cfg)
{
  const auto res = sim::run_simulation(cfg);
  const auto& pc = cfg.protocol;
  std::printf("n=%zu k=%zu d=%zu T=%llu params=%s precompute=%s dp=%s",
              pc.n,
              pc.k,
              pc.d,
              static_cast<unsigned long long>(pc.T),
              std::string(lattice::to_string(pc.params)).c_str(),
              pc.precompute ? "on" : "off",
              dp::to_string(cfg.dp.where));
  if (res.sigma > 0) {
    std::printf(" sigma=%.4f", res.sigma);
  }
  std::printf("\n");
  for (const auto& r : res.rounds) {
    std::printf("round %llu: %s participants=%zu dropped=%zu",
                static_cast<unsigned long long>(r.t),
                agg::to_string(r.outcome),
                r.participants,
                r.dropped_clients.size());
    if (!r.dropped_nodes.empty()) {
      std::printf(" dropped_nodes=%zu%s", r.dropped_nodes.size(), r.recovery_used ? " (recovered)" : "");
    }
    if (cfg.dp.where != dp::placement::none) {
      std::printf(" epsilon_spent=%.4f", r.epsilon_spent);
    }
    std::printf(" time_us=%.0f", r.end_us - r.start_us);
    if (!r.diagnostic.empty()) {
      std::printf(" [%s]", r.diagnostic.c_str());
    }
    std::printf("\n");
  }
  int rc = res.all_ok() ? exit_ok : exit_bottom;
  if (!cfg.out.empty()) {
    std::string err;
    if (!sim::export_metrics(res.rows, cfg.out, &err)) {
      std::fprintf(stderr, "error: %s\n", err.c_str());
      rc = rc == exit_ok ? exit_io : rc;
    }
  }
  if (!cfg.trace.empty()) {
    std::ofstream out(cfg.trace);
    sim::write_trace(out, res.trace);
    if (!out) {
      std::fprintf(stderr, "error: cannot write trace to %s\n", cfg.trace.c_str());
      rc = rc == exit_ok ? exit_io : rc;
    }
  }
  return rc;
}

int
run_bench(const sim::sim_config& cfg)
{
  const auto rep = sim::bench_precompute(cfg);
  std::printf("%-8s %14s %14s %10s\n", "entity", "without_us", "with_us", "speedup");
  std::printf("%-8s %14.1f %14.1f %10.2f\n",
              "client",
              rep.without_precompute.client_us,
              rep.with_precompute.client_us,
              rep.client_speedup);
  std::printf(
    "%-8s %14.1f %14.1f %10.2f\n", "node", rep.without_precompute.node_us, rep.with_precompute.node_us, rep.node_speedup);
  std::printf("%-8s %14.1f %14.1f %10.2f\n",
              "server",
              rep.without_precompute.server_us,
              rep.with_precompute.server_us,
              rep.server_speedup);
  return exit_ok;
}

}

int
main(int argc, char** argv)
{
  CLI::App app{ "Post-quantum secure aggregation simulator" };
  app.require_subcommand(1);

  std::string sim_config_path;
  flag_set sim_flags;
  auto* simulate = app.add_subcommand("simulate", "run setup and T aggregation rounds");
  add_sim_flags(simulate, sim_flags, sim_config_path);

  std::string bench_config_path;
  flag_set bench_flags;
  auto* bench = app.add_subcommand("bench-precompute", "aggregation-phase times with and without precomputation");
  add_sim_flags(bench, bench_flags, bench_config_path);

  dp::dp_config dpc;
  auto* calibrate = app.add_subcommand("dp-calibrate", "find the Gaussian noise multiplier for a privacy budget");
  calibrate->add_option("--epsilon", dpc.epsilon, "privacy budget")->required();
  calibrate->add_option("--delta", dpc.delta, "privacy failure probability");
  calibrate->add_option("--clip", dpc.clip, "L2 clipping norm");
  calibrate->add_option("--sample-rate", dpc.sample_rate, "client sampling rate");
  calibrate->add_option("--steps", dpc.steps, "number of noisy releases");
  bool show_curve = false;
  calibrate->add_flag("--curve", show_curve, "print the RDP curve at the chosen sigma");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      return run_simulate(build_config(sim_config_path, sim_flags));
    }
    if (*bench) {
      return run_bench(build_config(bench_config_path, bench_flags));
    }
    if (*calibrate) {
      const auto nm = dp::find_noise_multiplier(dpc);
      std::printf("sigma=%.6f noise_stddev=%.6f epsilon=%.6f delta=%g iterations=%d\n",
                  nm.sigma,
                  nm.sigma * dpc.clip,
                  nm.epsilon,
                  dpc.delta,
                  nm.iterations);
      if (show_curve) {
        for (const auto& p : dp::account(dpc.steps, dpc.sample_rate, nm.sigma, dpc.delta).curve) {
          std::printf("alpha=%g rdp=%.6f epsilon=%.6f\n", p.alpha, p.rdp, p.epsilon);
        }
      }
      return exit_ok;
    }
  } catch (const sim::self_check_failure& e) {
    std::fprintf(stderr, "self-check failure: %s\n", e.what());
    return exit_self_check;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_config;
  }
  return exit_ok;
}
