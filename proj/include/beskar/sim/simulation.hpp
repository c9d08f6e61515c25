#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "beskar/agg/protocol.hpp"
#include "beskar/common/timing.hpp"
#include "beskar/dp/dp.hpp"
#include "beskar/sim/config.hpp"
#include "beskar/sim/cost_model.hpp"
#include "beskar/sim/events.hpp"
#include "beskar/sim/metrics.hpp"

// Discrete-event run of setup followed by T aggregation rounds. Network
// latency is not modeled: a message arrives when its sender finishes the
// step that produced it, and each phase starts once the previous one has
// delivered everything.
namespace beskar::sim {

// The decoded aggregate disagreed with the plaintext oracle.
class self_check_failure : public protocol_error
{
public:
  using protocol_error::protocol_error;
};

struct round_summary
{
  uint64_t t = 0;
  agg::round_outcome outcome = agg::round_outcome::ok;
  std::string diagnostic;
  size_t participants = 0; // accepted by the server
  std::vector<uint32_t> dropped_clients;
  std::vector<uint32_t> dropped_nodes;
  bool recovery_used = false;
  double max_abs_error = 0; // decoded vs float sum, before central noise
  double epsilon_spent = 0;
  double start_us = 0;
  double end_us = 0;
  std::vector<double> aggregate; // after central noise; empty on bottom
  std::vector<int64_t> encoded_sum; // decoded protocol output, signed
};

struct sim_result
{
  std::vector<metric_row> rows;
  std::vector<trace_line> trace;
  std::vector<round_summary> rounds;
  double sigma = 0; // 0 without DP

  bool all_ok() const
  {
    return std::all_of(
      rounds.begin(), rounds.end(), [](const round_summary& r) { return r.outcome == agg::round_outcome::ok; });
  }
};

namespace detail {

inline uint64_t
seed_u64(uint64_t master, std::string_view label, uint64_t a, uint64_t b)
{
  const auto s = agg::derive_seed(master, label, a, b);
  uint64_t v = 0;
  for (int i = 0; i < 8; i++) {
    v |= static_cast<uint64_t>(s[i]) << (8 * i);
  }
  return v;
}

// Plaintext model update of client i at iteration t, uniform in
// [-magnitude, magnitude].
inline std::vector<double>
synthetic_update(uint64_t master, uint32_t i, uint64_t t, size_t d, double magnitude)
{
  std::mt19937_64 rng(seed_u64(master, "update", i, t));
  std::uniform_real_distribution<double> u(-magnitude, magnitude);
  std::vector<double> w(d);
  for (auto& v : w) {
    v = u(rng);
  }
  return w;
}

inline uint64_t
restarts(const sig::sign_stats& s)
{
  return s.attempts > 0 ? s.attempts - 1 : 0;
}

inline std::vector<uint32_t>
sample_dropouts(uint64_t master, uint64_t t, size_t n, double rate)
{
  const auto m = static_cast<size_t>(std::llround(rate * static_cast<double>(n)));
  std::vector<uint32_t> ids(n);
  for (size_t i = 0; i < n; i++) {
    ids[i] = static_cast<uint32_t>(i);
  }
  std::mt19937_64 rng(seed_u64(master, "dropout", t, 0));
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(std::min(m, n));
  std::sort(ids.begin(), ids.end());
  return ids;
}

struct step_meter
{
  op_scope scope;
  cpu_stopwatch watch;
};

}

inline sim_result
run_simulation(const sim_config& cfg)
{
  cfg.validate();
  const auto& pc = cfg.protocol;
  const auto& costs = costs_for(pc.params);
  const bool central_noise = cfg.dp.where == dp::placement::cdp || cfg.dp.where == dp::placement::both;
  const bool local_noise = cfg.dp.where == dp::placement::ldp || cfg.dp.where == dp::placement::both;
  const bool any_dp = cfg.dp.where != dp::placement::none;

  sim_result res;
  if (any_dp) {
    auto dc = cfg.dp;
    dc.steps = cfg.noisy_steps();
    res.sigma = dp::find_noise_multiplier(dc).sigma;
  }
  auto pick = [&](double measured, double model) { return cfg.timing == timing_mode::measured ? measured : model; };
  auto finish_row = [&](metric_row row, const detail::step_meter& m) {
    row.measured_us = m.watch.elapsed_us();
    row.ops = m.scope.delta();
    row.model_us = model_us(row.ops, costs);
    row.compute_us = pick(row.measured_us, row.model_us);
    return row;
  };

  // Setup.
  auto s = agg::setup_all(pc, cfg.seed);
  {
    const auto& rep = s.report;
    std::map<std::pair<int, uint32_t>, uint64_t> sent;
    for (const auto& m : rep.messages) {
      sent[{ static_cast<int>(m.from.kind), m.from.id }] += m.bytes;
    }
    auto setup_row = [&](agg::entity_kind kind, uint32_t id, double us, const op_counts& ops) {
      metric_row row;
      row.round = 0;
      row.kind = kind;
      row.id = id;
      row.phase = "setup";
      row.measured_us = us;
      row.ops = ops;
      row.model_us = model_us(ops, costs);
      row.compute_us = pick(us, row.model_us);
      row.bytes_out = sent[{ static_cast<int>(kind), id }];
      row.outcome = "ok";
      res.rows.push_back(row);
      return row.compute_us;
    };
    std::map<std::pair<int, uint32_t>, double> done;
    for (uint32_t i = 0; i < pc.n; i++) {
      done[{ 0, i }] = setup_row(agg::entity_kind::client, i, rep.client_us[i], rep.client_ops[i]);
    }
    for (uint32_t j = 0; j < pc.k; j++) {
      done[{ 1, j }] = setup_row(agg::entity_kind::node, j, rep.node_us[j], rep.node_ops[j]);
    }
    done[{ 2, 0 }] = setup_row(agg::entity_kind::server, 0, rep.server_us, rep.server_ops);
    for (const auto& m : rep.messages) {
      res.trace.push_back({ 0,
                            entity_label(m.from.kind, m.from.id),
                            entity_label(m.to.kind, m.to.id),
                            m.phase,
                            m.bytes,
                            done[{ static_cast<int>(m.from.kind), m.from.id }] });
    }
  }

  event_queue q;
  double clock = 0;
  for (const auto& r : res.rows) {
    clock = std::max(clock, r.compute_us);
  }

  for (uint64_t t = 1; t <= pc.T; t++) {
    round_summary sum;
    sum.t = t;
    sum.start_us = clock;
    sum.dropped_clients = detail::sample_dropouts(cfg.seed, t, pc.n, cfg.dropout_rate);
    if (cfg.node_drop_round == 0 || cfg.node_drop_round == t) {
      sum.dropped_nodes = cfg.drop_nodes;
      std::sort(sum.dropped_nodes.begin(), sum.dropped_nodes.end());
      sum.dropped_nodes.erase(std::unique(sum.dropped_nodes.begin(), sum.dropped_nodes.end()),
                              sum.dropped_nodes.end());
    }
    const std::set<uint32_t> client_gone(sum.dropped_clients.begin(), sum.dropped_clients.end());
    const std::set<uint32_t> node_gone(sum.dropped_nodes.begin(), sum.dropped_nodes.end());
    const size_t first_row = res.rows.size();

    std::map<uint32_t, std::vector<double>> plain;
    std::vector<agg::masked_update> server_inbox;
    std::vector<std::vector<agg::participation_msg>> node_inbox(pc.k);
    std::vector<std::optional<agg::aggregated_mask>> masks(pc.k);
    double phase_end = clock;

    // Masking phase.
    for (uint32_t i = 0; i < pc.n; i++) {
      if (client_gone.count(i)) {
        continue;
      }
      q.at(clock, [&, i] {
        auto w = detail::synthetic_update(cfg.seed, i, t, pc.d, pc.max_magnitude);
        if (any_dp) {
          w = dp::clip(w, cfg.dp.clip);
        }
        if (local_noise) {
          std::mt19937_64 rng(detail::seed_u64(cfg.seed, "ldp-noise", i, t));
          w = dp::add_gaussian(w, res.sigma, cfg.dp.clip, rng);
        }
        const detail::step_meter meter;
        auto m = agg::client_round(s.clients[i], t, w);
        metric_row row;
        row.round = t;
        row.kind = agg::entity_kind::client;
        row.id = i;
        row.phase = "masking";
        row.bytes_out = agg::frame_size(m.update) + pc.k * agg::frame_size(m.participation);
        row.sign_restarts = detail::restarts(m.update_stats) + detail::restarts(m.participation_stats);
        row = finish_row(std::move(row), meter);
        res.rows.push_back(row);
        plain[i] = std::move(w);

        const double sent_at = q.now() + row.compute_us;
        phase_end = std::max(phase_end, sent_at);
        const std::string me = entity_label(agg::entity_kind::client, i);
        q.at(sent_at, [&, me, sent_at, u = std::move(m.update)]() mutable {
          res.trace.push_back({ t, me, "server", "masking", agg::frame_size(u), sent_at });
          server_inbox.push_back(std::move(u));
        });
        for (uint32_t j = 0; j < pc.k; j++) {
          q.at(sent_at, [&, me, sent_at, j, p = m.participation] {
            res.trace.push_back(
              { t, me, entity_label(agg::entity_kind::node, j), "masking", agg::frame_size(p), sent_at });
            if (!node_gone.count(j)) {
              node_inbox[j].push_back(p);
            }
          });
        }
      });
    }
    q.run();

    // Node aggregation.
    const double nodes_start = phase_end;
    for (uint32_t j = 0; j < pc.k; j++) {
      if (node_gone.count(j)) {
        continue;
      }
      q.at(nodes_start, [&, j] {
        const detail::step_meter meter;
        auto r = agg::node_round(s.nodes[j], t, node_inbox[j]);
        metric_row row;
        row.round = t;
        row.kind = agg::entity_kind::node;
        row.id = j;
        row.phase = "aggregation";
        row.bytes_out = r.msg ? agg::frame_size(*r.msg) : 0;
        row.sign_restarts = detail::restarts(r.stats);
        row = finish_row(std::move(row), meter);
        res.rows.push_back(row);
        const double sent_at = q.now() + row.compute_us;
        phase_end = std::max(phase_end, sent_at);
        if (r.msg) {
          q.at(sent_at, [&, j, sent_at, msg = std::move(*r.msg)]() mutable {
            res.trace.push_back({ t,
                                  entity_label(agg::entity_kind::node, j),
                                  "server",
                                  "aggregation",
                                  agg::frame_size(msg),
                                  sent_at });
            masks[j] = std::move(msg);
          });
        }
      });
    }
    q.run();

    // Surviving nodes stand in for dropped ones when shares exist.
    if (!node_gone.empty() && pc.shamir_threshold > 0) {
      std::vector<agg::node_state*> survivors;
      for (uint32_t j = 0; j < pc.k; j++) {
        if (!node_gone.count(j)) {
          survivors.push_back(&s.nodes[j]);
        }
      }
      const double rec_start = phase_end;
      for (uint32_t dropped : sum.dropped_nodes) {
        q.at(rec_start, [&, dropped] {
          sum.recovery_used = true;
          const detail::step_meter meter;
          auto rec = agg::recover_node_mask(survivors, dropped, t);
          metric_row row;
          row.round = t;
          row.kind = agg::entity_kind::node;
          row.id = survivors.empty() ? 0 : survivors.front()->id;
          row.phase = "recovery";
          row.bytes_out = rec.msg ? agg::frame_size(*rec.msg) : 0;
          row = finish_row(std::move(row), meter);
          res.rows.push_back(row);
          for (const auto& m : rec.messages) {
            res.trace.push_back({ t,
                                  entity_label(m.from.kind, m.from.id),
                                  entity_label(m.to.kind, m.to.id),
                                  "recovery",
                                  m.bytes,
                                  q.now() });
            metric_row helper;
            helper.round = t;
            helper.kind = agg::entity_kind::node;
            helper.id = m.from.id;
            helper.phase = "recovery";
            helper.bytes_out = m.bytes;
            res.rows.push_back(helper);
          }
          const double sent_at = q.now() + row.compute_us;
          phase_end = std::max(phase_end, sent_at);
          if (rec.msg) {
            res.trace.push_back(
              { t, entity_label(agg::entity_kind::node, row.id), "server", "recovery", agg::frame_size(*rec.msg), sent_at });
            masks[dropped] = std::move(rec.msg);
          } else if (sum.diagnostic.empty()) {
            sum.diagnostic = rec.diagnostic;
          }
        });
      }
      q.run();
    }

    // Server finalization.
    std::optional<agg::finalize_result> fin;
    q.at(phase_end, [&] {
      // Arrival order depends on simulated timing; verification does not.
      std::sort(server_inbox.begin(), server_inbox.end(), [](const auto& a, const auto& b) {
        return a.sender < b.sender;
      });
      const detail::step_meter meter;
      fin = agg::server_finalize(s.server, t, server_inbox, masks);
      metric_row row;
      row.round = t;
      row.kind = agg::entity_kind::server;
      row.id = 0;
      row.phase = "finalize";
      row.bytes_out = fin->broadcast ? agg::frame_size(*fin->broadcast) : 0;
      row = finish_row(std::move(row), meter);
      res.rows.push_back(row);
      const double sent_at = q.now() + row.compute_us;
      phase_end = std::max(phase_end, sent_at);
      if (fin->broadcast) {
        res.trace.push_back({ t, "server", "clients", "finalize", agg::frame_size(*fin->broadcast), sent_at });
      }
    });
    q.run();
    clock = phase_end;
    sum.end_us = clock;
    sum.outcome = fin->outcome;
    sum.participants = fin->list.size();
    if (!fin->diagnostic.empty()) {
      sum.diagnostic = sum.diagnostic.empty() ? fin->diagnostic : sum.diagnostic + "; " + fin->diagnostic;
    }

    const bool faults = !node_gone.empty();
    if (!faults && (fin->outcome == agg::round_outcome::bottom_mismatch ||
                    fin->outcome == agg::round_outcome::bottom_invalid_node ||
                    fin->outcome == agg::round_outcome::bottom_missing_node)) {
      throw self_check_failure("round " + std::to_string(t) + " failed without injected faults: " +
                               fin->diagnostic);
    }

    if (fin->outcome == agg::round_outcome::ok) {
      // Oracle: every accepted client, exactly the clients that stayed.
      std::vector<uint32_t> expect;
      for (const auto& [i, w] : plain) {
        expect.push_back(i);
      }
      if (fin->list != expect) {
        throw self_check_failure("round " + std::to_string(t) + ": server accepted " +
                                 std::to_string(fin->list.size()) + " clients, " + std::to_string(expect.size()) +
                                 " participated");
      }
      std::vector<int64_t> oracle(pc.d, 0);
      std::vector<double> fsum(pc.d, 0);
      for (const auto& [i, w] : plain) {
        for (size_t x = 0; x < pc.d; x++) {
          oracle[x] += std::llround(w[x] * pc.quant_scale);
          fsum[x] += w[x];
        }
      }
      for (size_t x = 0; x < pc.d; x++) {
        const int64_t got = static_cast<int32_t>(fin->sum[x]);
        if (got != oracle[x]) {
          std::ostringstream dump;
          dump << "self-check failed in round " << t << " at coordinate " << x << ": decoded " << got
               << ", oracle " << oracle[x] << "; participants " << expect.size() << ", dropped clients "
               << sum.dropped_clients.size() << ", dropped nodes " << sum.dropped_nodes.size();
          throw self_check_failure(dump.str());
        }
        sum.max_abs_error = std::max(sum.max_abs_error, std::abs(fin->w[x] - fsum[x]));
      }
      sum.encoded_sum.resize(pc.d);
      for (size_t x = 0; x < pc.d; x++) {
        sum.encoded_sum[x] = static_cast<int32_t>(fin->sum[x]);
      }
      sum.aggregate = fin->w;
      if (central_noise) {
        std::mt19937_64 rng(detail::seed_u64(cfg.seed, "cdp-noise", t, 0));
        sum.aggregate = dp::add_gaussian(sum.aggregate, res.sigma, cfg.dp.clip, rng);
      }
    }
    if (any_dp) {
      const uint64_t releases = std::min<uint64_t>(t, cfg.noisy_steps());
      const double spent = dp::account(releases, cfg.dp.sample_rate, res.sigma, cfg.dp.delta).epsilon;
      if (local_noise && !plain.empty()) {
        // Every client runs the same mechanism, so the weakest is any of them.
        const std::vector<double> per_client(plain.size(), spent);
        sum.epsilon_spent = dp::ldp_round_budget(per_client);
      } else {
        sum.epsilon_spent = spent;
      }
    }
    for (size_t r = first_row; r < res.rows.size(); r++) {
      res.rows[r].outcome = agg::to_string(sum.outcome);
    }
    res.rounds.push_back(std::move(sum));
  }
  return res;
}

// Per-phase mean compute times of one run.
struct phase_times
{
  double client_us = 0;
  double node_us = 0;
  double server_us = 0;
};

inline phase_times
mean_phase_times(const sim_result& r)
{
  phase_times out;
  size_t nc = 0;
  size_t nn = 0;
  size_t ns = 0;
  for (const auto& row : r.rows) {
    if (row.phase == "masking") {
      out.client_us += row.compute_us;
      nc++;
    } else if (row.phase == "aggregation") {
      out.node_us += row.compute_us;
      nn++;
    } else if (row.phase == "finalize") {
      out.server_us += row.compute_us;
      ns++;
    }
  }
  out.client_us /= std::max<size_t>(nc, 1);
  out.node_us /= std::max<size_t>(nn, 1);
  out.server_us /= std::max<size_t>(ns, 1);
  return out;
}

struct precompute_report
{
  phase_times with_precompute;
  phase_times without_precompute;
  double client_speedup = 0;
  double node_speedup = 0;
  double server_speedup = 0;
};

// Aggregation-phase times with and without precomputation on otherwise
// identical runs.
inline precompute_report
bench_precompute(const sim_config& cfg)
{
  auto on = cfg;
  on.protocol.precompute = true;
  auto off = cfg;
  off.protocol.precompute = false;
  precompute_report rep;
  rep.without_precompute = mean_phase_times(run_simulation(off));
  rep.with_precompute = mean_phase_times(run_simulation(on));
  rep.client_speedup = rep.without_precompute.client_us / rep.with_precompute.client_us;
  rep.node_speedup = rep.without_precompute.node_us / rep.with_precompute.node_us;
  rep.server_speedup = rep.without_precompute.server_us / rep.with_precompute.server_us;
  return rep;
}

struct node_dropout_report
{
  std::vector<agg::round_outcome> outcomes;
  bool identical = false; // every round matches the dropout-free run
  bool recovery_used = false;
  std::string diagnostic;
};

// Runs the configuration with and without the given node dropouts and
// compares the per-round aggregates.
inline node_dropout_report
inject_node_dropout(const sim_config& cfg, std::vector<uint32_t> dropped, uint64_t round = 0)
{
  auto base = cfg;
  base.drop_nodes.clear();
  auto faulty = cfg;
  faulty.drop_nodes = std::move(dropped);
  faulty.node_drop_round = round;
  const auto a = run_simulation(base);
  const auto b = run_simulation(faulty);
  node_dropout_report rep;
  rep.identical = true;
  for (size_t r = 0; r < b.rounds.size(); r++) {
    rep.outcomes.push_back(b.rounds[r].outcome);
    rep.recovery_used = rep.recovery_used || b.rounds[r].recovery_used;
    if (b.rounds[r].outcome != agg::round_outcome::ok) {
      rep.identical = false;
      if (rep.diagnostic.empty()) {
        rep.diagnostic = b.rounds[r].diagnostic;
      }
    } else if (b.rounds[r].encoded_sum != a.rounds[r].encoded_sum) {
      rep.identical = false;
    }
  }
  return rep;
}

}
