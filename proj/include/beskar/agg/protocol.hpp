#pragma once
#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "beskar/agg/config.hpp"
#include "beskar/agg/encoding.hpp"
#include "beskar/agg/messages.hpp"
#include "beskar/agg/shamir.hpp"
#include "beskar/common/bytes.hpp"
#include "beskar/common/errors.hpp"
#include "beskar/common/op_counts.hpp"
#include "beskar/common/timing.hpp"
#include "beskar/kem/kyber.hpp"
#include "beskar/mask/prf.hpp"
#include "beskar/sig/dilithium.hpp"
#include "beskar/sig/precompute.hpp"

// Client, assisting-node and server state machines for the setup and
// aggregation phases.
namespace beskar::agg {

enum class entity_kind
{
  client,
  node,
  server,
};

inline const char*
to_string(entity_kind k)
{
  switch (k) {
    case entity_kind::client:
      return "client";
    case entity_kind::node:
      return "node";
    default:
      return "server";
  }
}

struct entity_ref
{
  entity_kind kind = entity_kind::client;
  uint32_t id = 0;
  bool operator==(const entity_ref&) const = default;
};

// One emitted message: who sent what to whom, and its serialized length.
struct message_record
{
  entity_ref from;
  entity_ref to;
  std::string phase;
  uint64_t t = 0;
  size_t bytes = 0;
};

// Independent 32-byte seed for (label, a, b) under a master seed.
inline seed32
derive_seed(uint64_t master, std::string_view label, uint64_t a = 0, uint64_t b = 0)
{
  sponge::xof x(sponge::domain::sim_rng);
  x.absorb_u64_le(master);
  x.absorb(label);
  x.absorb_u64_le(a);
  x.absorb_u64_le(b);
  return x.squeeze<32>();
}

struct client_state
{
  uint32_t id = 0;
  std::shared_ptr<const protocol_config> cfg;
  sig::keypair sig_keys;
  std::optional<sig::signing_key> signer;
  std::vector<kem::shared_secret> secrets; // per node
  std::vector<mask::prf_key> prf_keys;     // per node
  std::vector<mask::mask_table> tables;    // per node; empty without precompute
  sig::precmp_list ls;
  uint64_t next_t = 1;
  // When set, masks are replaced by zeros (test hook).
  bool zero_masks = false;
};

struct node_state
{
  uint32_t id = 0;
  std::shared_ptr<const protocol_config> cfg;
  sig::keypair sig_keys;
  kem::keypair kem_keys;
  std::optional<sig::signing_key> signer;
  std::vector<sig::verifying_key> client_keys;
  std::vector<kem::shared_secret> secrets; // per client
  std::vector<mask::prf_key> prf_keys;     // per client
  std::vector<mask::mask_table> tables;    // per client; empty without precompute
  sig::precmp_list ls;
  std::map<uint64_t, std::vector<uint32_t>> lists;
  // held_shares[j][i]: this node's share of node j's secret for client i.
  std::map<uint32_t, std::vector<shamir_share>> held_shares;
  bool zero_masks = false;
};

struct server_state
{
  std::shared_ptr<const protocol_config> cfg;
  sig::keypair sig_keys;
  std::vector<sig::verifying_key> client_keys;
  std::vector<sig::verifying_key> node_keys;
  std::map<uint64_t, std::vector<uint32_t>> lists;
};

struct setup_report
{
  std::vector<message_record> messages;
  std::vector<double> client_us;
  std::vector<double> node_us;
  double server_us = 0;
  std::vector<op_counts> client_ops;
  std::vector<op_counts> node_ops;
  op_counts server_ops;
};

// Fault injection for setup tests: flip a bit of client i's ciphertext to
// node j before it is delivered.
struct setup_faults
{
  std::optional<std::pair<uint32_t, uint32_t>> corrupt_ciphertext;
};

struct setup_result
{
  std::vector<client_state> clients;
  std::vector<node_state> nodes;
  server_state server;
  setup_report report;
};

namespace detail {

inline bytes
sign_message(const lattice::ring_params& sp,
             const sig::keypair& keys,
             const std::optional<sig::signing_key>& signer,
             sig::precmp_list& ls,
             bool precompute,
             std::span<const uint8_t> body,
             sig::sign_stats* stats)
{
  if (precompute) {
    return sig::encode_signature(sp, sig::psgn(*signer, body, ls, stats));
  }
  // Plain signing from the stored secret key, matrix expansion included.
  return sig::encode_signature(sp, sig::sign(sp, keys.sk, body, stats));
}

// Runs f and charges its thread CPU time and primitive counts to the slots.
template<typename F>
void
charged(double& us, op_counts& ops, F&& f)
{
  const op_scope scope;
  const cpu_stopwatch sw;
  f();
  us += sw.elapsed_us();
  ops += scope.delta();
}

}

// Key generation and advertisement, shared-secret establishment, precomputed
// signing lists and mask tables for every entity.
inline setup_result
setup_all(const protocol_config& config, uint64_t master_seed, const setup_faults& faults = {})
{
  config.validate();
  auto cfg = std::make_shared<const protocol_config>(config);
  const auto sp = cfg->sig_params();
  const auto kp = cfg->kem_params();
  const size_t n = cfg->n;
  const size_t k = cfg->k;

  setup_result out;
  auto& rep = out.report;
  rep.client_us.assign(n, 0);
  rep.node_us.assign(k, 0);
  rep.client_ops.assign(n, {});
  rep.node_ops.assign(k, {});
  out.clients.resize(n);
  out.nodes.resize(k);
  const size_t sig_pk_len = sig::public_key_bytes(sp);
  const size_t kem_pk_len = kem::public_key_bytes(kp);
  const size_t ct_len = kem::ciphertext_bytes(kp);

  // Nodes generate signature and KEM keys and advertise them.
  for (size_t j = 0; j < k; j++) {
    auto& node = out.nodes[j];
    node.id = static_cast<uint32_t>(j);
    node.cfg = cfg;
    detail::charged(rep.node_us[j], rep.node_ops[j], [&] {
      node.sig_keys = sig::sig_keygen(sp, derive_seed(master_seed, "node-sig", j));
      node.kem_keys = kem::kem_keygen(kp, derive_seed(master_seed, "node-kem", j));
    });
    for (size_t i = 0; i < n; i++) {
      rep.messages.push_back({ { entity_kind::node, node.id },
                               { entity_kind::client, static_cast<uint32_t>(i) },
                               "setup",
                               0,
                               sig_pk_len + kem_pk_len });
    }
    rep.messages.push_back({ { entity_kind::node, node.id }, { entity_kind::server, 0 }, "setup", 0, sig_pk_len });
  }

  // Server key.
  auto& server = out.server;
  server.cfg = cfg;
  detail::charged(rep.server_us, rep.server_ops, [&] {
    server.sig_keys = sig::sig_keygen(sp, derive_seed(master_seed, "server-sig"));
  });
  for (size_t i = 0; i < n; i++) {
    rep.messages.push_back(
      { { entity_kind::server, 0 }, { entity_kind::client, static_cast<uint32_t>(i) }, "setup", 0, sig_pk_len });
  }

  // Clients encapsulate towards every node and advertise their keys.
  std::vector<std::vector<bytes>> ciphertexts(n);
  for (size_t i = 0; i < n; i++) {
    auto& c = out.clients[i];
    c.id = static_cast<uint32_t>(i);
    c.cfg = cfg;
    detail::charged(rep.client_us[i], rep.client_ops[i], [&] {
      for (size_t j = 0; j < k; j++) {
        auto enc = kem::encaps(kp, out.nodes[j].kem_keys.sk.pk_bytes, derive_seed(master_seed, "encaps", i, j));
        c.secrets.push_back(enc.key);
        c.prf_keys.push_back(mask::derive_prf_key(enc.key));
        ciphertexts[i].push_back(std::move(enc.ct));
      }
      c.sig_keys = sig::sig_keygen(sp, derive_seed(master_seed, "client-sig", i));
    });
    for (size_t j = 0; j < k; j++) {
      rep.messages.push_back({ { entity_kind::client, c.id },
                               { entity_kind::node, static_cast<uint32_t>(j) },
                               "setup",
                               0,
                               sig_pk_len + ct_len });
    }
    rep.messages.push_back({ { entity_kind::client, c.id }, { entity_kind::server, 0 }, "setup", 0, sig_pk_len });
  }

  if (faults.corrupt_ciphertext) {
    const auto [i, j] = *faults.corrupt_ciphertext;
    ciphertexts.at(i).at(j)[0] ^= 1;
  }

  // Nodes decapsulate and register client keys.
  for (size_t j = 0; j < k; j++) {
    auto& node = out.nodes[j];
    detail::charged(rep.node_us[j], rep.node_ops[j], [&] {
      for (size_t i = 0; i < n; i++) {
        auto x = kem::decaps(kp, node.kem_keys.sk, ciphertexts[i][j]);
        if (!x || *x != out.clients[i].secrets[j]) {
          throw protocol_error("setup aborted: KEM decapsulation mismatch between client " + std::to_string(i) +
                               " and node " + std::to_string(j));
        }
        node.secrets.push_back(*x);
        node.prf_keys.push_back(mask::derive_prf_key(*x));
        node.client_keys.emplace_back(sp, out.clients[i].sig_keys.pk);
      }
    });
  }

  detail::charged(rep.server_us, rep.server_ops, [&] {
    for (size_t i = 0; i < n; i++) {
      server.client_keys.emplace_back(sp, out.clients[i].sig_keys.pk);
    }
    for (size_t j = 0; j < k; j++) {
      server.node_keys.emplace_back(sp, out.nodes[j].sig_keys.pk);
    }
  });

  // Node secrets shared among all nodes for dropout recovery.
  if (cfg->shamir_threshold > 0) {
    for (size_t j = 0; j < k; j++) {
      detail::charged(rep.node_us[j], rep.node_ops[j], [&] {
        for (size_t i = 0; i < n; i++) {
          auto shares = shamir_split(
            out.nodes[j].secrets[i], k, cfg->shamir_threshold, derive_seed(master_seed, "shamir", j, i));
          for (size_t m = 0; m < k; m++) {
            out.nodes[m].held_shares[static_cast<uint32_t>(j)].push_back(shares[m]);
          }
        }
      });
      for (size_t m = 0; m < k; m++) {
        if (m != j) {
          rep.messages.push_back({ { entity_kind::node, static_cast<uint32_t>(j) },
                                   { entity_kind::node, static_cast<uint32_t>(m) },
                                   "setup",
                                   0,
                                   n * (8 + 8 * SHAMIR_CHUNKS) });
        }
      }
    }
  }

  // Precomputation: signing lists and mask tables.
  if (cfg->precompute) {
    const size_t client_n = cfg->precmp_count(2);
    const size_t node_n = cfg->precmp_count(1);
    for (size_t i = 0; i < n; i++) {
      auto& c = out.clients[i];
      detail::charged(rep.client_us[i], rep.client_ops[i], [&] {
        c.signer.emplace(sp, c.sig_keys.sk);
        c.ls = sig::precmp(*c.signer, client_n);
        for (size_t j = 0; j < k; j++) {
          c.tables.push_back(mask::build_mask_table(c.prf_keys[j], cfg->T, cfg->d));
        }
      });
    }
    for (size_t j = 0; j < k; j++) {
      auto& node = out.nodes[j];
      detail::charged(rep.node_us[j], rep.node_ops[j], [&] {
        node.signer.emplace(sp, node.sig_keys.sk);
        node.ls = sig::precmp(*node.signer, node_n);
        for (size_t i = 0; i < n; i++) {
          node.tables.push_back(mask::build_mask_table(node.prf_keys[i], cfg->T, cfg->d));
        }
      });
    }
  }
  return out;
}

struct client_messages
{
  masked_update update;
  participation_msg participation; // the same frame goes to each of the k nodes
  sig::sign_stats update_stats;
  sig::sign_stats participation_stats;
};

// Masking phase of one client for iteration t. Iterations only move
// forward; a client that sat out earlier rounds skips their masks.
inline client_messages
client_round(client_state& c, uint64_t t, std::span<const double> w)
{
  const auto& cfg = *c.cfg;
  if (t > cfg.T) {
    throw protocol_error("client " + std::to_string(c.id) + " exhausted its " + std::to_string(cfg.T) +
                         " iterations");
  }
  if (t < c.next_t) {
    throw protocol_error("client " + std::to_string(c.id) + " already sent iteration " + std::to_string(t));
  }
  if (w.size() != cfg.d) {
    throw parameter_error("update has dimension " + std::to_string(w.size()) + ", expected " +
                          std::to_string(cfg.d));
  }
  const auto sp = cfg.sig_params();

  mask::mask_vector a(cfg.d, 0);
  for (size_t j = 0; j < cfg.k; j++) {
    if (c.zero_masks) {
      mask::mask_add_into(a, mask::mask_vector(cfg.d, 0));
    } else if (cfg.precompute) {
      mask::mask_add_into(a, c.tables[j].at(t));
    } else {
      mask::mask_add_into(a, mask::prf_expand(c.prf_keys[j], t, cfg.d));
    }
  }
  client_messages out;
  out.update.sender = c.id;
  out.update.t = t;
  out.update.y = encode_update(w, cfg.quant_scale, cfg.n);
  mask::mask_add_into(out.update.y, a);

  out.update.sig =
    detail::sign_message(sp, c.sig_keys, c.signer, c.ls, cfg.precompute, out.update.body(), &out.update_stats);
  out.participation.sender = c.id;
  out.participation.t = t;
  out.participation.sig = detail::sign_message(
    sp, c.sig_keys, c.signer, c.ls, cfg.precompute, out.participation.body(), &out.participation_stats);
  c.next_t = t + 1;
  return out;
}

// Masking phase for the client's next iteration.
inline client_messages
client_round(client_state& c, std::span<const double> w)
{
  return client_round(c, c.next_t, w);
}

struct node_result
{
  std::optional<aggregated_mask> msg; // nullopt: refused (participation below threshold)
  std::vector<uint32_t> list;
  std::vector<uint32_t> rejected;
  sig::sign_stats stats;
};

// Aggregation by one assisting node: verify participation, build the user
// list, apply the participation threshold and sign the aggregated mask.
inline node_result
node_round(node_state& node, uint64_t t, std::span<const participation_msg> msgs)
{
  const auto& cfg = *node.cfg;
  node_result out;
  std::vector<bool> seen(cfg.n, false);
  for (const auto& m : msgs) {
    const bool known = m.sender < cfg.n;
    const bool valid = known && m.t == t && node.client_keys[m.sender].verify(m.body(), m.sig);
    if (!valid || seen[m.sender]) {
      out.rejected.push_back(m.sender);
      continue;
    }
    seen[m.sender] = true;
    out.list.push_back(m.sender);
  }
  std::sort(out.list.begin(), out.list.end());
  node.lists[t] = out.list;
  if (!cfg.meets_alpha(out.list.size())) {
    return out;
  }

  aggregated_mask msg;
  msg.sender = node.id;
  msg.slot = node.id;
  msg.t = t;
  msg.count = out.list.size();
  msg.a.assign(cfg.d, 0);
  for (uint32_t i : out.list) {
    if (node.zero_masks) {
      mask::mask_add_into(msg.a, mask::mask_vector(cfg.d, 0));
    } else if (cfg.precompute) {
      mask::mask_add_into(msg.a, node.tables[i].at(t));
    } else {
      mask::mask_add_into(msg.a, mask::prf_expand(node.prf_keys[i], t, cfg.d));
    }
  }
  msg.sig = detail::sign_message(
    cfg.sig_params(), node.sig_keys, node.signer, node.ls, cfg.precompute, msg.body(), &out.stats);
  out.msg = std::move(msg);
  return out;
}

struct recovery_result
{
  std::optional<aggregated_mask> msg;
  std::string diagnostic;
  std::vector<message_record> messages;
};

// Surviving nodes pool their shares of a dropped node's per-client secrets;
// the first survivor rebuilds the dropped node's aggregated mask over its own
// user list for iteration t and signs it.
inline recovery_result
recover_node_mask(std::span<node_state* const> survivors, uint32_t dropped, uint64_t t)
{
  recovery_result out;
  if (survivors.empty()) {
    out.diagnostic = "no surviving assisting nodes";
    return out;
  }
  node_state& lead = *survivors.front();
  const auto& cfg = *lead.cfg;
  if (cfg.shamir_threshold == 0) {
    out.diagnostic = "node " + std::to_string(dropped) + " dropped and secret sharing is disabled";
    return out;
  }
  if (survivors.size() < cfg.shamir_threshold) {
    out.diagnostic = "node " + std::to_string(dropped) + " dropped: " + std::to_string(survivors.size()) +
                     " surviving shares, threshold " + std::to_string(cfg.shamir_threshold);
    return out;
  }
  const auto it = lead.lists.find(t);
  if (it == lead.lists.end()) {
    out.diagnostic = "lead node has no user list for iteration " + std::to_string(t);
    return out;
  }
  const auto& list = it->second;
  if (!cfg.meets_alpha(list.size())) {
    out.diagnostic = "participation below threshold";
    return out;
  }
  for (size_t s = 1; s < cfg.shamir_threshold; s++) {
    out.messages.push_back({ { entity_kind::node, survivors[s]->id },
                             { entity_kind::node, lead.id },
                             "recovery",
                             t,
                             list.size() * (8 + 8 * SHAMIR_CHUNKS) });
  }

  aggregated_mask msg;
  msg.sender = lead.id;
  msg.slot = dropped;
  msg.t = t;
  msg.count = list.size();
  msg.a.assign(cfg.d, 0);
  for (uint32_t i : list) {
    std::vector<shamir_share> shares;
    for (size_t s = 0; s < cfg.shamir_threshold; s++) {
      shares.push_back(survivors[s]->held_shares.at(dropped).at(i));
    }
    const auto secret = shamir_reconstruct(shares);
    if (lead.zero_masks) {
      mask::mask_add_into(msg.a, mask::mask_vector(cfg.d, 0));
    } else {
      mask::mask_add_into(msg.a, mask::prf_expand(mask::derive_prf_key(secret), t, cfg.d));
    }
  }
  msg.sig = detail::sign_message(
    cfg.sig_params(), lead.sig_keys, lead.signer, lead.ls, cfg.precompute, msg.body(), nullptr);
  out.msg = std::move(msg);
  return out;
}

enum class round_outcome
{
  ok,
  bottom_alpha,
  bottom_mismatch,
  bottom_missing_node,
  bottom_invalid_node,
};

inline const char*
to_string(round_outcome o)
{
  switch (o) {
    case round_outcome::ok:
      return "ok";
    case round_outcome::bottom_alpha:
      return "bottom-alpha";
    case round_outcome::bottom_mismatch:
      return "bottom-mismatch";
    case round_outcome::bottom_missing_node:
      return "bottom-missing-node";
    default:
      return "bottom-invalid-node";
  }
}

struct finalize_result
{
  round_outcome outcome = round_outcome::ok;
  std::string diagnostic;
  std::vector<uint32_t> list;
  mask::mask_vector sum; // encoded aggregate in Z_{2^32}
  std::vector<double> w;
  std::optional<final_update> broadcast;
};

// Server side: verify updates and node messages, check the list sizes agree,
// unmask and decode. masks[j] carries node slot j (nullopt when missing).
inline finalize_result
server_finalize(server_state& server,
                uint64_t t,
                std::span<const masked_update> updates,
                std::span<const std::optional<aggregated_mask>> masks)
{
  const auto& cfg = *server.cfg;
  finalize_result out;
  std::vector<const masked_update*> accepted;
  std::vector<bool> seen(cfg.n, false);
  for (const auto& u : updates) {
    if (u.sender >= cfg.n || seen[u.sender] || u.t != t || u.y.size() != cfg.d) {
      continue;
    }
    if (!server.client_keys[u.sender].verify(u.body(), u.sig)) {
      continue;
    }
    seen[u.sender] = true;
    accepted.push_back(&u);
    out.list.push_back(u.sender);
  }
  std::sort(out.list.begin(), out.list.end());
  server.lists[t] = out.list;

  // Nodes refuse below the threshold, so no usable aggregate can exist.
  if (!cfg.meets_alpha(out.list.size())) {
    out.outcome = round_outcome::bottom_alpha;
    out.diagnostic = std::to_string(out.list.size()) + " valid updates, below the participation threshold";
    return out;
  }
  if (masks.size() != cfg.k) {
    out.outcome = round_outcome::bottom_missing_node;
    out.diagnostic = "expected " + std::to_string(cfg.k) + " node slots, got " + std::to_string(masks.size());
    return out;
  }
  for (size_t j = 0; j < cfg.k; j++) {
    const auto& m = masks[j];
    if (!m) {
      out.outcome = round_outcome::bottom_missing_node;
      out.diagnostic = "no aggregated mask for node " + std::to_string(j);
      return out;
    }
    const bool valid = m->slot == j && m->sender < cfg.k && m->t == t && m->a.size() == cfg.d &&
                       server.node_keys[m->sender].verify(m->body(), m->sig);
    if (!valid) {
      out.outcome = round_outcome::bottom_invalid_node;
      out.diagnostic = "invalid aggregated mask for node " + std::to_string(j) + " from node " +
                       std::to_string(m->sender);
      return out;
    }
  }
  for (size_t j = 0; j < cfg.k; j++) {
    if (masks[j]->count != out.list.size()) {
      out.outcome = round_outcome::bottom_mismatch;
      out.diagnostic = "node " + std::to_string(j) + " reports " + std::to_string(masks[j]->count) +
                       " users, server accepted " + std::to_string(out.list.size());
      return out;
    }
  }

  out.sum.assign(cfg.d, 0);
  for (const auto* u : accepted) {
    mask::mask_add_into(out.sum, u->y);
  }
  for (size_t j = 0; j < cfg.k; j++) {
    mask::mask_sub_into(out.sum, masks[j]->a);
  }
  out.w = decode_aggregate(out.sum, cfg.quant_scale);
  out.broadcast = final_update{ 0, t, out.list.size(), out.sum };
  return out;
}

}
