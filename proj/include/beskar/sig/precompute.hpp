#pragma once
#include <cstdint>
#include <deque>
#include <span>

#include "beskar/sig/dilithium.hpp"

// Offline/online signing. precmp draws message-independent masking vectors
// y_kappa = ExpandMask(K || u, kappa) and stores (y, w = A y, w1) together
// with u = CRH(tr); psgn then only hashes and runs the rejection checks.
namespace beskar::sig {

struct precmp_entry
{
  uint64_t kappa = 0;
  poly_vec y;
  poly_vec w;
  poly_vec w1;
  bytes w1_packed;
  crh_digest u{};
};

// Entries are consumed front to back; every entry is used at most once,
// whether it produced a signature or was rejected.
class precmp_list
{
public:
  precmp_list() = default;
  explicit precmp_list(size_t capacity)
    : capacity_(capacity)
  {
  }

  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  size_t capacity() const { return capacity_; }
  const std::deque<precmp_entry>& entries() const { return entries_; }

  void push(precmp_entry e)
  {
    if (entries_.size() >= capacity_) {
      throw parameter_error("precompute list is full");
    }
    entries_.push_back(std::move(e));
  }

  precmp_entry pop()
  {
    precmp_entry e = std::move(entries_.front());
    entries_.pop_front();
    return e;
  }

private:
  std::deque<precmp_entry> entries_;
  size_t capacity_ = 0;
};

inline bytes
precmp_seed(const signing_key& key)
{
  bytes seed(key.secret().key.begin(), key.secret().key.end());
  seed.insert(seed.end(), key.u().begin(), key.u().end());
  return seed;
}

inline precmp_entry
precmp_one(const signing_key& key, uint64_t kappa)
{
  const auto& p = key.params();
  precmp_entry e;
  e.kappa = kappa;
  e.y = lattice::sample_gamma(p, precmp_seed(key), kappa);
  e.w = key.commit(e.y);
  e.w1 = lattice::high_bits(e.w, p.q, p.gamma2);
  e.w1_packed = pack_w1(p, e.w1);
  e.u = key.u();
  return e;
}

// N entries at nonces kappa = first, first+1, ...
inline precmp_list
precmp(const signing_key& key, size_t count, uint64_t first = 0)
{
  precmp_list ls(count);
  for (size_t i = 0; i < count; i++) {
    ls.push(precmp_one(key, first + i));
    thread_ops().precmp_entries++;
  }
  return ls;
}

// Online signing. Falls back to plain signing once the list runs dry.
inline signature
psgn(const signing_key& key, std::span<const uint8_t> msg, precmp_list& ls, sign_stats* stats = nullptr)
{
  thread_ops().psgn++;
  const sponge::xof prefix = challenge_prefix(key.u(), msg);
  while (!ls.empty()) {
    const precmp_entry e = ls.pop();
    if (stats) {
      stats->entries_consumed++;
      stats->attempts++;
    }
    auto res = key.try_attempt(prefix, e.y, e.w, e.w1_packed);
    if (res.accepted) {
      return std::move(res.sig);
    }
  }
  thread_ops().psgn_fallbacks++;
  if (stats) {
    stats->fell_back = true;
  }
  return key.sign_unmetered(msg, stats);
}

}
