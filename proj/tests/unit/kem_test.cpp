#include <gtest/gtest.h>

#include <random>

#include "beskar/kem/kyber.hpp"
#include "beskar/lattice/rounding.hpp"
#include "support/oracles.hpp"
#include "support/stats.hpp"

using namespace beskar;
using namespace beskar::kem;
using beskar::testing::centered;

namespace {

seed32
seed_of(uint64_t v)
{
  seed32 s{};
  for (size_t i = 0; i < 8; i++) {
    s[i] = static_cast<uint8_t>(v >> (8 * i));
  }
  s[20] = 0x3c;
  return s;
}

class KemParams : public ::testing::TestWithParam<lattice::kem_params>
{};

}

TEST_P(KemParams, KeygenDeterministicAndDefiningIdentity)
{
  const auto p = GetParam();
  const auto kp = kem_keygen(p, seed_of(1));
  const auto again = kem_keygen(p, seed_of(1));
  EXPECT_EQ(kp.pk, again.pk);
  EXPECT_EQ(kp.sk, again.sk);
  const auto a = detail::expand_matrix(p, kp.pk.rho);
  const auto r = p.make_ring();
  for (size_t i = 0; i < p.k; i++) {
    lattice::poly acc = kp.e[i];
    for (size_t j = 0; j < p.k; j++) {
      acc = r.add(acc, beskar::testing::negacyclic_oracle(a.at(i, j), kp.sk.s[j], p.q));
    }
    EXPECT_EQ(acc, kp.pk.t[i]);
  }
  EXPECT_LE(lattice::inf_norm(kp.sk.s, p.q), p.eta);
  EXPECT_LE(lattice::inf_norm(kp.e, p.q), p.eta);
  EXPECT_NE(kp.sk.pk_bytes, kem_keygen(p, seed_of(2)).sk.pk_bytes);
  EXPECT_EQ(kp.sk.pk_bytes.size(), public_key_bytes(p));
}

TEST_P(KemParams, RoundtripAndDistinctCoins)
{
  const auto p = GetParam();
  const auto kp = kem_keygen(p, seed_of(3));
  const auto a = encaps(p, kp.sk.pk_bytes, seed_of(10));
  const auto b = encaps(p, kp.sk.pk_bytes, seed_of(11));
  EXPECT_EQ(a.ct.size(), ciphertext_bytes(p));
  EXPECT_EQ(decaps(p, kp.sk, a.ct), a.key);
  EXPECT_EQ(decaps(p, kp.sk, b.ct), b.key);
  EXPECT_NE(a.ct, b.ct);
  EXPECT_NE(a.key, b.key);
  const auto a2 = encaps(p, kp.sk.pk_bytes, seed_of(10));
  EXPECT_EQ(a.ct, a2.ct);
  EXPECT_EQ(a.key, a2.key);
}

TEST_P(KemParams, FlippedCiphertextBitsChangeKey)
{
  const auto p = GetParam();
  const auto kp = kem_keygen(p, seed_of(4));
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; i++) {
    const auto enc = encaps(p, kp.sk.pk_bytes, seed_of(100 + i));
    bytes ct = enc.ct;
    const size_t bit = rng() % (ct.size() * 8);
    ct[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
    const auto k = decaps(p, kp.sk, ct);
    ASSERT_TRUE(k.has_value());
    EXPECT_NE(*k, enc.key);
  }
}

TEST_P(KemParams, MalformedInputs)
{
  const auto p = GetParam();
  const auto kp = kem_keygen(p, seed_of(5));
  const auto enc = encaps(p, kp.sk.pk_bytes, seed_of(6));
  EXPECT_FALSE(decaps(p, kp.sk, std::span<const uint8_t>(enc.ct).first(enc.ct.size() - 1)).has_value());
  EXPECT_FALSE(decaps(p, kp.sk, bytes{}).has_value());
  EXPECT_THROW(encaps(p, std::span<const uint8_t>(kp.sk.pk_bytes).first(10), seed_of(1)), parameter_error);
  bytes bad = kp.sk.pk_bytes;
  std::fill(bad.begin() + 32, bad.end(), 0xff);
  EXPECT_THROW(encaps(p, bad, seed_of(1)), parameter_error);
}

TEST_P(KemParams, RoundtripRate)
{
  const auto p = GetParam();
  size_t ok = 0;
  const size_t trials = 1000;
  for (size_t i = 0; i < trials; i++) {
    const auto kp = kem_keygen(p, seed_of(1000 + i / 50));
    const auto enc = encaps(p, kp.sk.pk_bytes, seed_of(50000 + i));
    ok += decaps(p, kp.sk, enc.ct) == enc.key;
  }
  EXPECT_GE(static_cast<double>(ok) / trials, 1.0 - 1e-3);
}

INSTANTIATE_TEST_SUITE_P(ParamSets,
                         KemParams,
                         ::testing::Values(lattice::kem_desk(), lattice::kem_512(), lattice::kem_768(), lattice::kem_1024()),
                         [](const auto& info) {
                           std::string n = info.param.name;
                           std::replace(n.begin(), n.end(), '-', '_');
                           return n;
                         });

TEST(KemCompress, RoundtripErrorWithinHalfStep)
{
  for (auto [q, d] : std::vector<std::pair<uint32_t, uint32_t>>{ { 3329, 10 }, { 3329, 4 }, { 7681, 11 }, { 7681, 3 } }) {
    const double step = static_cast<double>(q) / (1u << d);
    for (uint32_t x = 0; x < q; x++) {
      const uint32_t y = compress(x, d, q);
      ASSERT_LT(y, 1u << d);
      const int64_t err = centered((decompress(y, d, q) + q - x) % q, q);
      ASSERT_LE(std::abs(err), static_cast<int64_t>(step / 2 + 1));
    }
  }
}

// Worst-case decryption noise at the desk set, with the compression errors
// taken from an exhaustive scan of Z_q:
//   |e^T r| + |e2| + |s^T e1| + |s^T du_err| + |dv_err| < q/4
TEST(KemDesk, WorstCaseNoiseBelowDecodingThreshold)
{
  const auto p = lattice::kem_desk();
  auto max_err = [&](uint32_t d) {
    int64_t m = 0;
    for (uint32_t x = 0; x < p.q; x++) {
      m = std::max(m, std::abs(centered((decompress(compress(x, d, p.q), d, p.q) + p.q - x) % p.q, p.q)));
    }
    return m;
  };
  const int64_t kn = static_cast<int64_t>(p.k * p.n);
  const int64_t eta = p.eta;
  const int64_t bound = kn * eta * eta + eta + kn * eta * eta + kn * eta * max_err(p.du) + max_err(p.dv);
  // Correct decoding of either bit value needs 2|noise| + 1 < q/2.
  EXPECT_LT(2 * bound + 1, static_cast<int64_t>(p.q) / 2);
}

TEST(KemDesk, EveryRoundtripSucceeds)
{
  const auto p = lattice::kem_desk();
  for (size_t i = 0; i < 10000; i++) {
    const auto kp = kem_keygen(p, seed_of(i / 100));
    const auto enc = encaps(p, kp.sk.pk_bytes, seed_of(70000 + i));
    ASSERT_EQ(decaps(p, kp.sk, enc.ct), enc.key) << "trial " << i;
  }
}

TEST(KemKeys, SharedSecretBytesUniform)
{
  const auto p = lattice::kem_desk();
  const auto kp = kem_keygen(p, seed_of(77));
  std::vector<uint64_t> counts(256, 0);
  for (size_t i = 0; i < 10000; i++) {
    for (uint8_t b : encaps(p, kp.sk.pk_bytes, seed_of(900000 + i)).key) {
      counts[b]++;
    }
  }
  EXPECT_TRUE(beskar::testing::chi_square_uniform_passes(counts));
}

TEST(KemCbd, CoefficientsWithinEtaAndCentered)
{
  const auto p = lattice::kem_768();
  std::vector<uint64_t> counts(2 * p.eta + 1, 0);
  for (uint8_t nonce = 0; nonce < 40; nonce++) {
    for (uint32_t c : detail::cbd(p, seed_of(3), nonce).coeffs) {
      const int64_t v = centered(c, p.q);
      ASSERT_LE(std::abs(v), static_cast<int64_t>(p.eta));
      counts[static_cast<size_t>(v + p.eta)]++;
    }
  }
  // Binomial(2 eta, 1/2) shifted by eta.
  double chi = 0;
  const double total = 40.0 * p.n;
  for (size_t v = 0; v < counts.size(); v++) {
    double binom = 1;
    for (size_t j = 0; j < v; j++) {
      binom = binom * (2 * p.eta - j) / (j + 1);
    }
    const double expect = total * binom / std::pow(2.0, 2 * p.eta);
    chi += (counts[v] - expect) * (counts[v] - expect) / expect;
  }
  EXPECT_LT(chi, beskar::testing::chi_square_critical(2.0 * p.eta, 0.01));
}
