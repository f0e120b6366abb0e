#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "oracles.hpp"
#include "robust_t/rng.hpp"

using namespace robust_t;

// Known answers from numpy.random.Philox (4x64, 10 rounds). numpy bumps the
// counter before its first block, so its counter c here means c + 1.

namespace {

std::vector<std::uint64_t> first_outputs(Philox4x64 eng, int count) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < count; ++i) out.push_back(eng());
  return out;
}

}  // namespace

TEST_CASE("Philox4x64-10 known answers") {
  CHECK(first_outputs(Philox4x64({0, 0}), 8) ==
        std::vector<std::uint64_t>{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL,
                                   0x7e68b68aec7ba23bULL, 0x2f4ba6408e4d89bULL, 0x3dd62b0b9ca8c5b2ULL,
                                   0x1c8667a55d902e79ULL, 0x907d7a052fd5b4dcULL});

  const auto ones = Philox4x64::generate({~0ULL, ~0ULL, ~0ULL, ~0ULL}, {~0ULL, ~0ULL});
  CHECK(ones == Philox4x64::Counter{0x87b092c3013fe90bULL, 0x438c3c67be8d0224ULL, 0x9cc7d7c69cd777b6ULL,
                                    0xa09caebf594f0ba0ULL});

  const auto pi = Philox4x64::generate({0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL,
                                        0x082efa98ec4e6c89ULL},
                                       {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL});
  CHECK(pi[0] == 0xa528f45403e61d95ULL);
  CHECK(pi[1] == 0x38c72dbd566e9788ULL);
  CHECK(pi[2] == 0xa5a1610e72fd18b5ULL);
  CHECK(pi[3] == 0x57bd43b5e52b7fe6ULL);
}

TEST_CASE("stream keys place domain, n and block in separate fields") {
  const auto key = stream_key(12345, StreamDomain::TableGeneration, 10, 7);
  CHECK(key[0] == 12345);
  CHECK(key[1] == ((1ULL << 56) | (10ULL << 40) | 7ULL));
  const auto out = first_outputs(Philox4x64(key), 4);
  CHECK(out == std::vector<std::uint64_t>{0xf3f77c4a3bb54e74ULL, 0x54e70ce8c77d0999ULL, 0x6a133ac1ee0d97b4ULL,
                                          0x74ffcfd98959b615ULL});

  std::set<std::array<std::uint64_t, 2>> keys;
  for (auto d : {StreamDomain::TableGeneration, StreamDomain::PowerStudy, StreamDomain::Diagnostics}) {
    for (std::uint64_t n = 2; n < 60; ++n) {
      for (std::uint64_t b = 0; b < 10; ++b) keys.insert(stream_key(1, d, n, b));
    }
  }
  CHECK(keys.size() == 3 * 58 * 10);
}

TEST_CASE("counter increments carry across words") {
  Philox4x64 eng({3, 4}, {~0ULL, 0, 0, 0});
  for (int i = 0; i < 4; ++i) eng();
  const auto next = first_outputs(eng, 4);
  const auto expect = Philox4x64::generate({0, 1, 0, 0}, {3, 4});
  CHECK(next == std::vector<std::uint64_t>(expect.begin(), expect.end()));
}

TEST_CASE("uniform and normal draws have the right moments") {
  RandomStream s(stream_key(99, StreamDomain::Diagnostics, 0, 0));
  const int count = 200000;
  double sum = 0, sum2 = 0, usum = 0;
  double umin = 1, umax = 0;
  for (int i = 0; i < count; ++i) {
    const double u = s.uniform();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    usum += u;
    const double z = s.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(umin >= 0.0);
  CHECK(umax < 1.0);
  CHECK(std::abs(usum / count - 0.5) < 0.005);
  CHECK(std::abs(sum / count) < 0.01);
  CHECK(std::abs(sum2 / count - 1.0) < 0.015);
}

TEST_CASE("normal draws pass a two-sample KS check against std::normal_distribution") {
  RandomStream s(stream_key(5, StreamDomain::Diagnostics, 1, 0));
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd;
  std::vector<double> a, b;
  for (int i = 0; i < 50000; ++i) {
    a.push_back(s.normal());
    b.push_back(nd(gen));
  }
  // 1.63 * sqrt(2/50000): the 1% critical value.
  CHECK(oracle::ks_distance(a, b) < 0.0103);
}

TEST_CASE("streams are reproducible") {
  RandomStream a(stream_key(1, StreamDomain::TableGeneration, 10, 3));
  RandomStream b(stream_key(1, StreamDomain::TableGeneration, 10, 3));
  for (int i = 0; i < 1000; ++i) REQUIRE(a.normal() == b.normal());
}
