#include <doctest.h>

#include <cmath>

#include "carmichael/errors.hpp"
#include "carmichael/pipeline.hpp"

using namespace carmichael;

namespace {

Factorization fact(std::uint64_t n) { return factorize(Nat(n)); }

const CongruenceFilters kOff{false, false};
const CongruenceFilters kQrOnly{true, false};

std::vector<std::uint64_t> primes_of(const PoolResult& r) {
  std::vector<std::uint64_t> out;
  for (const auto& e : r.entries) out.push_back(e.p);
  return out;
}

}  // namespace

TEST_CASE("build_L_prime") {
  const std::vector<std::uint64_t> a{7, 11};
  const std::vector<std::uint64_t> b{3};
  const std::vector<std::uint64_t> c{7, 11, 19};
  CHECK(build_L_prime(a) == Nat(77));
  CHECK(build_L_prime(b) == Nat(3));
  CHECK(build_L_prime(c) == Nat(1463));
  CHECK_THROWS_AS(build_L_prime({}), ConstructionError);
}

TEST_CASE("compute_x") {
  CHECK(compute_x(4, 21, {2, 5}) == Nat(4182119424ULL));
  CHECK(compute_x(1, 1, {2, 5}) == Nat(1));
  CHECK(compute_x(1, 2, {1, 4}) == Nat(256));
  // ceiling when the root is not exact: 3^(2/0.4) = 3^5, 2^(2/(1/3)) = 2^6
  CHECK(compute_x(3, 1, {2, 5}) == Nat(243));
  CHECK(compute_x(2, 1, {1, 3}) == Nat(64));
  // 3^(16/3) = 350.54...
  CHECK(compute_x(3, 1, {3, 8}) == Nat(351));
  CHECK_THROWS_AS(compute_x(4, Nat::parse("1000000000000000000000"), {1, 100000}), CapacityError);
  CHECK_THROWS_AS(compute_x(1, 2, {1, 2}), DomainError);
}

TEST_CASE("log_x tracks compute_x") {
  const long double lx = log_x(4, 21, {2, 5});
  CHECK(static_cast<double>(lx) == doctest::Approx(std::log(4182119424.0)).epsilon(1e-12));
}

TEST_CASE("build_L") {
  const std::vector<std::uint64_t> a{7, 11};
  const std::vector<std::uint64_t> b{7, 11, 19};
  const std::vector<std::uint64_t> c{3, 7};
  CHECK(build_L(a).L == Nat(77));
  CHECK(build_L(b, {19}).L == Nat(77));
  CHECK(build_L(b, {19}).factors == fact(77));
  CHECK_THROWS_AS(build_L(c, {3, 7}), ConstructionError);
}

TEST_CASE("is_qr_mod_L") {
  CHECK(is_qr_mod_L(4, fact(105)));
  CHECK(is_qr_mod_L(31, fact(15)));
  CHECK_FALSE(is_qr_mod_L(11, fact(15)));
  CHECK_THROWS_AS(is_qr_mod_L(6, fact(15)), DomainError);
  CHECK_THROWS_AS(is_qr_mod_L(7, fact(45)), DomainError);
  CHECK_THROWS_AS(is_qr_mod_L(7, fact(10)), DomainError);
}

TEST_CASE("find_k0") {
  // p in {7, 11, 31}; p = 3 divides L and is dropped
  CHECK(find_k0(fact(15), 40, 1, 1, kOff, 10) == KSearchResult{2, 3});
  CHECK(find_k0(fact(15), 40, 1, 1, kQrOnly, 10) == KSearchResult{2, 1});
  CHECK(find_k0(fact(3), 4, 1, 1, kOff, 1) == KSearchResult{1, 1});
  // only p = 2 fits below x = 3, and it is not 3 mod 4
  CHECK_THROWS_AS(find_k0(fact(15), 3, 4, 3, {false, true}, 1), ConstructionError);
}

TEST_CASE("find_k0 is independent of thread count") {
  const Factorization L = fact(7 * 11 * 19 * 23);
  const KSearchResult one = find_k0(L, 1000000, 4, 3, {}, 500, 1);
  CHECK(find_k0(L, 1000000, 4, 3, {}, 500, 3) == one);
  CHECK(find_k0(L, 1000000, 4, 3, {}, 500, 8) == one);
  CHECK(one.count >= 1);
}

TEST_CASE("build_pool") {
  const PoolResult off = build_pool(fact(15), 2, 40, 1, 1, kOff);
  CHECK(off.entries == std::vector<PoolEntry>{{7, 3}, {11, 5}, {31, 15}});
  CHECK_FALSE(off.too_small);
  CHECK(build_pool(fact(15), 2, 40, 1, 1, kQrOnly).entries == std::vector<PoolEntry>{{31, 15}});
  const PoolResult small = build_pool(fact(3), 1, 10, 1, 1, kOff);
  CHECK(small.entries == std::vector<PoolEntry>{{2, 1}});
  CHECK(small.too_small);
  CHECK_THROWS_AS(build_pool(fact(15), 3, 40, 1, 1, kOff), DomainError);
}

TEST_CASE("pool invariants") {
  const Factorization L = fact(7 * 11 * 19);
  const KSearchResult k = find_k0(L, 200000, 4, 3, {}, 2000);
  const PoolResult pool = build_pool(L, k.k0, 200000, 4, 3, {}, true);
  CHECK(pool.entries.size() == k.count);
  for (const auto& e : pool.entries) {
    CHECK(is_prime_u64(e.p));
    CHECK(e.p == e.d * k.k0 + 1);
    CHECK(L.value() % e.d == 0);
    CHECK(e.p % 4 == 3);
    CHECK(is_qr_mod_L(e.p, L));
    CHECK(e.p <= 200000);
  }
}

TEST_CASE("erdos_pool") {
  CHECK(erdos_pool(120, 1, 1, 1000) == std::vector<std::uint64_t>{7, 11, 13, 31, 41, 61});
  CHECK_THROWS_AS(erdos_pool(2, 1, 1, 1000), ConstructionError);
  CHECK(erdos_pool(630, 1, 1, 1000) == std::vector<std::uint64_t>{11, 19, 31, 43, 71, 127, 211, 631});
  CHECK(erdos_pool(120, 1, 1, 4) == std::vector<std::uint64_t>{7, 11, 13, 31});
  CHECK_THROWS_AS(erdos_pool(120, 4, 2, 1000), DomainError);
}
