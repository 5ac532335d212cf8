#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <sstream>

#include "polya/multiplicative.hpp"

using namespace polya;

// Hand-checked values for small n.
static const int kLambda1to10[10] = {1, -1, -1, 1, -1, 1, -1, -1, 1, 1};
static const int kMu1to10[10] = {1, -1, -1, 0, -1, 1, -1, 0, 0, 1};

TEST_CASE("omega counts prime factors with multiplicity") {
  CHECK(omega(1) == 0);
  CHECK(omega(2) == 1);
  CHECK(omega(4) == 2);
  CHECK(omega(6) == 2);
  CHECK(omega(8) == 3);
  CHECK(omega(12) == 3);
  CHECK(omega(30) == 3);
  CHECK(omega(60) == 4);           // 2^2 * 3 * 5
  CHECK(omega(1024) == 10);        // 2^10
  CHECK(omega(906150257) == 2);       // 10039 * 90263
  CHECK(lambda_point(906150257) == SignValue{1});
  CHECK(mu_point(906150257) == SignValue{1});
  CHECK(omega(3ull * 5 * 7 * 11 * 13) == 5);
  CHECK_THROWS_AS(omega(0), std::domain_error);
}

TEST_CASE("lambda and mu point values on [1, 10]") {
  for (std::uint64_t n = 1; n <= 10; ++n) {
    CAPTURE(n);
    CHECK(int(lambda_point(n).value) == kLambda1to10[n - 1]);
    CHECK(int(mu_point(n).value) == kMu1to10[n - 1]);
  }
  CHECK_THROWS_AS(lambda_point(0), std::domain_error);
  CHECK_THROWS_AS(mu_point(0), std::domain_error);
}

TEST_CASE("lambda is completely multiplicative, mu vanishes on squares") {
  const std::uint64_t pairs[][2] = {{6, 35}, {12, 49}, {100, 81}, {991, 997}, {2, 906150257}};
  for (const auto& pr : pairs) {
    CAPTURE(pr[0], pr[1]);
    CHECK(lambda_point(pr[0] * pr[1]) == lambda_point(pr[0]) * lambda_point(pr[1]));
  }
  for (std::uint64_t n : {4ull, 9ull, 12ull, 18ull, 50ull, 121ull, 10'000ull})
    CHECK(mu_point(n).value == 0);
  // mu is multiplicative on coprime arguments
  CHECK(mu_point(6) == mu_point(2) * mu_point(3));
  CHECK(mu_point(35ull * 11) == mu_point(35) * mu_point(11));
}

TEST_CASE("sieved segment agrees with point evaluation") {
  SECTION("from 1") {
    const auto seg = sieve_segment(1, 2000);
    for (std::uint64_t n = 1; n <= 2000; ++n) {
      CAPTURE(n);
      REQUIRE(int(seg.lambda_at(n)) == int(lambda_point(n).value));
      REQUIRE(int(seg.mu_at(n)) == int(mu_point(n).value));
    }
  }
  SECTION("interior window") {
    const auto seg = sieve_segment(999'900, 1'000'100);
    for (std::uint64_t n = seg.lo; n <= seg.hi; ++n) {
      CAPTURE(n);
      REQUIRE(int(seg.lambda_at(n)) == int(lambda_point(n).value));
      REQUIRE(int(seg.mu_at(n)) == int(mu_point(n).value));
    }
  }
  SECTION("window straddling 2^32 exercises the wide-residual path") {
    const std::uint64_t mid = std::uint64_t{1} << 32;
    const auto seg = sieve_segment(mid - 50, mid + 50);
    for (std::uint64_t n = seg.lo; n <= seg.hi; ++n) {
      CAPTURE(n);
      REQUIRE(int(seg.lambda_at(n)) == int(lambda_point(n).value));
      REQUIRE(int(seg.mu_at(n)) == int(mu_point(n).value));
    }
  }
}

TEST_CASE("sieve output values are always in {-1, 0, +1}") {
  const auto seg = sieve_segment(1, 50'000);
  std::int64_t L = 0;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    const int lam = seg.lambda_vals[i];
    REQUIRE((lam == -1 || lam == 1));
    const int mu = seg.mu_vals[i];
    REQUIRE((mu == -1 || mu == 0 || mu == 1));
    // L(n) = n (mod 2): each lambda is odd, so the parity alternates in step.
    L += lam;
    REQUIRE(((L ^ static_cast<std::int64_t>(i + 1)) & 1) == 0);
  }
}

TEST_CASE("summatory prefix reproduces the early zero set of L") {
  const auto seg = sieve_segment(1, 1000);
  std::int64_t L = 0, M = 0;
  std::vector<std::uint64_t> zeros;
  for (std::uint64_t n = 1; n <= 1000; ++n) {
    L += seg.lambda_at(n);
    M += seg.mu_at(n);
    if (n >= 2 && L >= 0) {
      CHECK(L == 0);  // no positive value this early
      zeros.push_back(n);
    }
    if (n == 10) {
      CHECK(L == 0);
      CHECK(M == -1);
    }
  }
  CHECK(zeros == std::vector<std::uint64_t>{2, 4, 6, 10, 16, 26, 40, 96, 586});
  CHECK(L == -14);
  CHECK(M == 2);
}

TEST_CASE("sieve rejects bad ranges") {
  CHECK_THROWS_AS(sieve_segment(0, 10), std::domain_error);
  CHECK_THROWS_AS(sieve_segment(20, 10), std::domain_error);
  SieveConfig tiny;
  tiny.max_segment_length = 100;
  CHECK_THROWS_AS(sieve_segment(1, 1000, tiny), std::length_error);
}

TEST_CASE("segment CSV uses the n,lambda,mu layout") {
  const auto seg = sieve_segment(1, 5);
  std::ostringstream out;
  write_segment_csv(seg, out);
  CHECK(out.str() == "n,lambda,mu\n1,1,1\n2,-1,-1\n3,-1,-1\n4,1,0\n5,-1,-1\n");
}

TEST_CASE("primes_up_to basics") {
  CHECK(primes_up_to(1).empty());
  CHECK(primes_up_to(10) == std::vector<std::uint64_t>{2, 3, 5, 7});
  CHECK(primes_up_to(30102).size() == 3254);  // pi(30102) = pi(30000) + 9
  for (std::uint64_t n : {100ull, 1ull << 20, (1ull << 32) - 1, 1ull << 32})
    CHECK((isqrt_u64(n) * isqrt_u64(n) <= n &&
           (isqrt_u64(n) + 1) * (isqrt_u64(n) + 1) > n));
}
