#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "eqflow/rng.hpp"

using namespace eqflow;

TEST_CASE("identical seeds give identical streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(42), d(43);
  int diff = 0;
  for (int i = 0; i < 100; ++i) diff += (c.next_u64() != d.next_u64());
  CHECK(diff > 90);
}

TEST_CASE("uniform stays in [0,1) and fills the range") {
  Rng rng(7);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("normal moments") {
  Rng rng(123);
  const int n = 200000;
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    s1 += z;
    s2 += z * z;
    s3 += z * z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::abs(s1 / n) < 0.01);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(s3 / n) < 0.05);
  CHECK(s4 / n == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("derived seeds decorrelate roles") {
  auto a = derive_seed(5, "noise");
  auto b = derive_seed(5, "init");
  auto c = derive_seed(6, "noise");
  CHECK(a != b);
  CHECK(a != c);
  CHECK(derive_seed(5, "noise") == a);

  CHECK(derive_seed(5, 1, 2) != derive_seed(5, 2, 1));
  CHECK(derive_seed(5, 1, 2) == derive_seed(5, 1, 2));
}

TEST_CASE("permutation is a bijection") {
  Rng rng(9);
  auto p = rng.permutation(257);
  std::vector<int> seen(257, 0);
  for (int v : p) {
    REQUIRE(v >= 0);
    REQUIRE(v < 257);
    seen[v]++;
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
}

TEST_CASE("uniform_int covers the range") {
  Rng rng(11);
  std::vector<int> counts(10, 0);
  for (int i = 0; i < 10000; ++i) counts[rng.uniform_int(10)]++;
  for (int c : counts) CHECK(c > 800);
  CHECK_THROWS_AS(rng.uniform_int(0), InputError);
}
