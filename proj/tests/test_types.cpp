#include <set>

#include "doctest.h"
#include "sstruss/types.hpp"

using namespace sstruss;

TEST_CASE("rng is deterministic per seed and diverges across seeds") {
  Rng a(42), b(42), c(43);
  bool all_equal = true, any_equal_c = false;
  for (int i = 0; i < 100; ++i) {
    u64 va = a.next(), vb = b.next(), vc = c.next();
    all_equal = all_equal && va == vb;
    any_equal_c = any_equal_c || va == vc;
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal_c);
}

TEST_CASE("rng bounded draws stay in range") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(rng.below(10) < 10);
    int r = rng.range(-3, 5);
    CHECK(r >= -3);
    CHECK(r <= 5);
    double u = rng.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(rng.below(0) == 0);
}

TEST_CASE("rng gauss has roughly the requested moments") {
  Rng rng(11);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double g = rng.gauss(2.0, 3.0);
    sum += g;
    sq += g * g;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(mean == doctest::Approx(2.0).epsilon(0.05));
  CHECK(var == doctest::Approx(9.0).epsilon(0.1));
}

TEST_CASE("rng shuffle permutes without losing elements") {
  Rng rng(5);
  std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> orig = v;
  rng.shuffle(v);
  std::multiset<int> a(v.begin(), v.end()), b(orig.begin(), orig.end());
  CHECK(a == b);
}

TEST_CASE("keyword bits report no false negatives") {
  KeywordBits bits(256);
  for (int k = 0; k < 50; ++k) bits.insert(k * 17 + 3);
  for (int k = 0; k < 50; ++k) CHECK(bits.may_contain(k * 17 + 3));
}

TEST_CASE("keyword bits set operations") {
  KeywordBits a(128), b(128);
  a.insert(1);
  a.insert(2);
  b.insert(2);
  CHECK(a.intersects(b));
  CHECK(a.contains_all(b));
  CHECK_FALSE(b.contains_all(a));
  KeywordBits c(128);
  CHECK_FALSE(c.any());
  c.or_with(a);
  CHECK(c == a);
  CHECK(c.popcount() <= 2);
  CHECK(c.popcount() >= 1);
}

TEST_CASE("keyword bits reject invalid widths") {
  CHECK_THROWS_AS(KeywordBits(0), std::invalid_argument);
  CHECK_THROWS_AS(KeywordBits(100), std::invalid_argument);
  CHECK_THROWS_AS(KeywordBits(32), std::invalid_argument);
}
