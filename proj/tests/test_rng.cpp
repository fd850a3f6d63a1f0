#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <vector>

#include "dds/rng.hpp"

TEST_CASE("same seed reproduces the same stream") {
  dds::rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("substreams are distinct and order-free") {
  std::set<uint64_t> seen;
  for (uint64_t i = 0; i < 1000; ++i)
    seen.insert(dds::substream_seed(7, i));
  CHECK(seen.size() == 1000);
  CHECK(dds::substream_seed(7, 3) != dds::substream_seed(3, 7));
  CHECK(dds::substream_seed(7, 3) == dds::substream_seed(7, 3));
}

TEST_CASE("u01 stays in the unit interval with sane mean") {
  dds::rng g(1);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    double u = g.u01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("uniform_int covers the range and respects the bound") {
  dds::rng g(2);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 5000; ++i) {
    uint64_t v = g.uniform_int(5);
    REQUIRE(v < 5);
    counts[v]++;
  }
  for (int c : counts) CHECK(c > 700);
}

TEST_CASE("categorical skips zero weights and follows proportions") {
  dds::rng g(3);
  std::vector<double> w = {0.0, 3.0, 0.0, 1.0};
  int hi = 0, lo = 0;
  for (int i = 0; i < 8000; ++i) {
    int idx = g.categorical(w, 4.0);
    REQUIRE((idx == 1 || idx == 3));
    (idx == 1 ? hi : lo)++;
  }
  CHECK(static_cast<double>(hi) / (hi + lo) == doctest::Approx(0.75).epsilon(0.03));
}
