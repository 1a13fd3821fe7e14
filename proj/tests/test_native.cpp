#include "doctest.h"

#include "histrio/structures/native_treiber.hpp"

using namespace histrio;

TEST_CASE("native stress log validates") {
  for (std::uint64_t seed : {1, 2, 3}) {
    NativeReport r = run_native_treiber(4, 1000, seed);
    INFO(seed << ": " << (r.ok() ? "" : r.violations.front()));
    CHECK(r.ok());
    CHECK(r.events > 0);
    CHECK(is_complete(r.history));
    CHECK(is_continuous(r.history));
    CHECK(is_stacklike(r.history));
    CHECK(pushed(r.history) == popped(r.history));
  }
}

TEST_CASE("log validation catches a pop of the wrong element") {
  std::vector<NativeEvent> log{{1, true, 5, 0}, {2, true, 6, 1}, {3, false, 5, 0}, {4, false, 6, 1}};
  NativeReport r = validate_native_log(log, {5, 6}, {5, 6});
  CHECK_FALSE(r.ok());
}

TEST_CASE("log validation catches a gap and a lost element") {
  std::vector<NativeEvent> gap{{1, true, 5, 0}, {3, false, 5, 0}};
  CHECK_FALSE(validate_native_log(gap, {5}, {5}).ok());
  std::vector<NativeEvent> lost{{1, true, 5, 0}, {2, true, 6, 0}, {3, false, 6, 0}};
  CHECK_FALSE(validate_native_log(lost, {5, 6}, {6}).ok());
  std::vector<NativeEvent> good{{1, true, 5, 0}, {2, true, 6, 1}, {3, false, 6, 0}, {4, false, 5, 1}};
  CHECK(validate_native_log(good, {5, 6}, {6, 5}).ok());
}
