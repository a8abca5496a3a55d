#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "rclass/learner.hpp"
#include "rclass/reserved_buffer.hpp"

using namespace rclass;
using rclass::testing::vec;

namespace {

StreamSample labeled(double x, int label, std::uint64_t index) {
  return StreamSample{vec({x}), label, index};
}

}  // namespace

TEST_CASE("FIFO storage") {
  ReservedBuffer b;
  b.capacity = 3;
  reserve(b, labeled(0.1, 0, 1), 1);
  CHECK(b.items.size() == 1);
  for (std::uint64_t i = 2; i <= 5; ++i) reserve(b, labeled(0.1 * i, 1, i), i);
  CHECK(b.items.size() == 3);
  CHECK(b.evicted == 2);
  CHECK(take_oldest(b).stored_at == 3);
  CHECK(b.items.size() == 2);
}

TEST_CASE("duplicates are kept") {
  ReservedBuffer b;
  reserve(b, labeled(0.5, 0, 9), 9);
  reserve(b, labeled(0.5, 0, 9), 9);
  CHECK(b.items.size() == 2);
}

TEST_CASE("replay") {
  Classifier clf(HyperParams{}, 2, 1);
  SUBCASE("an empty buffer changes nothing") {
    clf.learn(labeled(0.2, 0, 0));
    const auto rules = clf.state().rules.size();
    CHECK(clf.replay() == 0);
    CHECK(clf.state().rules.size() == rules);
  }
  SUBCASE("replay drains the buffer and never enqueues") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 0.05);
    std::uint64_t idx = 0;
    for (int k = 0; k < 400; ++k) {
      const int o = k % 2;
      clf.learn(labeled(0.3 + 0.4 * o + g(rng), o, idx++));
    }
    for (int k = 0; k < 20; ++k) {
      reserve(clf.mutable_state().reserved, labeled(0.3 + g(rng), 0, idx), idx);
      ++idx;
    }
    const std::size_t queued = clf.state().reserved.items.size();
    REQUIRE(queued >= 20);
    CHECK(clf.replay() == queued);
    CHECK(clf.state().reserved.items.empty());
    CHECK(clf.replay() == 0);
    CHECK_FALSE(clf.state().rules.empty());
  }
}
