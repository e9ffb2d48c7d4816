#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <vector>

#include "swin/core.hpp"
#include "swin/prf.hpp"

using namespace swin;

namespace {

// Small integer-item spec for engine tests: one sub-sketch bucketing by
// value modulo `buckets`, plus an optional PRF filter and a unit size that
// can depend on the value.
SketchSpec<int> modulo_spec(int buckets, std::int64_t threshold, double keep_prob,
                            std::uint64_t seed, bool value_units = false) {
  SubSketchSpec<int> sub;
  sub.filter = [=](const Timestamped<int>& it) {
    if (keep_prob >= 1) return true;
    return prf_unit(seed, {static_cast<std::uint64_t>(it.tau)}) < keep_prob;
  };
  sub.bucketer = [=](const Timestamped<int>& it) { return BucketKey{it.value % buckets}; };
  sub.processor = [](const Timestamped<int>& it) { return ProcInfo{it.value}; };
  sub.unit_size = [=](const Timestamped<int>& it) {
    return value_units ? 1 + it.value % 3 : std::int64_t{1};
  };
  sub.threshold = threshold;
  SketchSpec<int> spec;
  spec.subs.push_back(std::move(sub));
  return spec;
}

std::vector<Timestamped<int>> stamp(const std::vector<int>& xs, std::int64_t from = 1) {
  std::vector<Timestamped<int>> out;
  for (std::size_t i = 0; i < xs.size(); ++i)
    out.push_back({xs[i], from + static_cast<std::int64_t>(i)});
  return out;
}

}  // namespace

TEST_CASE("ladder has max(1, ceil(log2(M/m))+1) levels") {
  auto g = make_ladder(1, 8);
  CHECK(g.levels == std::vector<double>{1, 2, 4, 8});
  CHECK(make_ladder(5, 5).levels == std::vector<double>{5});
  CHECK(make_ladder(1, 1000).levels.size() == 11);
  CHECK(make_ladder(3, 4).levels.size() == 2);

  CounterRng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const double m = 0.5 + rng.next_unit() * 10;
    const double M = m * (1 + rng.next_unit() * 1000);
    const auto ladder = make_ladder(m, M);
    const std::size_t expect = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(std::log2(M / m))) + 1);
    CHECK(ladder.levels.size() == expect);
    CHECK(ladder.levels.back() >= M);
    CHECK(ladder.levels.front() == m);
  }
}

TEST_CASE("ladder rejects bad ranges") {
  CHECK_THROWS(make_ladder(0, 4));
  CHECK_THROWS(make_ladder(4, 2));
}

TEST_CASE("offline sketch keeps the maximal latest suffix per bucket") {
  auto spec = modulo_spec(1, 3, 1.0, 0);
  auto items = stamp({10, 11, 12, 13, 14});
  auto out = offline_sketch(items, spec);
  REQUIRE(out.at(0).count(BucketKey{0}) == 1);
  const auto& kept = out.at(0).at(BucketKey{0});
  REQUIRE(kept.size() == 3);
  CHECK(kept[0].item.tau == 3);
  CHECK(kept[2].item.tau == 5);
}

TEST_CASE("offline sketch drops oversized entries entirely") {
  // Units 1+value%3; value 2 has unit size 3 > threshold 2, so a bucket that
  // ends with it holds nothing.
  auto spec = modulo_spec(1, 2, 1.0, 0, true);
  auto out = offline_sketch(stamp({0, 2}), spec);
  CHECK(out.at(0).empty());
  auto out2 = offline_sketch(stamp({2, 0, 0}), spec);
  REQUIRE(out2.at(0).count(BucketKey{0}) == 1);
  CHECK(out2.at(0).at(BucketKey{0}).size() == 2);
}

TEST_CASE("engine matches offline sketch of the retained suffix after every ingest") {
  CounterRng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const int buckets = 1 + static_cast<int>(rng.next_below(4));
    const std::int64_t threshold = 1 + static_cast<std::int64_t>(rng.next_below(4));
    const double keep = trial % 3 == 0 ? 0.6 : 1.0;
    const std::int64_t S = 2 + static_cast<std::int64_t>(rng.next_below(12));
    const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(trial);
    const bool value_units = trial % 2 == 0;

    const auto ladder = make_ladder(1, 4);
    LadderEngine<int> eng(
        ladder,
        [&](double) { return modulo_spec(buckets, threshold, keep, seed, value_units); }, S);

    std::vector<int> xs;
    for (int i = 0; i < 60; ++i) xs.push_back(static_cast<int>(rng.next_below(10)));
    auto stamped = stamp(xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      eng.ingest(xs[i]);
      for (std::size_t li = 0; li < eng.levels().size(); ++li) {
        const auto& lvl = eng.levels()[li];
        std::vector<Timestamped<int>> suffix(
            stamped.begin() + static_cast<std::ptrdiff_t>(lvl.l - 1),
            stamped.begin() + static_cast<std::ptrdiff_t>(i + 1));
        CHECK(same_contents(eng.materialize(li).subs, offline_sketch(suffix, lvl.spec)));
      }
      for (std::int64_t b : eng.space_budget()) CHECK(b <= S);
    }
  }
}

TEST_CASE("snapshot restricts to the window and to qualifying levels") {
  // Tight budget forces the level's left pointer forward.
  const auto ladder = make_ladder(1, 2);
  LadderEngine<int> eng(
      ladder, [&](double) { return modulo_spec(4, 8, 1.0, 0); }, 6);
  for (int i = 0; i < 20; ++i) eng.ingest(i);

  auto snaps = eng.snapshot(4);
  CHECK(snaps.N == 20);
  for (const auto& snap : snaps.levels) {
    const auto& lvl = eng.levels()[snap.level_index];
    CHECK(lvl.l <= snaps.N - snaps.W + 1);
    for (const auto& sub : snap.subs)
      for (const auto& [key, entries] : sub)
        for (const auto& e : entries) CHECK(e.item.tau >= snaps.N - snaps.W + 1);
  }
  // A window wider than the retained suffix has no qualifying level.
  CHECK(eng.snapshot(20).levels.empty());
}

TEST_CASE("bucket overflow evicts earliest entries one at a time") {
  const auto ladder = make_ladder(1, 1);
  LadderEngine<int> eng(
      ladder, [&](double) { return modulo_spec(1, 3, 1.0, 0); }, 100);
  for (int i = 0; i < 5; ++i) eng.ingest(i);
  auto snap = eng.materialize(0);
  const auto& kept = snap.subs.at(0).at(BucketKey{0});
  REQUIRE(kept.size() == 3);
  CHECK(kept.front().item.tau == 3);
  // Left pointer untouched: overflow eviction is not window eviction.
  CHECK(eng.levels()[0].l == 1);
}

TEST_CASE("recover walks levels in ascending o and returns the first non-FAIL") {
  SnapshotSet<int> snaps;
  snaps.N = 10;
  snaps.W = 5;
  for (double o : {1.0, 2.0, 4.0}) {
    LevelSnapshot<int> s;
    s.o = o;
    snaps.levels.push_back(s);
  }
  const auto est = recover<int, double>(snaps, [](const LevelSnapshot<int>& s) {
    return s.o < 2 ? std::nullopt : std::optional<double>(s.o * 10);
  });
  CHECK(est.ok);
  CHECK(est.level == 2.0);
  CHECK(est.result == 20.0);

  const auto fail = recover<int, double>(
      snaps, [](const LevelSnapshot<int>&) -> std::optional<double> { return std::nullopt; });
  CHECK(!fail.ok);
}
