#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "swin/core.hpp"
#include "swin/diversity.hpp"
#include "swin/div_value.hpp"
#include "swin/oracles.hpp"

using namespace swin;

namespace {

Pt pt(std::initializer_list<std::int64_t> cs) { return Pt{std::vector<std::int64_t>(cs)}; }

const std::vector<DivKind> kAllKinds = {
    DivKind::remote_edge,       DivKind::remote_clique,      DivKind::remote_tree,
    DivKind::remote_cycle,      DivKind::remote_t_trees,     DivKind::remote_t_cycles,
    DivKind::remote_star,       DivKind::remote_bipartition, DivKind::remote_pseudoforest,
    DivKind::remote_matching};

}  // namespace

TEST_CASE("grid snapping") {
  const auto idx = grid_index(pt({5, 3}), 2.0);
  CHECK(idx == std::vector<std::int64_t>{2, 1});
  const auto snapped = grid_snap(pt({5, 3}), 2.0);
  CHECK(snapped == std::vector<double>{4.0, 2.0});
}

TEST_CASE("objective values on a unit square") {
  // Square corners, side 2: distances 2 (sides) and 2*sqrt(2) (diagonals).
  const std::vector<Pt> sq = {pt({0, 0}), pt({2, 0}), pt({0, 2}), pt({2, 2})};
  const double s2 = std::sqrt(2.0);
  CHECK(div_value(sq, DivKind::remote_edge) == doctest::Approx(2));
  CHECK(div_value(sq, DivKind::remote_clique) == doctest::Approx(8 + 4 * s2));
  CHECK(div_value(sq, DivKind::remote_tree) == doctest::Approx(6));
  CHECK(div_value(sq, DivKind::remote_cycle) == doctest::Approx(8));
  CHECK(div_value(sq, DivKind::remote_t_trees, 2) == doctest::Approx(4));
  // Cheapest 2-cycle cover: a zero-cost singleton plus the remaining triangle.
  CHECK(div_value(sq, DivKind::remote_t_cycles, 2) == doctest::Approx(4 + 2 * s2));
  CHECK(div_value(sq, DivKind::remote_star) == doctest::Approx(4 + 2 * s2));
  // Splitting along a diagonal beats the side splits: 4 crossing sides.
  CHECK(div_value(sq, DivKind::remote_bipartition) == doctest::Approx(8));
  CHECK(div_value(sq, DivKind::remote_pseudoforest) == doctest::Approx(8));
  CHECK(div_value(sq, DivKind::remote_matching) == doctest::Approx(4));
}

TEST_CASE("normalizers") {
  const std::int64_t k = 6, t = 2;
  CHECK(div_normalizer(DivKind::remote_edge, k, t) == 1);
  CHECK(div_normalizer(DivKind::remote_clique, k, t) == 15);
  CHECK(div_normalizer(DivKind::remote_tree, k, t) == 5);
  CHECK(div_normalizer(DivKind::remote_cycle, k, t) == 6);
  CHECK(div_normalizer(DivKind::remote_t_trees, k, t) == 4);
  CHECK(div_normalizer(DivKind::remote_t_cycles, k, t) == 6);
  CHECK(div_normalizer(DivKind::remote_star, k, t) == 5);
  CHECK(div_normalizer(DivKind::remote_bipartition, k, t) == 9);
  CHECK(div_normalizer(DivKind::remote_pseudoforest, k, t) == 6);
  CHECK(div_normalizer(DivKind::remote_matching, k, t) == 3);
}

TEST_CASE("retention caps") {
  for (DivKind kind : {DivKind::remote_edge, DivKind::remote_tree, DivKind::remote_cycle,
                       DivKind::remote_t_trees, DivKind::remote_t_cycles})
    CHECK(div_retention(kind, 5) == 1);
  for (DivKind kind : {DivKind::remote_clique, DivKind::remote_star,
                       DivKind::remote_bipartition, DivKind::remote_pseudoforest,
                       DivKind::remote_matching})
    CHECK(div_retention(kind, 5) == 5);
}

TEST_CASE("smoothness counterexample points, exact optima") {
  const std::vector<Pt> A = {pt({0, 1, 1, 0}), pt({1, 1, 0, 0}), pt({1, 0, 1, 0})};
  const Pt C = pt({1, 0, 0, 1});
  CHECK(opt_div(A, 2, DivKind::remote_edge) == std::sqrt(2.0));
  auto AC = A;
  AC.push_back(C);
  CHECK(opt_div(AC, 2, DivKind::remote_edge) == 2.0);
}

TEST_CASE("diversity optimum is zero iff fewer than k distinct points") {
  const std::vector<Pt> two_distinct = {pt({1, 1}), pt({1, 1}), pt({5, 5})};
  CHECK(opt_div(two_distinct, 3, DivKind::remote_tree) == 0);
  CHECK(opt_div(two_distinct, 2, DivKind::remote_tree) > 0);
  CHECK(opt_div({pt({4, 4}), pt({4, 4})}, 2, DivKind::remote_clique) == 0);
}

TEST_CASE("recovered value is sandwiched between (1-eps)OPT and OPT") {
  CounterRng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const DivKind kind = kAllKinds[static_cast<std::size_t>(trial) % kAllKinds.size()];
    const std::int64_t k = kind == DivKind::remote_matching
                               ? 4
                               : 3 + static_cast<std::int64_t>(rng.next_below(2));
    DivParams params{k, 2, 0.25, 2, 64, kind};
    std::vector<Pt> pts;
    const int distinct = 10;
    std::vector<Pt> vocab;
    for (int i = 0; i < distinct; ++i)
      vocab.push_back(pt({1 + static_cast<std::int64_t>(rng.next_below(64)),
                          1 + static_cast<std::int64_t>(rng.next_below(64))}));
    for (int i = 0; i < 120; ++i) pts.push_back(vocab[rng.next_below(distinct)]);

    const std::int64_t W = 96;
    const auto ladder = make_ladder(1, std::sqrt(2.0) * 64);
    LadderEngine<Pt> eng(
        ladder, [&](double o) { return div_spec(o, params); },
        4 * params.d * (W + k * div_retention(kind, k)));
    for (const auto& p : pts) eng.ingest(p);

    const double opt = opt_div(window_of(pts, W), k, kind, params.t);
    const auto snaps = eng.snapshot(W);
    REQUIRE(!snaps.levels.empty());
    for (const auto& snap : snaps.levels) {
      if (snap.o > opt) break;  // guarantee holds only for o <= OPT
      const auto sol = recover_div(snap, params, true);
      REQUIRE(sol.has_value());
      CHECK(sol->value <= opt * (1 + 1e-9));
      CHECK(sol->value >= (1 - params.eps) * opt);
    }
  }
}

TEST_CASE("zero-OPT tracker matches the oracle on degenerate windows") {
  CounterRng rng(57);
  for (int trial = 0; trial < 30; ++trial) {
    const DivKind kind = kAllKinds[static_cast<std::size_t>(trial) % kAllKinds.size()];
    const std::int64_t k = kind == DivKind::remote_matching ? 4 : 3;
    DivZeroOptTracker tracker(k, kind, 2);
    // Stream over a tiny vocabulary so windows often hold < k distinct.
    std::vector<Pt> pts;
    const std::int64_t W = 12;
    std::vector<Pt> vocab = {pt({3, 3}), pt({40, 9}), pt({9, 60})};
    for (int i = 0; i < 80; ++i) {
      const bool burst = (i / 20) % 2 == 0;
      pts.push_back(vocab[burst ? 0 : rng.next_below(vocab.size())]);
      tracker.ingest(pts.back(), static_cast<std::int64_t>(i + 1));
      const auto window = window_of(pts, W);
      const double opt = opt_div(window, k, kind, 2);
      const auto got = tracker.query(static_cast<std::int64_t>(pts.size()), W);
      std::vector<Pt> distinct = window;
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      if (static_cast<std::int64_t>(distinct.size()) < k) {
        REQUIRE(got.has_value());
        CHECK(*got == opt);
        CHECK(opt == 0);  // set semantics: < k distinct means zero optimum
      } else {
        CHECK(!got.has_value());
      }
    }
  }
}

TEST_CASE("kind names round-trip") {
  for (DivKind kind : kAllKinds) CHECK(div_kind_from_name(div_kind_name(kind)) == kind);
  CHECK_THROWS(div_kind_from_name("remote-nonsense"));
}
