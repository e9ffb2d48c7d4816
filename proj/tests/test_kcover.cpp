#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "swin/core.hpp"
#include "swin/kcover.hpp"
#include "swin/oracles.hpp"

using namespace swin;

namespace {

// Elements named for readability: a=0 b=1 c=2 d=3.
constexpr std::int64_t a = 0, b = 1, c = 2, d = 3;

LadderEngine<Edge> make_engine(const KCoverParams& params, std::int64_t W,
                               std::uint64_t seed, std::int64_t S) {
  const auto ladder = make_ladder(1, static_cast<double>(std::min(params.m_elems, W)));
  return LadderEngine<Edge>(
      ladder,
      [&, li = std::size_t{0}](double o) mutable { return kcover_spec(o, params, seed, li++); },
      S);
}

}  // namespace

TEST_CASE("degree cap formula") {
  KCoverParams params{16, 64, 3, 0.25, 0.05};
  // ceil(16 ln(4) / (0.25 * 3)) = ceil(29.57)
  CHECK(params.degree_cap() == 30);
  KCoverParams tiny{2, 4, 2, 0.9, 0.5};
  CHECK(tiny.degree_cap() >= 1);
}

TEST_CASE("sampling rate saturates at small o") {
  KCoverParams params{16, 64, 3, 0.25, 0.05};
  CHECK(params.p(1) == 1.0);
  CHECK(params.p(1e9) < 1e-3);
  params.desk_factor = 100;
  CHECK(params.p(64) < 1.0);
}

TEST_CASE("exact recovery maximizes over the sketch graph") {
  // Sets {a,b}, {b,c}, {c,d}: the best 2-cover takes the outer sets.
  KCoverParams params{3, 4, 2, 0.25, 0.05};
  auto eng = make_engine(params, 16, 1, 1000);
  for (const Edge& e : std::vector<Edge>{{0, a}, {0, b}, {1, b}, {1, c}, {2, c}, {2, d}})
    eng.ingest(e);
  const auto snaps = eng.snapshot(16);
  REQUIRE(!snaps.levels.empty());
  const auto sol = recover_exact(snaps.levels.front(), params);
  CHECK(sol.covered_in_sketch == 4);
  CHECK(sol.chosen == std::vector<std::int64_t>{0, 2});
  CHECK(sol.estimate == doctest::Approx(4.0));
}

TEST_CASE("greedy recovery picks max marginal gain with lowest-id ties") {
  // Sets {a,b,c}, {a,b}, {c,d}: greedy takes set 0 then set 2, covering 4.
  KCoverParams params{3, 4, 2, 0.25, 0.05};
  auto eng = make_engine(params, 16, 1, 1000);
  for (const Edge& e :
       std::vector<Edge>{{0, a}, {0, b}, {0, c}, {1, a}, {1, b}, {2, c}, {2, d}})
    eng.ingest(e);
  const auto sol = recover_greedy(eng.snapshot(16).levels.front(), params);
  CHECK(sol.chosen == std::vector<std::int64_t>{0, 2});
  CHECK(sol.covered_in_sketch == 4);
}

TEST_CASE("selections are padded to k distinct sets") {
  KCoverParams params{5, 4, 3, 0.25, 0.05};
  auto eng = make_engine(params, 16, 1, 1000);
  eng.ingest({4, a});
  auto sol = recover_exact(eng.snapshot(16).levels.front(), params);
  CHECK(sol.chosen.size() == 3);
  CHECK(sol.chosen[0] == 4);
  CHECK(sol.covered_in_sketch == 1);
}

TEST_CASE("sketch graph equals the subsampled degree-capped window graph") {
  // Structural identity at a fixed level: an element's bucket keeps exactly
  // the last degree_cap incident edges among sampled elements.
  KCoverParams params{6, 10, 2, 0.5, 0.1};
  const std::uint64_t seed = 77;
  CounterRng rng(5);
  std::vector<Edge> edges;
  for (int i = 0; i < 200; ++i)
    edges.push_back({static_cast<std::int64_t>(rng.next_below(6)),
                     static_cast<std::int64_t>(rng.next_below(10))});
  auto eng = make_engine(params, 256, seed, 1 << 20);
  for (const auto& e : edges) eng.ingest(e);

  for (std::size_t li = 0; li < eng.levels().size(); ++li) {
    const auto& lvl = eng.levels()[li];
    const double p = params.p(lvl.o);
    const std::int64_t cap = params.degree_cap();
    std::map<std::int64_t, std::vector<std::int64_t>> expect;  // elem -> taus kept
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const std::int64_t tau = static_cast<std::int64_t>(i + 1);
      if (tau < lvl.l) continue;
      if (prf_unit(seed, {kSaltKcoverHash, li,
                          static_cast<std::uint64_t>(edges[i].elem_id)}) >= p)
        continue;
      auto& kept = expect[edges[i].elem_id];
      kept.push_back(tau);
      if (static_cast<std::int64_t>(kept.size()) > cap) kept.erase(kept.begin());
    }
    const auto snap = eng.materialize(li);
    std::map<std::int64_t, std::vector<std::int64_t>> got;
    for (const auto& [key, entries] : snap.subs.at(0))
      for (const auto& e : entries) got[key.at(0)].push_back(e.item.tau);
    CHECK(got == expect);
  }
}

TEST_CASE("estimates stay within the coverage bounds at saturated sampling") {
  KCoverParams params{8, 24, 2, 0.25, 0.05};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterRng rng(seed * 13 + 1);
    std::vector<Edge> edges;
    for (int i = 0; i < 300; ++i)
      edges.push_back({static_cast<std::int64_t>(rng.next_below(8)),
                       static_cast<std::int64_t>(rng.next_below(24))});
    const std::int64_t W = 128;
    auto eng = make_engine(params, W, seed, params.m_elems * params.degree_cap());
    for (const auto& e : edges) eng.ingest(e);
    const auto snaps = eng.snapshot(W);
    REQUIRE(!snaps.levels.empty());
    const auto est = recover<Edge, CoverageSolution>(
        snaps, [&](const LevelSnapshot<Edge>& s) -> std::optional<CoverageSolution> {
          return recover_exact(s, params);
        });
    REQUIRE(est.ok);
    const auto window = window_of(edges, W);
    const double opt = static_cast<double>(opt_kcover(window, params.k));
    CHECK(est.result.estimate >= (1 - 3 * params.eps) * opt);
    CHECK(est.result.estimate <= (1 + params.eps) * opt);
  }
}

TEST_CASE("window nonempty tracker") {
  WindowNonemptyTracker tr;
  CHECK(!tr.nonempty(0, 10));
  tr.ingest(1);
  CHECK(tr.nonempty(1, 10));
  CHECK(tr.nonempty(10, 10));
  CHECK(!tr.nonempty(11, 10));
}

TEST_CASE("k larger than n is rejected") {
  KCoverParams params{2, 4, 3, 0.25, 0.05};
  CHECK_THROWS(kcover_spec(1, params, 0, 0));
}
