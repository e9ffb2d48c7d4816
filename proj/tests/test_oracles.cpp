#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "swin/oracles.hpp"

using namespace swin;

namespace {
Pt pt(std::initializer_list<std::int64_t> cs) { return Pt{std::vector<std::int64_t>(cs)}; }
}  // namespace

TEST_CASE("window_of returns the last W items") {
  const std::vector<int> xs = {1, 2, 3, 4, 5};
  CHECK(window_of(xs, 2) == std::vector<int>{4, 5});
  CHECK(window_of(xs, 10) == xs);
  CHECK(window_of(xs, 5) == xs);
}

TEST_CASE("max coverage oracle on small families") {
  // Sets {a,b}, {b,c}, {c,d}: best 2-cover is 4.
  const std::vector<Edge> edges = {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 3}};
  CHECK(opt_kcover(edges, 1) == 2);
  CHECK(opt_kcover(edges, 2) == 4);
  CHECK(opt_kcover(edges, 3) == 4);
  CHECK(opt_kcover({}, 2) == 0);
  // Duplicate incidences change nothing.
  std::vector<Edge> dup = edges;
  dup.push_back({0, 0});
  CHECK(opt_kcover(dup, 2) == 4);
}

TEST_CASE("coverage doubling stream hits m then 2m") {
  const std::int64_t m = 5;
  std::vector<Edge> A;
  for (std::int64_t e = 0; e < m; ++e) A.push_back({0, e});
  for (std::int64_t e = m; e < 2 * m; ++e) A.push_back({1, e});
  CHECK(opt_kcover(A, 1) == m);
  const std::vector<Edge> B(A.begin() + static_cast<std::ptrdiff_t>(m), A.end());
  CHECK(opt_kcover(B, 1) == m);
  auto AC = A;
  for (std::int64_t e = m; e < 2 * m; ++e) AC.push_back({0, e});
  CHECK(opt_kcover(AC, 1) == 2 * m);
}

TEST_CASE("diversity oracle matches the hand-computed counterexample") {
  const std::vector<Pt> A = {pt({0, 1, 1, 0}), pt({1, 1, 0, 0}), pt({1, 0, 1, 0})};
  CHECK(opt_div(A, 2, DivKind::remote_edge) == std::sqrt(2.0));
  auto AC = A;
  AC.push_back(pt({1, 0, 0, 1}));
  CHECK(opt_div(AC, 2, DivKind::remote_edge) == 2.0);
  // Normalization: for k=2 every objective reduces to the farthest pair.
  CHECK(opt_div(AC, 2, DivKind::remote_clique) == 2.0);
  CHECK(opt_div(AC, 2, DivKind::remote_matching) == 2.0);
}

TEST_CASE("clustering candidate oracle") {
  const std::vector<Pt> pts = {pt({1, 1}), pt({1, 2}), pt({20, 20}), pt({20, 21})};
  // k=2 with candidate centers at the points: one center per pair, cost 1+1.
  CHECK(opt_cluster_candidates(pts, 2, 2) == doctest::Approx(2.0));
  CHECK(opt_cluster_candidates(pts, 2, 1) == doctest::Approx(2.0));
  CHECK(opt_cluster_candidates(pts, 4, 2) == doctest::Approx(0.0));
  CHECK(opt_cluster_candidates({}, 2, 2) == 0.0);
  // Explicit candidate pool wins over the default when it contains a better
  // center for p=1 (geometric median of a 3-chain is the middle point).
  const std::vector<Pt> chain = {pt({0, 0}), pt({5, 0}), pt({10, 0})};
  CHECK(opt_cluster_candidates(chain, 1, 1) == doctest::Approx(10.0));
  CHECK(opt_cluster_candidates(chain, 1, 1, {pt({5, 0})}) == doctest::Approx(10.0));
}

TEST_CASE("oracles reject oversized enumerations") {
  std::vector<Edge> big;
  for (std::int64_t s = 0; s < 60; ++s) big.push_back({s, s});
  CHECK_THROWS(opt_kcover(big, 8));
  std::vector<Pt> many;
  for (std::int64_t i = 0; i < 200; ++i) many.push_back(pt({i, 0}));
  CHECK_THROWS(opt_div(many, 6, DivKind::remote_clique));
  CHECK_THROWS(opt_cluster_candidates(many, 8, 2));
}
