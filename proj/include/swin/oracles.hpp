#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "swin/cluster_solve.hpp"
#include "swin/diversity.hpp"
#include "swin/div_value.hpp"
#include "swin/geometry.hpp"
#include "swin/kcover.hpp"

namespace swin {

// Brute-force reference optima over the exact window contents.  These are
// deliberately independent of the sketching code: plain enumeration over the
// raw stream suffix, with hard caps so a miswired test fails loudly instead
// of spinning.

template <class V>
std::vector<V> window_of(const std::vector<V>& stream, std::int64_t W) {
  const std::int64_t n = static_cast<std::int64_t>(stream.size());
  const std::int64_t lo = std::max<std::int64_t>(0, n - W);
  return std::vector<V>(stream.begin() + static_cast<std::ptrdiff_t>(lo), stream.end());
}

// Exact max k-coverage of an edge list by enumeration over k-subsets of the
// sets with at least one edge.
inline std::int64_t opt_kcover(const std::vector<Edge>& edges, std::int64_t k,
                               double enumeration_cap = 2e6) {
  std::map<std::int64_t, std::set<std::int64_t>> adj;
  for (const auto& e : edges) adj[e.set_id].insert(e.elem_id);
  std::vector<std::int64_t> active;
  for (const auto& [s, elems] : adj) active.push_back(s);
  const std::int64_t take = std::min<std::int64_t>(k, static_cast<std::int64_t>(active.size()));
  double combos = 1;
  for (std::int64_t i = 0; i < take; ++i)
    combos *= static_cast<double>(active.size() - static_cast<std::size_t>(i)) /
              static_cast<double>(i + 1);
  if (combos > enumeration_cap)
    throw std::invalid_argument("opt_kcover: instance too large for enumeration");

  std::int64_t best = 0;
  std::vector<std::int64_t> pick;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (static_cast<std::int64_t>(pick.size()) == take) {
      std::set<std::int64_t> covered;
      for (std::int64_t s : pick) {
        const auto& elems = adj.at(s);
        covered.insert(elems.begin(), elems.end());
      }
      best = std::max<std::int64_t>(best, static_cast<std::int64_t>(covered.size()));
      return;
    }
    for (std::size_t i = start; i < active.size(); ++i) {
      pick.push_back(active[i]);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
  return best;
}

// Exact diversity optimum over k-subsets of the distinct window points.
inline double opt_div(const std::vector<Pt>& pts, std::int64_t k, DivKind kind,
                      std::int64_t t = 1, double enumeration_cap = 5e6) {
  std::vector<Pt> distinct = pts;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (static_cast<std::int64_t>(distinct.size()) >= k &&
      detail::binomial_estimate(distinct.size(), static_cast<std::size_t>(k)) >
          enumeration_cap)
    throw std::invalid_argument("opt_div: instance too large for enumeration");
  return detail::max_div_enumerate(std::move(distinct), k, kind, t);
}

// Exact optimum of discrete (k, power)-clustering where centers range over a
// candidate point set (by default the distinct input points).
inline double opt_cluster_candidates(const std::vector<Pt>& pts, std::int64_t k,
                                     std::int64_t power,
                                     std::vector<Pt> candidates = {},
                                     double enumeration_cap = 2e6) {
  if (pts.empty()) return 0;
  if (candidates.empty()) candidates = pts;
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  const std::int64_t take =
      std::min<std::int64_t>(k, static_cast<std::int64_t>(candidates.size()));
  double combos = 1;
  for (std::int64_t i = 0; i < take; ++i)
    combos *= static_cast<double>(candidates.size() - static_cast<std::size_t>(i)) /
              static_cast<double>(i + 1);
  if (combos > enumeration_cap)
    throw std::invalid_argument("opt_cluster_candidates: instance too large");

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pick;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (static_cast<std::int64_t>(pick.size()) == take) {
      std::vector<Center> centers;
      centers.reserve(pick.size());
      for (std::size_t i : pick) centers.push_back(to_center(candidates[i]));
      best = std::min(best, cluster_cost(pts, centers, power));
      return;
    }
    for (std::size_t i = start; i < candidates.size(); ++i) {
      pick.push_back(i);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
  return best;
}

}  // namespace swin
