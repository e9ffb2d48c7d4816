#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "swin/core.hpp"
#include "swin/prf.hpp"
#include "swin/toy.hpp"  // Salt

namespace swin {

// Edge-arrival maximum k-coverage: the stream consists of (set, element)
// incidence pairs; a window instance is the bipartite graph they induce.

struct Edge {
  std::int64_t set_id = 0;
  std::int64_t elem_id = 0;
  bool operator==(const Edge&) const = default;
};

struct KCoverParams {
  std::int64_t n = 0;        // number of sets
  std::int64_t m_elems = 0;  // number of elements
  std::int64_t k = 0;
  double eps = 0.25;
  double delta = 0.05;
  // Desk-scale profile: the sampling-rate numerator is divided by this
  // factor so subsampling actually kicks in at small window sizes.  Factor 1
  // reproduces the formula as written.
  double desk_factor = 1.0;

  double p(double o) const {
    const double num = static_cast<double>(k) * std::log(1.0 / delta) *
                       std::log(static_cast<double>(n));
    return std::min(num / (eps * eps * o * desk_factor), 1.0);
  }

  // Per-element degree cap, rounded up to an integer >= 1.
  std::int64_t degree_cap() const {
    const double t = static_cast<double>(n) * std::log(1.0 / eps) /
                     (eps * static_cast<double>(k));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(t)));
  }
};

struct CoverageSolution {
  std::vector<std::int64_t> chosen;  // k set ids
  std::int64_t covered_in_sketch = 0;
  double estimate = 0;
};

// One sub-sketch: an edge survives iff its element's hash falls below p;
// each element is a bucket capped at the degree bound, unit size 1 per edge.
inline SketchSpec<Edge> kcover_spec(double o, const KCoverParams& params,
                                    std::uint64_t seed, std::size_t level_index) {
  if (params.k > params.n)
    throw std::invalid_argument("kcover_spec: k must not exceed n");
  const double p = params.p(o);
  SubSketchSpec<Edge> sub;
  sub.filter = [=](const Timestamped<Edge>& it) {
    return prf_unit(seed, {kSaltKcoverHash, level_index,
                           static_cast<std::uint64_t>(it.value.elem_id)}) < p;
  };
  sub.bucketer = [](const Timestamped<Edge>& it) {
    return BucketKey{it.value.elem_id};
  };
  sub.processor = [](const Timestamped<Edge>& it) {
    return ProcInfo{it.value.set_id, it.value.elem_id};
  };
  sub.unit_size = [](const Timestamped<Edge>&) { return std::int64_t{1}; };
  sub.threshold = params.degree_cap();
  SketchSpec<Edge> spec;
  spec.subs.push_back(std::move(sub));
  return spec;
}

// Sketch graph rebuilt from a snapshot: set id -> distinct adjacent elements.
inline std::map<std::int64_t, std::set<std::int64_t>> sketch_graph(
    const LevelSnapshot<Edge>& snap) {
  std::map<std::int64_t, std::set<std::int64_t>> adj;
  for (const auto& [key, entries] : snap.subs.at(0))
    for (const auto& e : entries) adj[e.item.value.set_id].insert(e.item.value.elem_id);
  return adj;
}

namespace detail {

inline std::int64_t union_size(const std::map<std::int64_t, std::set<std::int64_t>>& adj,
                               const std::vector<std::int64_t>& chosen) {
  std::set<std::int64_t> covered;
  for (std::int64_t s : chosen) {
    auto it = adj.find(s);
    if (it != adj.end()) covered.insert(it->second.begin(), it->second.end());
  }
  return static_cast<std::int64_t>(covered.size());
}

// Pad a partial selection up to k with the smallest set ids not yet chosen.
inline void pad_to_k(std::vector<std::int64_t>& chosen, std::int64_t k, std::int64_t n) {
  std::set<std::int64_t> used(chosen.begin(), chosen.end());
  for (std::int64_t s = 0; static_cast<std::int64_t>(chosen.size()) < k && s < n; ++s)
    if (!used.count(s)) {
      chosen.push_back(s);
      used.insert(s);
    }
}

}  // namespace detail

// Brute-force recovery: maximize the sketch-graph coverage over all
// k-subsets of the sets that appear in the sketch (absent sets cover
// nothing, so only the padding cares about them).
inline CoverageSolution recover_exact(const LevelSnapshot<Edge>& snap,
                                      const KCoverParams& params) {
  const auto adj = sketch_graph(snap);
  std::vector<std::int64_t> active;
  for (const auto& [s, elems] : adj) active.push_back(s);

  const std::int64_t k = params.k;
  std::vector<std::int64_t> best;
  std::int64_t best_cov = -1;
  std::vector<std::int64_t> pick;
  const std::int64_t pick_count = std::min<std::int64_t>(k, static_cast<std::int64_t>(active.size()));
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (static_cast<std::int64_t>(pick.size()) == pick_count) {
      const std::int64_t cov = detail::union_size(adj, pick);
      if (cov > best_cov) {
        best_cov = cov;
        best = pick;
      }
      return;
    }
    for (std::size_t i = start; i < active.size(); ++i) {
      pick.push_back(active[i]);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
  if (best_cov < 0) {
    best.clear();
    best_cov = 0;
  }
  detail::pad_to_k(best, k, params.n);

  CoverageSolution sol;
  sol.chosen = best;
  sol.covered_in_sketch = best_cov;
  sol.estimate = static_cast<double>(best_cov) / params.p(snap.o);
  return sol;
}

// Classical greedy: repeatedly take the set with the largest marginal
// coverage, ties broken by lowest set id.
inline CoverageSolution recover_greedy(const LevelSnapshot<Edge>& snap,
                                       const KCoverParams& params) {
  const auto adj = sketch_graph(snap);
  std::set<std::int64_t> covered;
  std::vector<std::int64_t> chosen;
  std::set<std::int64_t> used;
  for (std::int64_t round = 0; round < params.k; ++round) {
    std::int64_t best_set = -1;
    std::int64_t best_gain = 0;
    for (const auto& [s, elems] : adj) {
      if (used.count(s)) continue;
      std::int64_t gain = 0;
      for (std::int64_t e : elems)
        if (!covered.count(e)) ++gain;
      if (gain > best_gain) {
        best_gain = gain;
        best_set = s;
      }
    }
    if (best_set < 0) break;  // no remaining set adds coverage
    chosen.push_back(best_set);
    used.insert(best_set);
    const auto& elems = adj.at(best_set);
    covered.insert(elems.begin(), elems.end());
  }
  detail::pad_to_k(chosen, params.k, params.n);

  CoverageSolution sol;
  sol.chosen = chosen;
  sol.covered_in_sketch = static_cast<std::int64_t>(covered.size());
  sol.estimate = static_cast<double>(covered.size()) / params.p(snap.o);
  return sol;
}

// Plain coverage of a chosen family over an explicit edge list.
inline std::int64_t coverage(const std::vector<Edge>& edges,
                             const std::vector<std::int64_t>& chosen) {
  std::set<std::int64_t> want(chosen.begin(), chosen.end());
  std::set<std::int64_t> covered;
  for (const auto& e : edges)
    if (want.count(e.set_id)) covered.insert(e.elem_id);
  return static_cast<std::int64_t>(covered.size());
}

// f(X) = 0 detector: OPT_k >= 1 exactly when some edge is inside the window.
class WindowNonemptyTracker {
 public:
  void ingest(std::int64_t tau) { last_tau_ = std::max(last_tau_, tau); }
  bool nonempty(std::int64_t N, std::int64_t W) const {
    return last_tau_ >= N - W + 1 && last_tau_ > 0;
  }

 private:
  std::int64_t last_tau_ = 0;
};

}  // namespace swin
