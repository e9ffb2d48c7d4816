#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "swin/geometry.hpp"

namespace swin {

// The ten diversity objectives.  Each maps a k-point multiset Q to the cost
// of a cheapest structure of the named shape over Q; diversity maximization
// then maximizes that cost over k-subsets of the window.
enum class DivKind {
  remote_edge,
  remote_clique,
  remote_tree,
  remote_cycle,
  remote_t_trees,
  remote_t_cycles,
  remote_star,
  remote_bipartition,
  remote_pseudoforest,
  remote_matching,
};

inline const char* div_kind_name(DivKind k) {
  switch (k) {
    case DivKind::remote_edge: return "remote-edge";
    case DivKind::remote_clique: return "remote-clique";
    case DivKind::remote_tree: return "remote-tree";
    case DivKind::remote_cycle: return "remote-cycle";
    case DivKind::remote_t_trees: return "remote-t-trees";
    case DivKind::remote_t_cycles: return "remote-t-cycles";
    case DivKind::remote_star: return "remote-star";
    case DivKind::remote_bipartition: return "remote-bipartition";
    case DivKind::remote_pseudoforest: return "remote-pseudoforest";
    case DivKind::remote_matching: return "remote-matching";
  }
  return "?";
}

inline DivKind div_kind_from_name(const std::string& s) {
  for (DivKind k : {DivKind::remote_edge, DivKind::remote_clique, DivKind::remote_tree,
                    DivKind::remote_cycle, DivKind::remote_t_trees, DivKind::remote_t_cycles,
                    DivKind::remote_star, DivKind::remote_bipartition,
                    DivKind::remote_pseudoforest, DivKind::remote_matching})
    if (s == div_kind_name(k)) return k;
  throw std::invalid_argument("unknown diversity kind: " + s);
}

// Per-grid-cell retention cap: objectives whose optimum never repeats a
// point (edge/tree/cycle families) keep one point per cell, the others keep
// up to k.
inline std::int64_t div_retention(DivKind kind, std::int64_t k) {
  switch (kind) {
    case DivKind::remote_edge:
    case DivKind::remote_tree:
    case DivKind::remote_cycle:
    case DivKind::remote_t_trees:
    case DivKind::remote_t_cycles:
      return 1;
    default:
      return k;
  }
}

// Number of summed pairwise distances: the divisor that puts all ten
// objectives on the common [1, sqrt(d)*Delta] scale.
inline double div_normalizer(DivKind kind, std::int64_t k, std::int64_t t) {
  switch (kind) {
    case DivKind::remote_edge: return 1;
    case DivKind::remote_clique: return static_cast<double>(k * (k - 1)) / 2.0;
    case DivKind::remote_tree: return static_cast<double>(k - 1);
    case DivKind::remote_cycle: return static_cast<double>(k);
    case DivKind::remote_t_trees: return static_cast<double>(k - t);
    case DivKind::remote_t_cycles: return static_cast<double>(k);
    case DivKind::remote_star: return static_cast<double>(k - 1);
    case DivKind::remote_bipartition:
      return static_cast<double>((k / 2) * (k - k / 2));
    case DivKind::remote_pseudoforest: return static_cast<double>(k);
    case DivKind::remote_matching: return static_cast<double>(k) / 2.0;
  }
  return 1;
}

namespace detail {

inline std::vector<std::vector<double>> dist_matrix(const std::vector<Pt>& q) {
  const std::size_t k = q.size();
  std::vector<std::vector<double>> d(k, std::vector<double>(k, 0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) d[i][j] = d[j][i] = dist(q[i], q[j]);
  return d;
}

// Prim's MST; returns the sorted edge weights of the tree.
inline std::vector<double> mst_edges(const std::vector<std::vector<double>>& d) {
  const std::size_t k = d.size();
  std::vector<double> edges;
  if (k <= 1) return edges;
  std::vector<bool> in(k, false);
  std::vector<double> best(k, std::numeric_limits<double>::infinity());
  in[0] = true;
  for (std::size_t j = 1; j < k; ++j) best[j] = d[0][j];
  for (std::size_t step = 1; step < k; ++step) {
    std::size_t next = k;
    for (std::size_t j = 0; j < k; ++j)
      if (!in[j] && (next == k || best[j] < best[next])) next = j;
    edges.push_back(best[next]);
    in[next] = true;
    for (std::size_t j = 0; j < k; ++j)
      if (!in[j]) best[j] = std::min(best[j], d[next][j]);
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

// Optimal tour cost for every subset of points, via a Held-Karp path DP
// anchored at each subset's lowest-index member.  tour[mask] is the cheapest
// closed tour through the points of mask; singletons cost 0 and pairs cost
// the out-and-back distance.
inline std::vector<double> all_tours(const std::vector<std::vector<double>>& d) {
  const std::size_t k = d.size();
  const std::size_t full = std::size_t{1} << k;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> dp(full, std::vector<double>(k, inf));
  std::vector<double> tour(full, 0);
  for (std::size_t s = 0; s < k; ++s) dp[std::size_t{1} << s][s] = 0;
  for (std::size_t mask = 1; mask < full; ++mask) {
    const std::size_t anchor = static_cast<std::size_t>(std::countr_zero(mask));
    for (std::size_t j = 0; j < k; ++j) {
      if (!(mask & (std::size_t{1} << j)) || dp[mask][j] == inf) continue;
      for (std::size_t nxt = anchor + 1; nxt < k; ++nxt) {
        if (mask & (std::size_t{1} << nxt)) continue;
        const std::size_t nmask = mask | (std::size_t{1} << nxt);
        dp[nmask][nxt] = std::min(dp[nmask][nxt], dp[mask][j] + d[j][nxt]);
      }
    }
    if (std::popcount(mask) >= 2) {
      double best = inf;
      for (std::size_t j = 0; j < k; ++j)
        if ((mask & (std::size_t{1} << j)) && dp[mask][j] < inf)
          best = std::min(best, dp[mask][j] + d[j][anchor]);
      tour[mask] = best;
    }
  }
  return tour;
}

inline double min_perfect_matching(const std::vector<std::vector<double>>& d) {
  const std::size_t k = d.size();
  const std::size_t full = std::size_t{1} << k;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> memo(full, inf);
  memo[0] = 0;
  for (std::size_t mask = 0; mask < full; ++mask) {
    if (memo[mask] == inf) continue;
    std::size_t i = 0;
    while (i < k && (mask & (std::size_t{1} << i))) ++i;
    if (i == k) continue;
    for (std::size_t j = i + 1; j < k; ++j) {
      if (mask & (std::size_t{1} << j)) continue;
      const std::size_t nmask = mask | (std::size_t{1} << i) | (std::size_t{1} << j);
      memo[nmask] = std::min(memo[nmask], memo[mask] + d[i][j]);
    }
  }
  return memo[full - 1];
}

}  // namespace detail

// Exact objective value of a k-point multiset.  Caps guard the exponential
// solvers: cycle k<=12, t-cycles k<=10, bipartition k<=14, matching k<=10.
inline double div_value(const std::vector<Pt>& q, DivKind kind, std::int64_t t = 1) {
  const std::size_t k = q.size();
  if (k == 0) throw std::invalid_argument("div_value: empty subset");
  const auto d = detail::dist_matrix(q);
  switch (kind) {
    case DivKind::remote_edge: {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) best = std::min(best, d[i][j]);
      return k >= 2 ? best : 0;
    }
    case DivKind::remote_clique: {
      double s = 0;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) s += d[i][j];
      return s;
    }
    case DivKind::remote_tree: {
      double s = 0;
      for (double e : detail::mst_edges(d)) s += e;
      return s;
    }
    case DivKind::remote_cycle: {
      if (k > 12) throw std::invalid_argument("div_value: remote-cycle capped at k=12");
      if (k < 2) return 0;
      return detail::all_tours(d)[(std::size_t{1} << k) - 1];
    }
    case DivKind::remote_t_trees: {
      // Cheapest spanning forest with t components: drop the t-1 heaviest
      // MST edges.
      auto edges = detail::mst_edges(d);
      double s = 0;
      const std::size_t keep = edges.size() >= static_cast<std::size_t>(t - 1)
                                   ? edges.size() - static_cast<std::size_t>(t - 1)
                                   : 0;
      for (std::size_t i = 0; i < keep; ++i) s += edges[i];
      return s;
    }
    case DivKind::remote_t_cycles: {
      if (k > 10) throw std::invalid_argument("div_value: remote-t-cycles capped at k=10");
      const std::size_t full = (std::size_t{1} << k) - 1;
      const auto tour = detail::all_tours(d);
      const double inf = std::numeric_limits<double>::infinity();
      // best[j][mask]: cheapest cover of mask by exactly j disjoint cycles.
      std::vector<std::vector<double>> best(
          static_cast<std::size_t>(t) + 1, std::vector<double>(full + 1, inf));
      best[0][0] = 0;
      for (std::size_t j = 1; j <= static_cast<std::size_t>(t); ++j) {
        for (std::size_t mask = 1; mask <= full; ++mask) {
          // Force the block containing the lowest set bit so each partition
          // is enumerated once.
          const std::size_t low = mask & (~mask + 1);
          for (std::size_t sub = mask; sub; sub = (sub - 1) & mask) {
            if (!(sub & low)) continue;
            if (best[j - 1][mask ^ sub] == inf) continue;
            best[j][mask] = std::min(best[j][mask], best[j - 1][mask ^ sub] + tour[sub]);
          }
        }
      }
      return best[static_cast<std::size_t>(t)][full];
    }
    case DivKind::remote_star: {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t u = 0; u < k; ++u) {
        double s = 0;
        for (std::size_t v = 0; v < k; ++v) s += d[u][v];
        best = std::min(best, s);
      }
      return best;
    }
    case DivKind::remote_bipartition: {
      if (k > 14) throw std::invalid_argument("div_value: remote-bipartition capped at k=14");
      const std::size_t half = k / 2;
      const std::size_t full = (std::size_t{1} << k) - 1;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t mask = 0; mask <= full; ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != half) continue;
        double s = 0;
        for (std::size_t i = 0; i < k; ++i) {
          if (!(mask & (std::size_t{1} << i))) continue;
          for (std::size_t j = 0; j < k; ++j)
            if (!(mask & (std::size_t{1} << j))) s += d[i][j];
        }
        best = std::min(best, s);
      }
      return best;
    }
    case DivKind::remote_pseudoforest: {
      double s = 0;
      for (std::size_t u = 0; u < k; ++u) {
        double nn = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < k; ++v)
          if (v != u) nn = std::min(nn, d[u][v]);
        s += k >= 2 ? nn : 0;
      }
      return s;
    }
    case DivKind::remote_matching: {
      if (k % 2 != 0) throw std::invalid_argument("div_value: remote-matching needs even k");
      if (k > 10) throw std::invalid_argument("div_value: remote-matching capped at k=10");
      return detail::min_perfect_matching(d);
    }
  }
  return 0;
}

// Normalized objective: div(Q) over the pair-count divisor.
inline double div_value_normalized(const std::vector<Pt>& q, DivKind kind, std::int64_t t = 1) {
  return div_value(q, kind, t) / div_normalizer(kind, static_cast<std::int64_t>(q.size()), t);
}

}  // namespace swin
