#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "swin/cluster.hpp"
#include "swin/geometry.hpp"
#include "swin/prf.hpp"

namespace swin {

// ---------------------------------------------------------------------------
// Cost evaluation.  Centers are real-valued so the Lloyd solver can emit
// means; integer candidate centers convert losslessly.
// ---------------------------------------------------------------------------

using Center = std::vector<double>;

inline Center to_center(const Pt& x) {
  return Center(x.c.begin(), x.c.end());
}

inline double dist_pow(const Pt& x, const Center& b, std::int64_t power) {
  double s = 0;
  for (std::size_t j = 0; j < x.c.size(); ++j) {
    const double diff = static_cast<double>(x.c[j]) - b[j];
    s += diff * diff;
  }
  return power == 2 ? s : std::pow(s, static_cast<double>(power) / 2.0);
}

inline double cluster_cost(const std::vector<Pt>& pts, const std::vector<double>& weights,
                           const std::vector<Center>& centers, std::int64_t power) {
  double total = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : centers) best = std::min(best, dist_pow(pts[i], b, power));
    total += (weights.empty() ? 1.0 : weights[i]) * best;
  }
  return total;
}

inline double cluster_cost(const std::vector<Pt>& pts, const std::vector<Center>& centers,
                           std::int64_t power) {
  return cluster_cost(pts, {}, centers, power);
}

// ---------------------------------------------------------------------------
// Solvers on a weighted point set.
// ---------------------------------------------------------------------------

enum class SolveMethod { exhaustive_candidates, local_search, lloyd };

namespace detail {

// Distinct points with aggregated weights, heaviest first (ties by point
// order) and truncated to cap; the candidate pool for the discrete solvers.
inline std::vector<Pt> candidate_pool(const std::vector<Pt>& pts,
                                      const std::vector<double>& weights,
                                      std::size_t cap) {
  std::map<Pt, double> agg;
  for (std::size_t i = 0; i < pts.size(); ++i)
    agg[pts[i]] += weights.empty() ? 1.0 : weights[i];
  std::vector<std::pair<double, Pt>> order;
  order.reserve(agg.size());
  for (auto& [p, w] : agg) order.emplace_back(w, p);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  if (order.size() > cap) order.resize(cap);
  std::vector<Pt> out;
  out.reserve(order.size());
  for (auto& [w, p] : order) out.push_back(std::move(p));
  return out;
}

inline std::vector<Center> exhaustive_candidates(const std::vector<Pt>& pts,
                                                 const std::vector<double>& weights,
                                                 const std::vector<Pt>& pool,
                                                 std::int64_t k, std::int64_t power) {
  const std::int64_t take = std::min<std::int64_t>(k, static_cast<std::int64_t>(pool.size()));
  std::vector<Center> best_set;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pick;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (static_cast<std::int64_t>(pick.size()) == take) {
      std::vector<Center> centers;
      centers.reserve(pick.size());
      for (std::size_t i : pick) centers.push_back(to_center(pool[i]));
      const double c = cluster_cost(pts, weights, centers, power);
      if (c < best) {
        best = c;
        best_set = std::move(centers);
      }
      return;
    }
    for (std::size_t i = start; i < pool.size(); ++i) {
      pick.push_back(i);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
  return best_set;
}

inline std::vector<Center> local_search(const std::vector<Pt>& pts,
                                        const std::vector<double>& weights,
                                        const std::vector<Pt>& pool, std::int64_t k,
                                        std::int64_t power) {
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), pool.size());
  std::vector<std::size_t> current(take);
  for (std::size_t i = 0; i < take; ++i) current[i] = i;
  auto eval = [&](const std::vector<std::size_t>& idx) {
    std::vector<Center> centers;
    centers.reserve(idx.size());
    for (std::size_t i : idx) centers.push_back(to_center(pool[i]));
    return cluster_cost(pts, weights, centers, power);
  };
  double cost = eval(current);
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t slot = 0; slot < current.size() && !improved; ++slot) {
      for (std::size_t cand = 0; cand < pool.size() && !improved; ++cand) {
        if (std::find(current.begin(), current.end(), cand) != current.end()) continue;
        auto trial = current;
        trial[slot] = cand;
        const double c = eval(trial);
        if (c + 1e-12 < cost) {
          cost = c;
          current = std::move(trial);
          improved = true;
        }
      }
    }
  }
  std::vector<Center> centers;
  centers.reserve(current.size());
  for (std::size_t i : current) centers.push_back(to_center(pool[i]));
  return centers;
}

inline std::vector<Center> lloyd(const std::vector<Pt>& pts, const std::vector<double>& weights,
                                 std::int64_t k, std::uint64_t seed, int rounds = 25) {
  // Deterministic k-means++ style seeding from the counter RNG.
  std::vector<Center> centers;
  CounterRng rng(mix64(seed ^ 0x6c62272e07bb0142ULL));
  if (pts.empty()) return centers;
  centers.push_back(to_center(pts[rng.next_below(pts.size())]));
  while (static_cast<std::int64_t>(centers.size()) < k) {
    std::vector<double> d2(pts.size());
    double total = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& b : centers) best = std::min(best, dist_pow(pts[i], b, 2));
      d2[i] = (weights.empty() ? 1.0 : weights[i]) * best;
      total += d2[i];
    }
    if (total <= 0) {
      centers.push_back(to_center(pts[rng.next_below(pts.size())]));
      continue;
    }
    double u = rng.next_unit() * total;
    std::size_t chosen = pts.size() - 1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (u < d2[i]) {
        chosen = i;
        break;
      }
      u -= d2[i];
    }
    centers.push_back(to_center(pts[chosen]));
  }
  for (int r = 0; r < rounds; ++r) {
    std::vector<Center> sums(centers.size(), Center(pts[0].c.size(), 0.0));
    std::vector<double> mass(centers.size(), 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::size_t arg = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < centers.size(); ++b) {
        const double c = dist_pow(pts[i], centers[b], 2);
        if (c < best) {
          best = c;
          arg = b;
        }
      }
      const double w = weights.empty() ? 1.0 : weights[i];
      mass[arg] += w;
      for (std::size_t j = 0; j < sums[arg].size(); ++j)
        sums[arg][j] += w * static_cast<double>(pts[i].c[j]);
    }
    for (std::size_t b = 0; b < centers.size(); ++b)
      if (mass[b] > 0)
        for (std::size_t j = 0; j < centers[b].size(); ++j) centers[b][j] = sums[b][j] / mass[b];
  }
  return centers;
}

}  // namespace detail

inline std::vector<Center> solve_weighted(const std::vector<Pt>& pts,
                                          const std::vector<double>& weights, std::int64_t k,
                                          std::int64_t power, SolveMethod method,
                                          std::uint64_t seed = 0,
                                          std::size_t candidate_cap = 30) {
  if (pts.empty()) return {};
  switch (method) {
    case SolveMethod::exhaustive_candidates: {
      auto pool = detail::candidate_pool(pts, weights, candidate_cap);
      return detail::exhaustive_candidates(pts, weights, pool, k, power);
    }
    case SolveMethod::local_search: {
      auto pool = detail::candidate_pool(pts, weights,
                                         std::max<std::size_t>(candidate_cap, 64));
      return detail::local_search(pts, weights, pool, k, power);
    }
    case SolveMethod::lloyd: {
      if (power != 2)
        throw std::invalid_argument("lloyd solver requires squared-distance cost");
      return detail::lloyd(pts, weights, k, seed);
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// End-to-end per-level recovery: heavy partition, crucial statistics,
// coreset draw, then solve on the coreset.
// ---------------------------------------------------------------------------

struct ClusterSolution {
  Coreset coreset;
  std::vector<Center> centers;
  double estimate = 0;  // weighted coreset cost of the chosen centers
  std::int64_t active_levels = 0;
  std::int64_t samples = 0;
};

inline std::optional<ClusterSolution> recover_cluster(const LevelSnapshot<Pt>& snap,
                                                      const ClusterParams& params,
                                                      std::uint64_t seed,
                                                      SolveMethod method =
                                                          SolveMethod::exhaustive_candidates) {
  const auto heavy = heavy_partition(snap, params);
  const auto plan = crucial_stats(snap, heavy, params);
  auto coreset = draw_coreset(snap, heavy, plan, params, seed);
  if (!coreset) return std::nullopt;
  ClusterSolution sol;
  sol.coreset = std::move(*coreset);
  sol.active_levels = static_cast<std::int64_t>(plan.active.size());
  sol.samples = plan.m;
  if (sol.coreset.points.empty()) {
    sol.estimate = 0;
    return sol;
  }
  sol.centers = solve_weighted(sol.coreset.points, sol.coreset.weights, params.k,
                               params.power, method, seed);
  sol.estimate = cluster_cost(sol.coreset.points, sol.coreset.weights, sol.centers,
                              params.power);
  return sol;
}

// ---------------------------------------------------------------------------
// Johnson-Lindenstrauss style projection with +-1/sqrt(d') entries, as an
// optional preprocessing step for high-dimensional streams.
// ---------------------------------------------------------------------------

inline std::int64_t jl_dim(std::int64_t k, double eps, double c = 1.0) {
  const double v = c * std::log2(std::max<double>(2.0, static_cast<double>(k))) / (eps * eps);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(v)));
}

inline std::vector<std::vector<double>> jl_project(const std::vector<Pt>& pts,
                                                   std::int64_t d_out, std::uint64_t seed) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_out));
  std::vector<std::vector<double>> out;
  out.reserve(pts.size());
  for (const auto& x : pts) {
    std::vector<double> y(static_cast<std::size_t>(d_out), 0.0);
    for (std::size_t r = 0; r < static_cast<std::size_t>(d_out); ++r) {
      double s = 0;
      for (std::size_t j = 0; j < x.c.size(); ++j) {
        const bool plus = prf(seed, {kSaltJl, r, j}) & 1;
        s += (plus ? scale : -scale) * static_cast<double>(x.c[j]);
      }
      y[r] = s;
    }
    out.push_back(std::move(y));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Distinct-value tracker for the degenerate window: keeps at most one stored
// copy per value (a second copy evicts the earlier one) and at most k+1
// entries overall, which is enough to decide whether the window holds more
// than k distinct points and, if not, to answer zero exactly.
// ---------------------------------------------------------------------------

class ClusterDistinctTracker {
 public:
  explicit ClusterDistinctTracker(std::int64_t k) : k_(k) {}

  void ingest(const Pt& x, std::int64_t tau) {
    entries_.push_back({x, tau});
    std::int64_t equal = 0;
    for (const auto& e : entries_)
      if (e.value == x) ++equal;
    if (equal == 2) {
      for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].value == x) {
          entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(i));
          break;
        }
    } else if (static_cast<std::int64_t>(entries_.size()) == k_ + 2) {
      entries_.erase(entries_.begin());
    }
  }

  // True when the window provably holds at most k distinct points, in which
  // case the clustering optimum is zero.
  bool window_is_degenerate(std::int64_t N, std::int64_t W) const {
    const std::int64_t lo = N - W + 1;
    std::vector<Pt> distinct;
    for (const auto& e : entries_)
      if (e.tau >= lo) distinct.push_back(e.value);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    return static_cast<std::int64_t>(distinct.size()) <= k_;
  }

 private:
  struct Stamped {
    Pt value;
    std::int64_t tau;
  };
  std::int64_t k_;
  std::vector<Stamped> entries_;
};

}  // namespace swin
