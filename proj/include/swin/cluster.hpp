#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "swin/core.hpp"
#include "swin/geometry.hpp"
#include "swin/prf.hpp"
#include "swin/toy.hpp"  // Salt

namespace swin {

// ---------------------------------------------------------------------------
// Randomly shifted hierarchical grids.
//
// Level i covers space with cells of side Delta_i = Delta / 2^i, for
// i in {-1, 0, ..., L}; the level -1 cell containing all of [Delta]^d is
// unique because the shift is below Delta.  The shift is quantized to the
// 2^-30 * Delta lattice so cell assignment is exact integer arithmetic.
// ---------------------------------------------------------------------------

struct ShiftedGrids {
  std::int64_t d = 0;
  std::int64_t Delta = 0;
  std::int64_t L = 0;
  std::vector<std::int64_t> shift_q;  // v_j = shift_q[j] * Delta / 2^30

  double shift(std::size_t j) const {
    return static_cast<double>(shift_q[j]) * static_cast<double>(Delta) * 0x1.0p-30;
  }

  // Cell index of x at level i: floor((x + v) / Delta_i) per coordinate.
  // With A_j = x_j * 2^30 + q_j * Delta this is floor(A_j * 2^i / (Delta * 2^30)).
  BucketKey cell(const Pt& x, std::int64_t i) const {
    BucketKey idx(static_cast<std::size_t>(d));
    for (std::size_t j = 0; j < static_cast<std::size_t>(d); ++j) {
      const unsigned __int128 a =
          static_cast<unsigned __int128>(x.c[j]) * (std::uint64_t{1} << 30) +
          static_cast<unsigned __int128>(shift_q[j]) * static_cast<unsigned __int128>(Delta);
      unsigned __int128 denom =
          static_cast<unsigned __int128>(Delta) * (std::uint64_t{1} << 30);
      unsigned __int128 num = a;
      if (i >= 0)
        num <<= i;
      else
        denom <<= 1;  // only i = -1 occurs
      idx[j] = static_cast<std::int64_t>(num / denom);
    }
    return idx;
  }

  static BucketKey parent(const BucketKey& idx) {
    BucketKey up(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) up[j] = idx[j] >> 1;
    return up;
  }
};

inline std::int64_t grid_level_count(std::int64_t n, std::int64_t d, std::int64_t Delta) {
  const double v = std::log2(static_cast<double>(n) * static_cast<double>(d) *
                             static_cast<double>(Delta));
  return static_cast<std::int64_t>(std::ceil(v)) + 10;
}

inline ShiftedGrids build_grids(std::int64_t Delta, std::int64_t d, std::int64_t n,
                                std::uint64_t seed) {
  ShiftedGrids g;
  g.d = d;
  g.Delta = Delta;
  g.L = grid_level_count(n, d, Delta);
  g.shift_q.resize(static_cast<std::size_t>(d));
  for (std::size_t j = 0; j < static_cast<std::size_t>(d); ++j)
    g.shift_q[j] = static_cast<std::int64_t>(prf(seed, {kSaltShift, j}) &
                                             ((std::uint64_t{1} << 30) - 1));
  return g;
}

// ---------------------------------------------------------------------------
// Parameters and constant profiles.
// ---------------------------------------------------------------------------

struct ClusterProfile {
  // p_i   = min(1, z_factor  * ln(nL/delta) / R_i)
  // p'_i  = min(1, zp_factor * ln(nL/delta) / (eps^2 * gamma * R_i))
  // p''_i = min(1 / (zpp_coef * R_i), 1); zpp_coef <= 0 selects the paper's
  //         2000 * (kL + (2 d^1.5)^p).
  double z_factor = 1e6;
  double zp_factor = 1e6;
  double zpp_coef = -1;
  std::int64_t m_hat = 0;  // 0 selects the paper's replica-count formula
  double m_const = 1000;   // constant in the coreset sample count m
  const char* name = "theory";
};

inline ClusterProfile theory_profile() { return ClusterProfile{}; }

inline ClusterProfile desk_profile() {
  ClusterProfile pr;
  pr.z_factor = 20;
  pr.zp_factor = 20;
  pr.zpp_coef = 50;
  pr.m_hat = 16384;
  pr.m_const = 0.02;
  pr.name = "desk";
  return pr;
}

struct ClusterParams {
  std::int64_t k = 2;
  std::int64_t d = 2;
  std::int64_t Delta = 64;
  std::int64_t power = 2;  // the p of ell_p clustering
  std::int64_t n = 100;    // upper bound on window point count (set to W)
  double eps = 0.3;
  double delta = 0.1;
  ClusterProfile profile = desk_profile();

  std::int64_t L() const { return grid_level_count(n, d, Delta); }

  double cell_diag_pow(std::int64_t i) const {
    const double side = static_cast<double>(Delta) / std::pow(2.0, static_cast<double>(i));
    return std::pow(std::sqrt(static_cast<double>(d)) * side, static_cast<double>(power));
  }

  double R(std::int64_t i, double o) const { return 0.01 * o / cell_diag_pow(i); }

  double gamma() const {
    return eps / (40.0 * std::pow(2.0, static_cast<double>(2 * power + 2)) *
                  static_cast<double>(L()));
  }

  double ln_nl_delta() const {
    return std::log(static_cast<double>(n) * static_cast<double>(L()) / delta);
  }

  double p_z(std::int64_t i, double o) const {
    return std::min(1.0, profile.z_factor * ln_nl_delta() / R(i, o));
  }

  double p_zp(std::int64_t i, double o) const {
    return std::min(1.0, profile.zp_factor * ln_nl_delta() / (eps * eps * gamma() * R(i, o)));
  }

  double zpp_coef() const {
    if (profile.zpp_coef > 0) return profile.zpp_coef;
    return 2000.0 * (static_cast<double>(k * L()) +
                     std::pow(2.0 * std::pow(static_cast<double>(d), 1.5),
                              static_cast<double>(power)));
  }

  double p_zpp(std::int64_t i, double o) const {
    return std::min(1.0 / (zpp_coef() * R(i, o)), 1.0);
  }

  std::int64_t m_hat() const {
    if (profile.m_hat > 0) return profile.m_hat;
    // The paper's replica count; astronomically large at desk scale, which
    // is exactly why the desk profile pins an explicit value.
    const double kl = static_cast<double>(k * L()) +
                      std::pow(2.0 * std::pow(static_cast<double>(d), 1.5),
                               static_cast<double>(power));
    const double v = 1e9 * std::pow(2.0, static_cast<double>(2 * power + 2)) *
                     std::pow(eps, -3.0) * kl *
                     (static_cast<double>(power) * std::log(static_cast<double>(n)) *
                          std::log(static_cast<double>(k * L() * d)) +
                      std::log(1.0 / delta)) *
                     static_cast<double>(L()) / delta;
    return static_cast<std::int64_t>(std::min(v, 9e17));
  }

  // min(2^{2p+1} / R_i, 1): the sensitivity upper bound per crucial level.
  double min_factor(std::int64_t i, double o) const {
    return std::min(std::pow(2.0, static_cast<double>(2 * power + 1)) / R(i, o), 1.0);
  }

  double ladder_max() const {
    return static_cast<double>(n) *
           std::pow(std::sqrt(static_cast<double>(d)) * static_cast<double>(Delta),
                    static_cast<double>(power));
  }
};

// ---------------------------------------------------------------------------
// The three sketches Z, Z', Z'' as one combined spec of 3(L+1) sub-sketches
// (grid levels i = 0..L per sketch).  Sub-sketch index layout:
//   [0, L]           Z  level i
//   [L+1, 2L+1]      Z' level i
//   [2L+2, 3L+2]     Z'' level i
// ---------------------------------------------------------------------------

namespace detail {

// Deterministic binomial sample driven by a counter RNG: exact inverse-CDF
// walk for small means, Irwin-Hall normal approximation for large ones (the
// desk profile documents this approximation).
inline std::int64_t binomial_sample(std::int64_t trials, double p, CounterRng& rng) {
  if (p >= 1) return trials;
  if (p <= 0) return 0;
  const double mean = static_cast<double>(trials) * p;
  const double var = mean * (1 - p);
  if (var > 100.0) {
    double z = 0;
    for (int i = 0; i < 12; ++i) z += rng.next_unit();
    z -= 6.0;
    const double c = std::round(mean + z * std::sqrt(var));
    return std::max<std::int64_t>(0, std::min<std::int64_t>(trials, static_cast<std::int64_t>(c)));
  }
  const double u = rng.next_unit();
  double pmf = std::pow(1 - p, static_cast<double>(trials));
  double cum = pmf;
  std::int64_t c = 0;
  while (cum < u && c < trials) {
    pmf *= static_cast<double>(trials - c) / static_cast<double>(c + 1) * p / (1 - p);
    cum += pmf;
    ++c;
  }
  return c;
}

// Floyd's sampling of `count` distinct indices from [0, universe).
inline ProcInfo sample_distinct(std::int64_t universe, std::int64_t count, CounterRng& rng) {
  std::set<std::int64_t> chosen;
  for (std::int64_t j = universe - count; j < universe; ++j) {
    const std::int64_t t = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(j + 1)));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return ProcInfo(chosen.begin(), chosen.end());
}

inline std::uint64_t point_hash(std::uint64_t seed, const Pt& x) {
  std::uint64_t h = mix64(seed ^ 0x243f6a8885a308d3ULL);
  for (std::int64_t c : x.c) h = mix64(h ^ static_cast<std::uint64_t>(c));
  return h;
}

// Memoized replica subsets of Z'': keyed by (grid level, point value) so
// duplicate arrivals share coins and the offline replay sees identical
// processed-info.
struct ZppCache {
  // (grid level, coords) -> (count, materialized indices)
  std::map<std::pair<std::int64_t, std::vector<std::int64_t>>,
           std::pair<std::int64_t, ProcInfo>>
      memo;
};

}  // namespace detail

inline SketchSpec<Pt> cluster_spec(double o, const ClusterParams& params,
                                   const ShiftedGrids& grids, std::uint64_t seed,
                                   std::size_t ladder_index) {
  const std::int64_t L = params.L();
  SketchSpec<Pt> spec;
  auto cache = std::make_shared<detail::ZppCache>();

  for (std::int64_t i = 0; i <= L; ++i) {
    const double r = params.R(i, o);
    // Z: Bernoulli(p_i) per point value, cell bucket, unit size d.  The
    // threshold floor of one point keeps nonempty coarse cells observable,
    // otherwise levels with R_i << 1 could never be marked heavy.
    {
      const double p = params.p_z(i, o);
      SubSketchSpec<Pt> sub;
      sub.filter = [=](const Timestamped<Pt>& it) {
        return prf_unit(seed, {kSaltZ, ladder_index, static_cast<std::uint64_t>(i),
                               detail::point_hash(seed, it.value)}) < p;
      };
      sub.bucketer = [g = grids, i](const Timestamped<Pt>& it) { return g.cell(it.value, i); };
      sub.processor = [](const Timestamped<Pt>&) { return ProcInfo{}; };
      sub.unit_size = [d = params.d](const Timestamped<Pt>&) { return d; };
      sub.threshold = std::max<std::int64_t>(
          static_cast<std::int64_t>(std::ceil(10.0 * p * r * static_cast<double>(params.d))),
          params.d);
      spec.subs.push_back(std::move(sub));
    }
  }
  for (std::int64_t i = 0; i <= L; ++i) {
    const double r = params.R(i, o);
    // Z': same shape, sampling rate p'_i.
    const double p = params.p_zp(i, o);
    SubSketchSpec<Pt> sub;
    sub.filter = [=](const Timestamped<Pt>& it) {
      return prf_unit(seed, {kSaltZprime, ladder_index, static_cast<std::uint64_t>(i),
                             detail::point_hash(seed, it.value)}) < p;
    };
    sub.bucketer = [g = grids, i](const Timestamped<Pt>& it) { return g.cell(it.value, i); };
    sub.processor = [](const Timestamped<Pt>&) { return ProcInfo{}; };
    sub.unit_size = [d = params.d](const Timestamped<Pt>&) { return d; };
    sub.threshold = static_cast<std::int64_t>(
        std::ceil(10.0 * p * r * static_cast<double>(params.d)));
    spec.subs.push_back(std::move(sub));
  }
  const std::int64_t m_hat = params.m_hat();
  for (std::int64_t i = 0; i <= L; ++i) {
    const double r = params.R(i, o);
    const double p = params.p_zpp(i, o);
    const std::int64_t threshold = static_cast<std::int64_t>(std::ceil(
        10.0 * p * static_cast<double>(m_hat) * r * static_cast<double>(params.d)));
    // Z'': the processed-info of x is a random subset of the m_hat replica
    // slots, each included with probability p''_i; the filter passes iff
    // the subset is nonempty and the unit size is the subset cardinality.
    // Subsets too large to survive the bucket threshold are counted but not
    // materialized (such an entry flushes its bucket and is then evicted
    // itself, so its contents are never read).
    auto lookup = [=](const Pt& x) -> const std::pair<std::int64_t, ProcInfo>& {
      auto key = std::make_pair(i, x.c);
      auto it = cache->memo.find(key);
      if (it != cache->memo.end()) return it->second;
      CounterRng rng(prf(seed, {kSaltZdoubleprime, ladder_index,
                                static_cast<std::uint64_t>(i), detail::point_hash(seed, x)}));
      const std::int64_t c = detail::binomial_sample(m_hat, p, rng);
      ProcInfo indices;
      if (c > 0 && c <= threshold) indices = detail::sample_distinct(m_hat, c, rng);
      return cache->memo.emplace(std::move(key), std::make_pair(c, std::move(indices)))
          .first->second;
    };
    SubSketchSpec<Pt> sub;
    sub.filter = [lookup](const Timestamped<Pt>& it) { return lookup(it.value).first > 0; };
    sub.bucketer = [g = grids, i](const Timestamped<Pt>& it) { return g.cell(it.value, i); };
    sub.processor = [lookup](const Timestamped<Pt>& it) { return lookup(it.value).second; };
    sub.unit_size = [lookup](const Timestamped<Pt>& it) { return lookup(it.value).first; };
    sub.threshold = threshold;
    spec.subs.push_back(std::move(sub));
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Recovery pipeline: heavy/crucial partition -> per-level crucial counts ->
// sensitivity-sampled coreset.
// ---------------------------------------------------------------------------

struct HeavyCrucialMap {
  // heavy[i]: heavy cell ids at grid level i (0-based vector index = level).
  std::vector<std::set<BucketKey>> heavy;

  // Crucial level of a point: the first level whose cell is not heavy while
  // the parent chain is; nullopt if the chain stays heavy through level L.
  std::optional<std::int64_t> crucial_level(const ShiftedGrids& grids, const Pt& x) const {
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(heavy.size()); ++i) {
      if (!heavy[static_cast<std::size_t>(i)].count(grids.cell(x, i))) return i;
    }
    return std::nullopt;
  }

  bool is_crucial_cell(std::int64_t i, const BucketKey& cell) const {
    if (heavy[static_cast<std::size_t>(i)].count(cell)) return false;
    if (i == 0) return true;  // parent is the always-heavy root
    return heavy[static_cast<std::size_t>(i - 1)].count(ShiftedGrids::parent(cell)) > 0;
  }
};

// Top-down heavy marking from the Z part of a level snapshot: the level -1
// root is heavy unconditionally; a cell is heavy iff its estimated count
// meets R_i and its parent is heavy.
inline HeavyCrucialMap heavy_partition(const LevelSnapshot<Pt>& snap,
                                       const ClusterParams& params) {
  const std::int64_t L = params.L();
  HeavyCrucialMap map;
  map.heavy.resize(static_cast<std::size_t>(L + 1));
  for (std::int64_t i = 0; i <= L; ++i) {
    const double p = params.p_z(i, snap.o);
    const double r = params.R(i, snap.o);
    for (const auto& [cell, entries] : snap.subs.at(static_cast<std::size_t>(i))) {
      const double est = static_cast<double>(entries.size()) / p;
      if (est < r) continue;
      if (i > 0 &&
          !map.heavy[static_cast<std::size_t>(i - 1)].count(ShiftedGrids::parent(cell)))
        continue;
      map.heavy[static_cast<std::size_t>(i)].insert(cell);
    }
  }
  return map;
}

struct CoresetPlan {
  std::vector<double> lambda;        // estimated |X^i| per grid level
  std::vector<std::int64_t> active;  // I = levels with lambda_i >= gamma R_i
  double t_prime = 0;
  std::int64_t m = 0;
};

inline CoresetPlan crucial_stats(const LevelSnapshot<Pt>& snap, const HeavyCrucialMap& heavy,
                                 const ClusterParams& params) {
  const std::int64_t L = params.L();
  const double gamma = params.gamma();
  CoresetPlan plan;
  plan.lambda.assign(static_cast<std::size_t>(L + 1), 0.0);
  for (std::int64_t i = 0; i <= L; ++i) {
    const auto& sub = snap.subs.at(static_cast<std::size_t>(L + 1 + i));
    std::int64_t stored = 0;
    for (const auto& [cell, entries] : sub)
      if (heavy.is_crucial_cell(i, cell)) stored += static_cast<std::int64_t>(entries.size());
    plan.lambda[static_cast<std::size_t>(i)] =
        static_cast<double>(stored) / params.p_zp(i, snap.o);
  }
  for (std::int64_t i = 0; i <= L; ++i) {
    const double li = plan.lambda[static_cast<std::size_t>(i)];
    if (li >= gamma * params.R(i, snap.o) && li > 0) {
      plan.active.push_back(i);
      plan.t_prime += li * params.min_factor(i, snap.o);
    }
  }
  if (plan.t_prime > 0) {
    const double logs = std::log(static_cast<double>(params.n)) *
                            std::log(2.0 * plan.t_prime) +
                        std::log(1.0 / params.delta);
    plan.m = static_cast<std::int64_t>(std::ceil(
        params.profile.m_const * plan.t_prime / (params.eps * params.eps) * std::max(logs, 1.0)));
    plan.m = std::max<std::int64_t>(plan.m, 1);
  }
  return plan;
}

struct Coreset {
  std::vector<Pt> points;
  std::vector<double> weights;
  std::vector<std::int64_t> level_of;  // grid level each sample was drawn from
};

// Materialize the replica sets Y-hat and run the simulating process: m
// times, pick a level proportional to its sensitivity share, consume one
// unused nonempty replica of that level, and emit one uniform member of it.
// Exhausting a needed level's replicas is a FAIL (weak-sketch semantics).
inline std::optional<Coreset> draw_coreset(const LevelSnapshot<Pt>& snap,
                                           const HeavyCrucialMap& heavy,
                                           const CoresetPlan& plan,
                                           const ClusterParams& params,
                                           std::uint64_t seed) {
  const std::int64_t L = params.L();
  Coreset out;
  if (plan.m == 0) return out;  // empty active set: empty coreset

  // Per active level: replica id -> members drawn from crucial cells only.
  std::map<std::int64_t, std::vector<std::vector<const Pt*>>> replicas;
  std::map<std::int64_t, std::size_t> next_replica;
  for (std::int64_t i : plan.active) {
    std::map<std::int64_t, std::vector<const Pt*>> by_id;
    const auto& sub = snap.subs.at(static_cast<std::size_t>(2 * (L + 1) + i));
    for (const auto& [cell, entries] : sub) {
      if (!heavy.is_crucial_cell(i, cell)) continue;
      for (const auto& e : entries)
        for (std::int64_t j : e.proc) by_id[j].push_back(&e.item.value);
    }
    auto& list = replicas[i];
    for (auto& [j, members] : by_id) list.push_back(std::move(members));
    next_replica[i] = 0;
  }

  // Level-selection distribution: lambda_i * min_factor_i / t'.
  std::vector<double> cum;
  double acc = 0;
  for (std::int64_t i : plan.active) {
    acc += plan.lambda[static_cast<std::size_t>(i)] * params.min_factor(i, snap.o) /
           plan.t_prime;
    cum.push_back(acc);
  }

  CounterRng rng(prf(seed, {kSaltDraw, static_cast<std::uint64_t>(snap.level_index)}));
  for (std::int64_t s = 0; s < plan.m; ++s) {
    const double u = rng.next_unit() * acc;
    std::size_t pos = 0;
    while (pos + 1 < cum.size() && u >= cum[pos]) ++pos;
    const std::int64_t i = plan.active[pos];
    auto& list = replicas[i];
    auto& next = next_replica[i];
    if (next >= list.size()) return std::nullopt;  // replicas exhausted: FAIL
    const auto& members = list[next++];
    const Pt* x = members[rng.next_below(members.size())];
    out.points.push_back(*x);
    out.weights.push_back(plan.t_prime /
                          (static_cast<double>(plan.m) * params.min_factor(i, snap.o)));
    out.level_of.push_back(i);
  }
  return out;
}

}  // namespace swin
