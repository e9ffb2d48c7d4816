#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace swin {

// ---------------------------------------------------------------------------
// Domain types for the generic bucketing engine.
//
// An item is any problem payload (a bit, a set-element pair, a point) tagged
// with its 1-based arrival index tau.  The engine assigns tau; callers never
// do.
// ---------------------------------------------------------------------------

template <class V>
struct Timestamped {
  V value;
  std::int64_t tau = 0;
};

// Bucket ids and processed-info are stored uniformly as small integer
// vectors: a k-cover bucket is the one-element vector {elem_id}, a grid
// bucket is the floor-index vector of a cell, and the replica-subset
// processed-info of the clustering module is the sorted index list itself.
using BucketKey = std::vector<std::int64_t>;
using ProcInfo = std::vector<std::int64_t>;

// One sub-sketch: filter, bucketer, processor, unit-size accounting and a
// per-bucket threshold in abstract space units.  All four functions must be
// pure and deterministic given (seed, item); the seed is baked into the
// closures when a spec is built.
template <class V>
struct SubSketchSpec {
  std::function<bool(const Timestamped<V>&)> filter;
  std::function<BucketKey(const Timestamped<V>&)> bucketer;
  std::function<ProcInfo(const Timestamped<V>&)> processor;
  std::function<std::int64_t(const Timestamped<V>&)> unit_size;
  std::int64_t threshold = 0;
};

template <class V>
struct SketchSpec {
  std::vector<SubSketchSpec<V>> subs;
};

// Geometric ladder of guesses {m, 2m, 4m, ...} truncated at the first level
// that reaches M, so M itself is always covered by the last level.
struct GuessLadder {
  std::vector<double> levels;
  double m = 0;
  double M = 0;
};

inline GuessLadder make_ladder(double m, double M) {
  if (!(m > 0)) throw std::invalid_argument("make_ladder: m must be positive");
  if (M < m) throw std::invalid_argument("make_ladder: M must be >= m");
  GuessLadder g;
  g.m = m;
  g.M = M;
  double o = m;
  g.levels.push_back(o);
  while (o < M) {
    o *= 2;
    g.levels.push_back(o);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Per-level sketch state.
// ---------------------------------------------------------------------------

template <class V>
struct Entry {
  Timestamped<V> item;
  ProcInfo proc;
  std::int64_t units = 0;
};

template <class V>
inline bool operator==(const Entry<V>& a, const Entry<V>& b) {
  return a.item.tau == b.item.tau && a.item.value == b.item.value &&
         a.proc == b.proc && a.units == b.units;
}

template <class V>
struct Bucket {
  std::deque<Entry<V>> items;  // tau ascending
  std::int64_t load = 0;       // sum of units, always <= threshold after ingest
};

template <class V>
struct SubState {
  std::map<BucketKey, Bucket<V>> buckets;
};

// Flattened, immutable view of one level's buckets.  Used both for window
// snapshots and for structural-equality checks against the offline oracle.
template <class V>
using SubContents = std::map<BucketKey, std::vector<Entry<V>>>;

template <class V>
struct LevelSnapshot {
  double o = 0;
  std::size_t level_index = 0;
  std::vector<SubContents<V>> subs;
};

template <class V>
struct SnapshotSet {
  std::int64_t N = 0;
  std::int64_t W = 0;
  std::vector<LevelSnapshot<V>> levels;  // ascending o, only qualifying levels
};

template <class V>
struct LevelState {
  double o = 0;
  SketchSpec<V> spec;
  std::vector<SubState<V>> subs;
  std::int64_t l = 1;       // left pointer: stored items all have tau >= l
  std::int64_t budget = 0;  // total stored units across sub-sketches
  // Locations of every stored entry keyed by tau, so the budget loop can
  // drop a timestamp's entries without scanning all buckets.
  std::map<std::int64_t, std::vector<std::pair<int, BucketKey>>> by_tau;
};

template <class R>
struct WindowedEstimate {
  R result{};
  double level = 0;  // the o* that produced the result
  bool ok = false;
};

// ---------------------------------------------------------------------------
// The ladder engine: one sketch per guess level, shared budget cap S.
// ---------------------------------------------------------------------------

template <class V>
class LadderEngine {
 public:
  LadderEngine(const GuessLadder& ladder,
               const std::function<SketchSpec<V>(double o)>& make_spec,
               std::int64_t S)
      : S_(S) {
    levels_.reserve(ladder.levels.size());
    for (double o : ladder.levels) {
      LevelState<V> st;
      st.o = o;
      st.spec = make_spec(o);
      st.subs.resize(st.spec.subs.size());
      levels_.push_back(std::move(st));
    }
  }

  std::int64_t now() const { return N_; }
  std::int64_t budget_cap() const { return S_; }
  const std::vector<LevelState<V>>& levels() const { return levels_; }

  // Ingest the next item: timestamp it, insert into every level, evict
  // bucket overflow (earliest tau first, one entry per loop step), then
  // advance the left pointer while the level's space budget exceeds S.
  void ingest(const V& value) {
    Timestamped<V> item{value, ++N_};
    for (auto& lvl : levels_) ingest_level(lvl, item);
  }

  // Window snapshot: levels whose left pointer still covers the window,
  // entries restricted to tau in [N-W+1, N].
  SnapshotSet<V> snapshot(std::int64_t W) const {
    if (W < 1) throw std::invalid_argument("snapshot: W must be >= 1");
    SnapshotSet<V> out;
    out.N = N_;
    out.W = W;
    // Window start, clamped: when W >= N the window is the whole stream and
    // retaining from tau = 1 covers it.
    const std::int64_t lo = std::max<std::int64_t>(1, N_ - W + 1);
    for (std::size_t li = 0; li < levels_.size(); ++li) {
      const auto& lvl = levels_[li];
      if (lvl.l > lo) continue;  // level cannot reconstruct the window
      LevelSnapshot<V> snap;
      snap.o = lvl.o;
      snap.level_index = li;
      snap.subs.resize(lvl.subs.size());
      for (std::size_t i = 0; i < lvl.subs.size(); ++i) {
        for (const auto& [key, bucket] : lvl.subs[i].buckets) {
          std::vector<Entry<V>> kept;
          for (const auto& e : bucket.items)
            if (e.item.tau >= lo) kept.push_back(e);
          if (!kept.empty()) snap.subs[i].emplace(key, std::move(kept));
        }
      }
      out.levels.push_back(std::move(snap));
    }
    return out;
  }

  // Full (non-windowed) contents of one level, for equivalence checks.
  LevelSnapshot<V> materialize(std::size_t level_index) const {
    const auto& lvl = levels_.at(level_index);
    LevelSnapshot<V> snap;
    snap.o = lvl.o;
    snap.level_index = level_index;
    snap.subs.resize(lvl.subs.size());
    for (std::size_t i = 0; i < lvl.subs.size(); ++i)
      for (const auto& [key, bucket] : lvl.subs[i].buckets)
        snap.subs[i].emplace(key, std::vector<Entry<V>>(bucket.items.begin(), bucket.items.end()));
    return snap;
  }

  // Space budget per Definition-style accounting: sum over buckets of
  // min(threshold, stored load).  Stored load never exceeds the threshold,
  // so this equals the running budget counter; both are exposed so tests can
  // cross-check the bookkeeping.
  std::vector<std::int64_t> space_budget() const {
    std::vector<std::int64_t> per_level;
    per_level.reserve(levels_.size());
    for (const auto& lvl : levels_) {
      std::int64_t total = 0;
      for (std::size_t i = 0; i < lvl.subs.size(); ++i) {
        const std::int64_t t = lvl.spec.subs[i].threshold;
        for (const auto& [key, bucket] : lvl.subs[i].buckets)
          total += std::min(t, bucket.load);
      }
      per_level.push_back(total);
    }
    return per_level;
  }

 private:
  void ingest_level(LevelState<V>& lvl, const Timestamped<V>& item) {
    for (std::size_t i = 0; i < lvl.spec.subs.size(); ++i) {
      const auto& sub = lvl.spec.subs[i];
      if (!sub.filter(item)) continue;
      Entry<V> e;
      e.item = item;
      e.proc = sub.processor(item);
      e.units = sub.unit_size(item);
      BucketKey key = sub.bucketer(item);
      auto& bucket = lvl.subs[i].buckets[key];
      bucket.items.push_back(std::move(e));
      bucket.load += bucket.items.back().units;
      lvl.budget += bucket.items.back().units;
      lvl.by_tau[item.tau].emplace_back(static_cast<int>(i), key);
      // Bucket overflow: evict the earliest-timestamp entry, one per step.
      while (bucket.load > sub.threshold) {
        const Entry<V>& victim = bucket.items.front();
        bucket.load -= victim.units;
        lvl.budget -= victim.units;
        erase_location(lvl, victim.item.tau, static_cast<int>(i), key);
        bucket.items.pop_front();
      }
      if (bucket.items.empty()) lvl.subs[i].buckets.erase(key);
    }
    // Budget loop: while the level is over budget, drop every entry with
    // tau <= l and advance l.  Timestamps with no stored entries only move
    // the pointer, so we jump straight to the earliest stored timestamp.
    while (lvl.budget > S_) {
      assert(!lvl.by_tau.empty());
      auto it = lvl.by_tau.begin();
      const std::int64_t tau = it->first;
      for (const auto& [sub_idx, key] : it->second) {
        auto& sub = lvl.subs[sub_idx];
        auto bit = sub.buckets.find(key);
        assert(bit != sub.buckets.end());
        auto& bucket = bit->second;
        assert(!bucket.items.empty() && bucket.items.front().item.tau == tau);
        bucket.load -= bucket.items.front().units;
        lvl.budget -= bucket.items.front().units;
        bucket.items.pop_front();
        if (bucket.items.empty()) sub.buckets.erase(bit);
      }
      lvl.by_tau.erase(it);
      lvl.l = std::max(lvl.l, tau) + 1;
    }
  }

  static void erase_location(LevelState<V>& lvl, std::int64_t tau, int sub_idx,
                             const BucketKey& key) {
    auto it = lvl.by_tau.find(tau);
    if (it == lvl.by_tau.end()) return;
    auto& locs = it->second;
    for (std::size_t j = 0; j < locs.size(); ++j) {
      if (locs[j].first == sub_idx && locs[j].second == key) {
        locs.erase(locs.begin() + static_cast<std::ptrdiff_t>(j));
        break;
      }
    }
    if (locs.empty()) lvl.by_tau.erase(it);
  }

  std::int64_t S_;
  std::int64_t N_ = 0;
  std::vector<LevelState<V>> levels_;
};

// ---------------------------------------------------------------------------
// Offline oracle: materialize the sketch of an item sequence directly from
// its definition.  Overflowing buckets keep the maximal latest-timestamp
// subset, i.e. exactly the entries whose suffix load fits the threshold.
// ---------------------------------------------------------------------------

template <class V>
std::vector<SubContents<V>> offline_sketch(const std::vector<Timestamped<V>>& items,
                                           const SketchSpec<V>& spec) {
  std::vector<SubContents<V>> out(spec.subs.size());
  for (std::size_t i = 0; i < spec.subs.size(); ++i) {
    const auto& sub = spec.subs[i];
    SubContents<V> full;
    for (const auto& item : items) {
      if (!sub.filter(item)) continue;
      Entry<V> e;
      e.item = item;
      e.proc = sub.processor(item);
      e.units = sub.unit_size(item);
      full[sub.bucketer(item)].push_back(std::move(e));
    }
    for (auto& [key, entries] : full) {
      // Keep x iff the total units of same-bucket entries with tau >= tau(x)
      // fit within the threshold.  Units are positive, so the kept set is the
      // longest suffix whose load is within budget.
      std::int64_t acc = 0;
      std::size_t first_kept = entries.size();
      for (std::size_t j = entries.size(); j-- > 0;) {
        acc += entries[j].units;
        if (acc > sub.threshold) break;
        first_kept = j;
      }
      if (first_kept == entries.size()) continue;  // nothing fits
      std::vector<Entry<V>> kept(entries.begin() + static_cast<std::ptrdiff_t>(first_kept),
                                 entries.end());
      out[i].emplace(key, std::move(kept));
    }
  }
  return out;
}

template <class V>
bool same_contents(const std::vector<SubContents<V>>& a,
                   const std::vector<SubContents<V>>& b) {
  return a == b;
}

// ---------------------------------------------------------------------------
// Smallest-valid-level recovery: walk qualifying levels in ascending o and
// return the first recovery that does not FAIL (empty optional).
// ---------------------------------------------------------------------------

template <class V, class R>
WindowedEstimate<R> recover(
    const SnapshotSet<V>& snaps,
    const std::function<std::optional<R>(const LevelSnapshot<V>&)>& recover_fn) {
  WindowedEstimate<R> out;
  for (const auto& snap : snaps.levels) {
    if (auto r = recover_fn(snap)) {
      out.result = std::move(*r);
      out.level = snap.o;
      out.ok = true;
      return out;
    }
  }
  return out;  // status FAIL
}

}  // namespace swin
