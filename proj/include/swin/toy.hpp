#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include "swin/core.hpp"
#include "swin/prf.hpp"

namespace swin {

// Salt words separating the PRF streams of the different modules.
enum Salt : std::uint64_t {
  kSaltOnes = 1,
  kSaltMedian = 2,
  kSaltKcoverHash = 3,
  kSaltZ = 4,
  kSaltZprime = 5,
  kSaltZdoubleprime = 6,
  kSaltShift = 7,
  kSaltDraw = 8,
  kSaltJl = 9,
  kSaltGen = 10,
};

// Windowed count-of-ones and the toy two-bucket 1-median sketch.  Both keep
// at most k_thr sampled items per bucket and estimate counts as |Z| / p.

struct ToyParams {
  double eps = 0.2;
  double delta = 0.05;
  double c = 10;  // constant inside the sampling rate; profile-configurable

  double k_thr() const { return 10.0 * std::log(1.0 / delta) / (eps * eps); }

  std::int64_t k_thr_units() const {
    return static_cast<std::int64_t>(std::ceil(k_thr()));
  }

  double p(double o) const {
    return std::min(c * std::log(1.0 / delta) / (eps * eps * o), 1.0);
  }
};

using BitItem = std::uint8_t;

// One sub-sketch: items with value 1 pass with probability p (coin keyed by
// the arrival index, so repeated 1s draw independent coins), all land in a
// single bucket of unit-size-1 entries capped at k_thr.
inline SketchSpec<BitItem> ones_spec(double o, const ToyParams& params,
                                     std::uint64_t seed, std::size_t level_index) {
  const double p = params.p(o);
  SubSketchSpec<BitItem> sub;
  sub.filter = [=](const Timestamped<BitItem>& it) {
    if (it.value != 1) return false;
    return prf_unit(seed, {kSaltOnes, level_index, static_cast<std::uint64_t>(it.tau)}) < p;
  };
  sub.bucketer = [](const Timestamped<BitItem>&) { return BucketKey{0}; };
  sub.processor = [](const Timestamped<BitItem>&) { return ProcInfo{}; };
  sub.unit_size = [](const Timestamped<BitItem>&) { return std::int64_t{1}; };
  sub.threshold = params.k_thr_units();
  SketchSpec<BitItem> spec;
  spec.subs.push_back(std::move(sub));
  return spec;
}

// A full bucket means the sketch may have dropped in-window samples, so the
// level cannot certify its estimate and reports FAIL.
inline std::optional<double> ones_recover(const LevelSnapshot<BitItem>& snap,
                                          const ToyParams& params) {
  const double p = params.p(snap.o);
  std::int64_t count = 0;
  for (const auto& [key, entries] : snap.subs.at(0))
    count += static_cast<std::int64_t>(entries.size());
  if (count >= params.k_thr_units()) return std::nullopt;
  return static_cast<double>(count) / p;
}

// Toy 1-median over {0,1}: two buckets, one per symbol, each sampled with
// probability p and capped at k_thr; the recovered value is min(|X_0|,|X_1|).
inline SketchSpec<BitItem> toy_median_spec(double o, const ToyParams& params,
                                           std::uint64_t seed, std::size_t level_index) {
  const double p = params.p(o);
  SubSketchSpec<BitItem> sub;
  sub.filter = [=](const Timestamped<BitItem>& it) {
    return prf_unit(seed, {kSaltMedian, level_index, static_cast<std::uint64_t>(it.tau)}) < p;
  };
  sub.bucketer = [](const Timestamped<BitItem>& it) {
    return BucketKey{static_cast<std::int64_t>(it.value)};
  };
  sub.processor = [](const Timestamped<BitItem>&) { return ProcInfo{}; };
  sub.unit_size = [](const Timestamped<BitItem>&) { return std::int64_t{1}; };
  sub.threshold = params.k_thr_units();
  SketchSpec<BitItem> spec;
  spec.subs.push_back(std::move(sub));
  return spec;
}

// FAIL when either bucket's reconstruction may be truncated.
inline std::optional<double> toy_median_recover(const LevelSnapshot<BitItem>& snap,
                                                const ToyParams& params) {
  const double p = params.p(snap.o);
  std::int64_t count[2] = {0, 0};
  for (const auto& [key, entries] : snap.subs.at(0)) {
    const int symbol = static_cast<int>(key.at(0));
    count[symbol] += static_cast<std::int64_t>(entries.size());
  }
  if (count[0] >= params.k_thr_units() || count[1] >= params.k_thr_units())
    return std::nullopt;
  return static_cast<double>(std::min(count[0], count[1])) / p;
}

}  // namespace swin
