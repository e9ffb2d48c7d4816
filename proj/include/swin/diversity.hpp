#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "swin/core.hpp"
#include "swin/div_value.hpp"
#include "swin/geometry.hpp"

namespace swin {

struct DivParams {
  std::int64_t k = 2;
  std::int64_t t = 1;  // component count for the t-variants
  double eps = 0.25;
  std::int64_t d = 2;
  std::int64_t Delta = 64;
  DivKind kind = DivKind::remote_edge;

  double mu(double o) const {
    return eps * o / (10.0 * std::sqrt(static_cast<double>(d)));
  }
};

// Two deterministic sub-sketches: Z1 keeps the k latest window points in a
// single bucket; Z2 keeps up to T_div latest points per grid cell of side
// mu.  Unit size is d per point.
inline SketchSpec<Pt> div_spec(double o, const DivParams& params) {
  const double mu = params.mu(o);
  const std::int64_t tdiv = div_retention(params.kind, params.k);
  SketchSpec<Pt> spec;

  SubSketchSpec<Pt> z1;
  z1.filter = [](const Timestamped<Pt>&) { return true; };
  z1.bucketer = [](const Timestamped<Pt>&) { return BucketKey{0}; };
  z1.processor = [](const Timestamped<Pt>&) { return ProcInfo{}; };
  z1.unit_size = [d = params.d](const Timestamped<Pt>&) { return d; };
  z1.threshold = params.k * params.d;
  spec.subs.push_back(std::move(z1));

  SubSketchSpec<Pt> z2;
  z2.filter = [](const Timestamped<Pt>&) { return true; };
  z2.bucketer = [mu](const Timestamped<Pt>& it) { return grid_index(it.value, mu); };
  z2.processor = [](const Timestamped<Pt>&) { return ProcInfo{}; };
  z2.unit_size = [d = params.d](const Timestamped<Pt>&) { return d; };
  z2.threshold = tdiv * params.d;
  spec.subs.push_back(std::move(z2));
  return spec;
}

struct DivSolution {
  std::vector<Pt> points;
  double value = 0;       // normalized objective
  bool certified = true;  // false when the greedy fallback was used
};

namespace detail {

// Exact maximum of the normalized objective over k-subsets of the distinct
// points.  Diversity is defined on point sets: the optimum is 0 exactly when
// fewer than k distinct values exist, and duplicates never help otherwise.
inline double max_div_enumerate(std::vector<Pt> pts, std::int64_t k, DivKind kind,
                                std::int64_t t, std::vector<Pt>* witness = nullptr) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Pt> reduced = std::move(pts);
  if (static_cast<std::int64_t>(reduced.size()) < k) return 0;

  double best = -1;
  std::vector<std::size_t> pick;
  std::vector<Pt> q(static_cast<std::size_t>(k));
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (pick.size() == static_cast<std::size_t>(k)) {
      for (std::size_t i = 0; i < pick.size(); ++i) q[i] = reduced[pick[i]];
      const double v = div_value_normalized(q, kind, t);
      if (v > best) {
        best = v;
        if (witness) *witness = q;
      }
      return;
    }
    for (std::size_t i = start; i < reduced.size(); ++i) {
      pick.push_back(i);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
  return best < 0 ? 0 : best;
}

// Farthest-point heuristic for instances beyond the exact caps.
inline std::vector<Pt> gonzalez_pick(const std::vector<Pt>& pts, std::int64_t k) {
  std::vector<Pt> chosen;
  if (pts.empty()) return chosen;
  // Start from one end of a farthest pair.
  std::size_t a = 0, b = 0;
  std::int64_t best = -1;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (sqdist(pts[i], pts[j]) > best) {
        best = sqdist(pts[i], pts[j]);
        a = i;
        b = j;
      }
  chosen.push_back(pts[a]);
  if (k >= 2 && pts.size() >= 2) chosen.push_back(pts[b]);
  while (static_cast<std::int64_t>(chosen.size()) < k) {
    std::size_t far = 0;
    std::int64_t far_d = -1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::int64_t dmin = std::numeric_limits<std::int64_t>::max();
      for (const auto& c : chosen) dmin = std::min(dmin, sqdist(pts[i], c));
      if (dmin > far_d) {
        far_d = dmin;
        far = i;
      }
    }
    chosen.push_back(pts[far]);
  }
  return chosen;
}

inline double binomial_estimate(std::size_t n, std::size_t k) {
  double v = 1;
  for (std::size_t i = 0; i < k; ++i) v *= static_cast<double>(n - i) / static_cast<double>(i + 1);
  return v;
}

}  // namespace detail

// Reconstruct S_mu from a level snapshot (union of Z1 and Z2, deduplicated
// by arrival index) and maximize the objective over it.
inline std::optional<DivSolution> recover_div(const LevelSnapshot<Pt>& snap,
                                              const DivParams& params,
                                              bool exact,
                                              double enumeration_budget = 5e6) {
  std::map<std::int64_t, Pt> by_tau;
  for (const auto& sub : snap.subs)
    for (const auto& [key, entries] : sub)
      for (const auto& e : entries) by_tau.emplace(e.item.tau, e.item.value);
  std::vector<Pt> s_mu;
  s_mu.reserve(by_tau.size());
  for (const auto& [tau, p] : by_tau) s_mu.push_back(p);
  std::sort(s_mu.begin(), s_mu.end());
  s_mu.erase(std::unique(s_mu.begin(), s_mu.end()), s_mu.end());

  DivSolution sol;
  if (static_cast<std::int64_t>(s_mu.size()) < params.k) {
    sol.points = s_mu;
    sol.value = 0;
    return sol;
  }
  const bool fits = detail::binomial_estimate(s_mu.size(), static_cast<std::size_t>(params.k)) <=
                    enumeration_budget;
  if (exact && fits) {
    sol.value = detail::max_div_enumerate(s_mu, params.k, params.kind, params.t, &sol.points);
    sol.certified = true;
  } else {
    sol.points = detail::gonzalez_pick(s_mu, params.k);
    sol.value = div_value_normalized(sol.points, params.kind, params.t);
    sol.certified = false;
  }
  return sol;
}

// Zero-OPT tracker: a capped list that provably retains enough duplicates to
// evaluate the window optimum exactly whenever fewer than k distinct values
// survive in the window.
class DivZeroOptTracker {
 public:
  DivZeroOptTracker(std::int64_t k, DivKind kind, std::int64_t t)
      : k_(k), t_(t), kind_(kind), tdiv_(div_retention(kind, k)) {}

  void ingest(const Pt& x, std::int64_t tau) {
    entries_.push_back({x, tau});
    std::int64_t equal = 0;
    for (const auto& e : entries_)
      if (e.value == x) ++equal;
    if (equal == tdiv_ + 1) {
      // Too many copies of this value: drop the earliest copy.
      for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].value == x) {
          entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(i));
          break;
        }
    } else if (static_cast<std::int64_t>(entries_.size()) == k_ * tdiv_ + 1) {
      entries_.erase(entries_.begin());  // earliest overall
    }
  }

  // Window-restricted view; nullopt means ">= k distinct points, defer to
  // the ladder".  Otherwise the returned value is OPT of the whole window.
  std::optional<double> query(std::int64_t N, std::int64_t W) const {
    const std::int64_t lo = N - W + 1;
    std::vector<Pt> in_window;
    for (const auto& e : entries_)
      if (e.tau >= lo) in_window.push_back(e.value);
    std::vector<Pt> distinct = in_window;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (static_cast<std::int64_t>(distinct.size()) >= k_) return std::nullopt;
    return detail::max_div_enumerate(in_window, k_, kind_, t_);
  }

 private:
  struct Stamped {
    Pt value;
    std::int64_t tau;
  };
  std::int64_t k_;
  std::int64_t t_;
  DivKind kind_;
  std::int64_t tdiv_;
  std::vector<Stamped> entries_;  // tau ascending
};

}  // namespace swin
