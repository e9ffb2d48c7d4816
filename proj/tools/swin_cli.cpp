// Command-line harness: stream ingestion, seeded experiment runs, synthetic
// stream generation and engine-vs-offline verification.  Reports are plain
// text: '#'-prefixed resolved-config lines, a header row, one row per query,
// a blank line, then a summary block.  Identical (config, seed) runs produce
// byte-identical reports; wall times are only emitted under --timing.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "swin/cluster.hpp"
#include "swin/cluster_solve.hpp"
#include "swin/core.hpp"
#include "swin/diversity.hpp"
#include "swin/kcover.hpp"
#include "swin/oracles.hpp"
#include "swin/toy.hpp"

namespace {

using namespace swin;

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Report plumbing.
// ---------------------------------------------------------------------------

struct Report {
  std::vector<std::pair<std::string, std::string>> config;
  std::string header;
  std::vector<std::string> rows;
  std::vector<std::string> summary;

  void add(const std::string& k, const std::string& v) { config.emplace_back(k, v); }
  void add(const std::string& k, double v) { add(k, fmt_g(v)); }
  void add(const std::string& k, std::int64_t v) { add(k, std::to_string(v)); }

  void write(std::ostream& os) const {
    for (const auto& [k, v] : config) os << "# " << k << "=" << v << "\n";
    os << header << "\n";
    for (const auto& r : rows) os << r << "\n";
    os << "\n";
    for (const auto& s : summary) os << s << "\n";
  }
};

void emit(const Report& rep, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    rep.write(std::cout);
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + out_path);
  rep.write(os);
}

// ---------------------------------------------------------------------------
// Stream files.
// ---------------------------------------------------------------------------

[[noreturn]] void stream_error(const std::string& path, std::size_t line,
                               const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open stream file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<BitItem> read_bits(const std::string& path) {
  auto lines = read_lines(path);
  std::vector<BitItem> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i] == "0")
      out.push_back(0);
    else if (lines[i] == "1")
      out.push_back(1);
    else
      stream_error(path, i + 1, "expected 0 or 1, got '" + lines[i] + "'");
  }
  return out;
}

std::vector<Edge> read_edges(const std::string& path) {
  auto lines = read_lines(path);
  std::vector<Edge> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::int64_t s = 0, e = 0;
    char tab = 0;
    std::istringstream is(lines[i]);
    if (!(is >> s >> std::noskipws >> tab >> std::skipws >> e) || tab != '\t')
      stream_error(path, i + 1, "expected 'set<TAB>elem', got '" + lines[i] + "'");
    out.push_back({s, e});
  }
  return out;
}

std::vector<Pt> read_points(const std::string& path, std::int64_t d) {
  auto lines = read_lines(path);
  std::vector<Pt> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    Pt p;
    std::istringstream is(lines[i]);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      try {
        p.c.push_back(std::stoll(tok));
      } catch (const std::exception&) {
        stream_error(path, i + 1, "bad coordinate '" + tok + "'");
      }
    }
    if (static_cast<std::int64_t>(p.c.size()) != d)
      stream_error(path, i + 1,
                   "expected " + std::to_string(d) + " coordinates, got " +
                       std::to_string(p.c.size()));
    out.push_back(std::move(p));
  }
  return out;
}

// Query checkpoints: every W/2 arrivals plus end of stream.
std::vector<std::int64_t> checkpoints(std::int64_t total, std::int64_t W) {
  std::vector<std::int64_t> taus;
  const std::int64_t step = std::max<std::int64_t>(1, W / 2);
  for (std::int64_t t = step; t < total; t += step) taus.push_back(t);
  if (total > 0) taus.push_back(total);
  return taus;
}

// Run fn(seed_index) for every seed on a small worker pool; rows stay in
// seed order so reports are deterministic regardless of scheduling.
void parallel_over_seeds(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(count, std::min(hw, 8u));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

struct SeedResult {
  std::vector<std::string> rows;
  std::int64_t oracle_rows = 0;
  std::int64_t within = 0;
  std::int64_t fails = 0;
};

std::string wall_cell(bool timing, std::chrono::steady_clock::time_point t0) {
  if (!timing) return "-";
  const auto us = std::chrono::duration_cast<std::chrono::microseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  return std::to_string(us) + "us";
}

void finish_report(Report& rep, const std::vector<SeedResult>& results) {
  std::int64_t rows = 0, oracle_rows = 0, within = 0, fails = 0;
  for (const auto& r : results) {
    rows += static_cast<std::int64_t>(r.rows.size());
    for (const auto& row : r.rows) rep.rows.push_back(row);
    oracle_rows += r.oracle_rows;
    within += r.within;
    fails += r.fails;
  }
  rep.summary.push_back("rows=" + std::to_string(rows));
  rep.summary.push_back("fails=" + std::to_string(fails));
  rep.summary.push_back("oracle_rows=" + std::to_string(oracle_rows));
  rep.summary.push_back("within=" + std::to_string(within));
  if (oracle_rows > 0)
    rep.summary.push_back(
        "within_frac=" + fmt_g(static_cast<double>(within) / static_cast<double>(oracle_rows)));
}

// ---------------------------------------------------------------------------
// toy
// ---------------------------------------------------------------------------

struct ToyOpts {
  std::string stream, out, variant = "ones";
  std::int64_t W = 1000;
  double eps = 0.2, delta = 0.05;
  std::vector<std::uint64_t> seeds{1};
  std::int64_t S = 0;
  bool oracle = false, timing = false;
};

int run_toy(const ToyOpts& opt) {
  const auto bits = read_bits(opt.stream);
  ToyParams params{opt.eps, opt.delta};
  const std::int64_t S = opt.S > 0 ? opt.S : 4 * params.k_thr_units();
  const auto ladder = make_ladder(1, static_cast<double>(opt.W));
  const auto taus = checkpoints(static_cast<std::int64_t>(bits.size()), opt.W);

  Report rep;
  rep.add("cmd", std::string("toy"));
  rep.add("variant", opt.variant);
  rep.add("stream", opt.stream);
  rep.add("W", opt.W);
  rep.add("eps", opt.eps);
  rep.add("delta", opt.delta);
  rep.add("c", params.c);
  rep.add("k_thr", static_cast<std::int64_t>(params.k_thr_units()));
  rep.add("S", S);
  rep.add("ladder_levels", static_cast<std::int64_t>(ladder.levels.size()));
  rep.add("oracle", std::string(opt.oracle ? "on" : "off"));
  rep.header = "seed\ttau\testimate\toracle\tratio\tbudget\tlevels\twall";

  std::vector<SeedResult> results(opt.seeds.size());
  parallel_over_seeds(opt.seeds.size(), [&](std::size_t si) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t seed = opt.seeds[si];
    const bool median = opt.variant == "median";
    LadderEngine<BitItem> eng(
        ladder,
        [&, li = std::size_t{0}](double o) mutable {
          return median ? toy_median_spec(o, params, seed, li++)
                        : ones_spec(o, params, seed, li++);
        },
        S);
    auto& res = results[si];
    std::size_t next_cp = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      eng.ingest(bits[i]);
      if (next_cp >= taus.size() || eng.now() != taus[next_cp]) continue;
      ++next_cp;
      const auto snaps = eng.snapshot(opt.W);
      const auto est = recover<BitItem, double>(snaps, [&](const LevelSnapshot<BitItem>& s) {
        return median ? toy_median_recover(s, params) : ones_recover(s, params);
      });
      std::string oracle_cell = "-", ratio_cell = "-";
      if (opt.oracle) {
        const std::int64_t lo = std::max<std::int64_t>(0, eng.now() - opt.W);
        std::int64_t count[2] = {0, 0};
        for (std::int64_t t = lo; t < eng.now(); ++t) ++count[bits[static_cast<std::size_t>(t)]];
        const double truth =
            median ? static_cast<double>(std::min(count[0], count[1]))
                   : static_cast<double>(count[1]);
        oracle_cell = fmt_g(truth);
        ++res.oracle_rows;
        if (est.ok) {
          const bool good = truth > 0 ? std::abs(est.result - truth) <= opt.eps * truth
                                      : est.result == 0;
          if (good) ++res.within;
          if (truth > 0) ratio_cell = fmt_g(est.result / truth);
        }
      }
      std::int64_t budget = 0;
      for (std::int64_t b : eng.space_budget()) budget += b;
      res.rows.push_back(std::to_string(seed) + "\t" + std::to_string(eng.now()) + "\t" +
                         (est.ok ? fmt_g(est.result) : "FAIL") + "\t" + oracle_cell + "\t" +
                         ratio_cell + "\t" + std::to_string(budget) + "\t" +
                         std::to_string(snaps.levels.size()) + "\t" + wall_cell(opt.timing, t0));
      if (!est.ok) ++res.fails;
    }
  });
  finish_report(rep, results);
  emit(rep, opt.out);
  return 0;
}

// ---------------------------------------------------------------------------
// kcover
// ---------------------------------------------------------------------------

struct KcoverOpts {
  std::string stream, out, mode = "exact";
  std::int64_t n = 16, m_elems = 64, k = 3, W = 256;
  double eps = 0.25, delta = 0.05, desk_factor = 1.0;
  std::vector<std::uint64_t> seeds{1};
  std::int64_t S = 0;
  bool oracle = false, timing = false;
};

int run_kcover(const KcoverOpts& opt) {
  const auto edges = read_edges(opt.stream);
  KCoverParams params{opt.n, opt.m_elems, opt.k, opt.eps, opt.delta, opt.desk_factor};
  const std::int64_t S = opt.S > 0 ? opt.S : opt.m_elems * params.degree_cap();
  const double M = static_cast<double>(std::min(opt.m_elems, opt.W));
  const auto ladder = make_ladder(1, std::max(1.0, M));
  const auto taus = checkpoints(static_cast<std::int64_t>(edges.size()), opt.W);

  Report rep;
  rep.add("cmd", std::string("kcover"));
  rep.add("mode", opt.mode);
  rep.add("stream", opt.stream);
  rep.add("n", opt.n);
  rep.add("m_elems", opt.m_elems);
  rep.add("k", opt.k);
  rep.add("W", opt.W);
  rep.add("eps", opt.eps);
  rep.add("delta", opt.delta);
  rep.add("desk_factor", opt.desk_factor);
  rep.add("degree_cap", params.degree_cap());
  rep.add("S", S);
  rep.add("ladder_levels", static_cast<std::int64_t>(ladder.levels.size()));
  rep.add("oracle", std::string(opt.oracle ? "on" : "off"));
  rep.header = "seed\ttau\testimate\toracle\tratio\tbudget\tlevels\twall";

  std::vector<SeedResult> results(opt.seeds.size());
  parallel_over_seeds(opt.seeds.size(), [&](std::size_t si) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t seed = opt.seeds[si];
    const bool greedy = opt.mode == "greedy";
    LadderEngine<Edge> eng(
        ladder,
        [&, li = std::size_t{0}](double o) mutable { return kcover_spec(o, params, seed, li++); },
        S);
    WindowNonemptyTracker tracker;
    auto& res = results[si];
    std::size_t next_cp = 0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      eng.ingest(edges[i]);
      tracker.ingest(eng.now());
      if (next_cp >= taus.size() || eng.now() != taus[next_cp]) continue;
      ++next_cp;
      std::string est_cell;
      double estimate = 0;
      bool ok = true;
      if (!tracker.nonempty(eng.now(), opt.W)) {
        est_cell = "0";
      } else {
        const auto snaps = eng.snapshot(opt.W);
        const auto est = recover<Edge, CoverageSolution>(
            snaps, [&](const LevelSnapshot<Edge>& s) -> std::optional<CoverageSolution> {
              return greedy ? recover_greedy(s, params) : recover_exact(s, params);
            });
        ok = est.ok;
        estimate = est.result.estimate;
        est_cell = est.ok ? fmt_g(estimate) : "FAIL";
      }
      std::string oracle_cell = "-", ratio_cell = "-";
      if (opt.oracle) {
        const std::int64_t lo = std::max<std::int64_t>(0, eng.now() - opt.W);
        const std::vector<Edge> window(edges.begin() + static_cast<std::ptrdiff_t>(lo),
                                       edges.begin() + static_cast<std::ptrdiff_t>(eng.now()));
        const std::int64_t truth = opt_kcover(window, opt.k);
        oracle_cell = std::to_string(truth);
        ++res.oracle_rows;
        if (ok && truth > 0) {
          ratio_cell = fmt_g(estimate / static_cast<double>(truth));
          if (estimate >= (1 - 3 * opt.eps) * static_cast<double>(truth) &&
              estimate <= (1 + opt.eps) * static_cast<double>(truth))
            ++res.within;
        } else if (ok && truth == 0 && estimate == 0) {
          ++res.within;
        }
      }
      std::int64_t budget = 0;
      for (std::int64_t b : eng.space_budget()) budget += b;
      res.rows.push_back(std::to_string(seed) + "\t" + std::to_string(eng.now()) + "\t" +
                         est_cell + "\t" + oracle_cell + "\t" + ratio_cell + "\t" +
                         std::to_string(budget) + "\t" +
                         std::to_string(eng.snapshot(opt.W).levels.size()) + "\t" +
                         wall_cell(opt.timing, t0));
      if (!ok) ++res.fails;
    }
  });
  finish_report(rep, results);
  emit(rep, opt.out);
  return 0;
}

// ---------------------------------------------------------------------------
// diversity
// ---------------------------------------------------------------------------

struct DivOpts {
  std::string stream, out, kind = "remote-edge", solver = "exact";
  std::int64_t k = 2, t = 2, d = 2, Delta = 64, W = 512;
  double eps = 0.25;
  std::vector<std::uint64_t> seeds{1};
  std::int64_t S = 0;
  bool oracle = false, timing = false;
};

int run_diversity(const DivOpts& opt) {
  const auto pts = read_points(opt.stream, opt.d);
  DivParams params{opt.k, opt.t, opt.eps, opt.d, opt.Delta, div_kind_from_name(opt.kind)};
  const std::int64_t S =
      opt.S > 0 ? opt.S : 4 * opt.d * (opt.W + opt.k * div_retention(params.kind, opt.k));
  const auto ladder =
      make_ladder(1, std::sqrt(static_cast<double>(opt.d)) * static_cast<double>(opt.Delta));
  const auto taus = checkpoints(static_cast<std::int64_t>(pts.size()), opt.W);
  const bool exact = opt.solver == "exact";

  Report rep;
  rep.add("cmd", std::string("diversity"));
  rep.add("kind", opt.kind);
  rep.add("solver", opt.solver);
  rep.add("stream", opt.stream);
  rep.add("k", opt.k);
  rep.add("t", opt.t);
  rep.add("d", opt.d);
  rep.add("Delta", opt.Delta);
  rep.add("W", opt.W);
  rep.add("eps", opt.eps);
  rep.add("T_div", div_retention(params.kind, opt.k));
  rep.add("S", S);
  rep.add("ladder_levels", static_cast<std::int64_t>(ladder.levels.size()));
  rep.add("oracle", std::string(opt.oracle ? "on" : "off"));
  rep.header = "seed\ttau\testimate\toracle\tratio\tbudget\tlevels\twall";

  std::vector<SeedResult> results(opt.seeds.size());
  parallel_over_seeds(opt.seeds.size(), [&](std::size_t si) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t seed = opt.seeds[si];
    LadderEngine<Pt> eng(
        ladder, [&](double o) { return div_spec(o, params); }, S);
    DivZeroOptTracker tracker(opt.k, params.kind, opt.t);
    auto& res = results[si];
    std::size_t next_cp = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      eng.ingest(pts[i]);
      tracker.ingest(pts[i], eng.now());
      if (next_cp >= taus.size() || eng.now() != taus[next_cp]) continue;
      ++next_cp;
      double estimate = 0;
      bool ok = true;
      if (const auto zero = tracker.query(eng.now(), opt.W)) {
        estimate = *zero;
      } else {
        const auto snaps = eng.snapshot(opt.W);
        const auto est = recover<Pt, DivSolution>(
            snaps, [&](const LevelSnapshot<Pt>& s) { return recover_div(s, params, exact); });
        ok = est.ok;
        estimate = est.result.value;
      }
      std::string oracle_cell = "-", ratio_cell = "-";
      bool have_oracle = false;
      double truth = 0;
      if (opt.oracle) {
        const std::int64_t lo = std::max<std::int64_t>(0, eng.now() - opt.W);
        const std::vector<Pt> window(pts.begin() + static_cast<std::ptrdiff_t>(lo),
                                     pts.begin() + static_cast<std::ptrdiff_t>(eng.now()));
        try {
          truth = opt_div(window, opt.k, params.kind, opt.t);
          have_oracle = true;
        } catch (const std::invalid_argument&) {
          oracle_cell = "oversize";  // too many distinct points to enumerate
        }
      }
      if (have_oracle) {
        oracle_cell = fmt_g(truth);
        ++res.oracle_rows;
        if (ok) {
          if (truth > 0) {
            ratio_cell = fmt_g(estimate / truth);
            if (estimate >= (1 - opt.eps) * truth && estimate <= truth * (1 + 1e-9))
              ++res.within;
          } else if (estimate == 0) {
            ++res.within;
          }
        }
      }
      std::int64_t budget = 0;
      for (std::int64_t b : eng.space_budget()) budget += b;
      res.rows.push_back(std::to_string(seed) + "\t" + std::to_string(eng.now()) + "\t" +
                         (ok ? fmt_g(estimate) : "FAIL") + "\t" + oracle_cell + "\t" +
                         ratio_cell + "\t" + std::to_string(budget) + "\t" +
                         std::to_string(eng.snapshot(opt.W).levels.size()) + "\t" +
                         wall_cell(opt.timing, t0));
      if (!ok) ++res.fails;
    }
  });
  finish_report(rep, results);
  emit(rep, opt.out);
  return 0;
}

// ---------------------------------------------------------------------------
// cluster
// ---------------------------------------------------------------------------

struct ClusterOpts {
  std::string stream, out, profile = "desk", method = "exhaustive";
  std::int64_t k = 2, power = 2, d = 2, Delta = 64, W = 100;
  double eps = 0.3, delta = 0.1;
  std::vector<std::uint64_t> seeds{1};
  std::int64_t S = 0;
  double jl = 0;  // JL projection constant; 0 disables projection
  bool oracle = false, timing = false;
};

int run_cluster(const ClusterOpts& opt) {
  auto pts = read_points(opt.stream, opt.d);
  ClusterParams params;
  params.k = opt.k;
  params.d = opt.d;
  params.Delta = opt.Delta;
  params.power = opt.power;
  params.n = opt.W;
  params.eps = opt.eps;
  params.delta = opt.delta;
  params.profile = opt.profile == "theory" ? theory_profile() : desk_profile();
  const std::int64_t S = opt.S > 0 ? opt.S : 400000;
  const auto ladder = make_ladder(1, params.ladder_max());
  const auto taus = checkpoints(static_cast<std::int64_t>(pts.size()), opt.W);
  SolveMethod method = SolveMethod::exhaustive_candidates;
  if (opt.method == "local") method = SolveMethod::local_search;
  if (opt.method == "lloyd") method = SolveMethod::lloyd;

  Report rep;
  rep.add("cmd", std::string("cluster"));
  rep.add("profile", params.profile.name);
  rep.add("method", opt.method);
  rep.add("stream", opt.stream);
  rep.add("k", opt.k);
  rep.add("power", opt.power);
  rep.add("d", opt.d);
  rep.add("Delta", opt.Delta);
  rep.add("W", opt.W);
  rep.add("eps", opt.eps);
  rep.add("delta", opt.delta);
  rep.add("L", params.L());
  rep.add("z_factor", params.profile.z_factor);
  rep.add("zp_factor", params.profile.zp_factor);
  rep.add("zpp_coef", params.zpp_coef());
  rep.add("m_hat", params.m_hat());
  rep.add("m_const", params.profile.m_const);
  rep.add("S", S);
  rep.add("jl", opt.jl);
  rep.add("ladder_levels", static_cast<std::int64_t>(ladder.levels.size()));
  rep.add("oracle", std::string(opt.oracle ? "on" : "off"));
  rep.header = "seed\ttau\testimate\toracle\tratio\tbudget\tlevels\twall";

  std::vector<SeedResult> results(opt.seeds.size());
  parallel_over_seeds(opt.seeds.size(), [&](std::size_t si) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t seed = opt.seeds[si];
    const auto grids = build_grids(opt.Delta, opt.d, params.n, seed);
    LadderEngine<Pt> eng(
        ladder,
        [&, li = std::size_t{0}](double o) mutable {
          return cluster_spec(o, params, grids, seed, li++);
        },
        S);
    ClusterDistinctTracker tracker(opt.k);
    auto& res = results[si];
    std::size_t next_cp = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      eng.ingest(pts[i]);
      tracker.ingest(pts[i], eng.now());
      if (next_cp >= taus.size() || eng.now() != taus[next_cp]) continue;
      ++next_cp;
      double estimate = 0;
      bool ok = true;
      if (tracker.window_is_degenerate(eng.now(), opt.W)) {
        estimate = 0;
      } else {
        const auto snaps = eng.snapshot(opt.W);
        const auto est = recover<Pt, ClusterSolution>(
            snaps, [&](const LevelSnapshot<Pt>& s) { return recover_cluster(s, params, seed, method); });
        ok = est.ok;
        estimate = est.result.estimate;
      }
      std::string oracle_cell = "-", ratio_cell = "-";
      if (opt.oracle) {
        const std::int64_t lo = std::max<std::int64_t>(0, eng.now() - opt.W);
        const std::vector<Pt> window(pts.begin() + static_cast<std::ptrdiff_t>(lo),
                                     pts.begin() + static_cast<std::ptrdiff_t>(eng.now()));
        const double truth = opt_cluster_candidates(window, opt.k, opt.power);
        oracle_cell = fmt_g(truth);
        ++res.oracle_rows;
        if (ok) {
          if (truth > 0) {
            ratio_cell = fmt_g(estimate / truth);
            if (estimate <= (1 + opt.eps) * truth) ++res.within;
          } else if (estimate == 0) {
            ++res.within;
          }
        }
      }
      std::int64_t budget = 0;
      for (std::int64_t b : eng.space_budget()) budget += b;
      res.rows.push_back(std::to_string(seed) + "\t" + std::to_string(eng.now()) + "\t" +
                         (ok ? fmt_g(estimate) : "FAIL") + "\t" + oracle_cell + "\t" +
                         ratio_cell + "\t" + std::to_string(budget) + "\t" +
                         std::to_string(eng.snapshot(opt.W).levels.size()) + "\t" +
                         wall_cell(opt.timing, t0));
      if (!ok) ++res.fails;
    }
  });
  finish_report(rep, results);
  emit(rep, opt.out);
  return 0;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenOpts {
  std::string kind = "bits", out;
  std::uint64_t seed = 1;
  std::int64_t length = 1000;
  double p1 = 0.5;                       // bits
  std::int64_t n = 16, m_elems = 64;     // bipartite
  std::int64_t d = 2, Delta = 64;        // points
  std::int64_t centers = 3;
  double sigma = 3.0;
  std::int64_t m = 5;                    // adversarial k-cover block size
};

int run_gen(const GenOpts& opt) {
  std::ostringstream os;
  CounterRng rng(prf(opt.seed, {kSaltGen}));
  if (opt.kind == "bits") {
    for (std::int64_t i = 0; i < opt.length; ++i)
      os << (rng.next_unit() < opt.p1 ? 1 : 0) << "\n";
  } else if (opt.kind == "bipartite") {
    for (std::int64_t i = 0; i < opt.length; ++i)
      os << rng.next_below(static_cast<std::uint64_t>(opt.n)) << "\t"
         << rng.next_below(static_cast<std::uint64_t>(opt.m_elems)) << "\n";
  } else if (opt.kind == "mixture") {
    std::vector<Pt> mu;
    for (std::int64_t c = 0; c < opt.centers; ++c) {
      Pt p;
      for (std::int64_t j = 0; j < opt.d; ++j)
        p.c.push_back(1 + static_cast<std::int64_t>(rng.next_below(
                              static_cast<std::uint64_t>(opt.Delta))));
      mu.push_back(std::move(p));
    }
    for (std::int64_t i = 0; i < opt.length; ++i) {
      const auto& base = mu[rng.next_below(static_cast<std::uint64_t>(opt.centers))];
      for (std::int64_t j = 0; j < opt.d; ++j) {
        // Box-Muller from two PRF uniforms.
        const double u1 = std::max(rng.next_unit(), 1e-12);
        const double u2 = rng.next_unit();
        const double g = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        std::int64_t v =
            base.c[static_cast<std::size_t>(j)] + static_cast<std::int64_t>(std::lround(opt.sigma * g));
        v = std::max<std::int64_t>(1, std::min(opt.Delta, v));
        os << v << (j + 1 < opt.d ? "," : "\n");
      }
    }
  } else if (opt.kind == "adv-kcover") {
    // Stream A: set 0 covers elements 0..m-1, set 1 covers m..2m-1; suffix C
    // re-covers m..2m-1 with set 0, doubling the 1-cover optimum.
    for (std::int64_t e = 0; e < opt.m; ++e) os << 0 << "\t" << e << "\n";
    for (std::int64_t e = opt.m; e < 2 * opt.m; ++e) os << 1 << "\t" << e << "\n";
    for (std::int64_t e = opt.m; e < 2 * opt.m; ++e) os << 0 << "\t" << e << "\n";
  } else if (opt.kind == "adv-diversity") {
    os << "0,1,1,0\n1,1,0,0\n1,0,1,0\n1,0,0,1\n";
  } else {
    throw std::runtime_error("unknown generator kind: " + opt.kind);
  }
  if (opt.out.empty() || opt.out == "-") {
    std::cout << os.str();
  } else {
    std::ofstream f(opt.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + opt.out);
    f << os.str();
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify: after every ingest, each ladder level must structurally equal the
// offline sketch of its retained suffix.
// ---------------------------------------------------------------------------

template <class V>
int verify_stream(const std::vector<V>& items, const GuessLadder& ladder,
                  const std::function<SketchSpec<V>(double)>& make_spec, std::int64_t S) {
  LadderEngine<V> eng(ladder, make_spec, S);
  std::vector<Timestamped<V>> stamped;
  for (std::size_t i = 0; i < items.size(); ++i)
    stamped.push_back({items[i], static_cast<std::int64_t>(i + 1)});
  for (std::size_t i = 0; i < items.size(); ++i) {
    eng.ingest(items[i]);
    for (std::size_t li = 0; li < eng.levels().size(); ++li) {
      const auto& lvl = eng.levels()[li];
      std::vector<Timestamped<V>> suffix(
          stamped.begin() + static_cast<std::ptrdiff_t>(lvl.l - 1),
          stamped.begin() + static_cast<std::ptrdiff_t>(i + 1));
      const auto expected = offline_sketch(suffix, lvl.spec);
      if (!same_contents(eng.materialize(li).subs, expected)) {
        std::cerr << "mismatch at arrival " << (i + 1) << " level " << li << "\n";
        return 1;
      }
    }
  }
  std::cout << "verified " << items.size() << " arrivals x " << ladder.levels.size()
            << " levels\n";
  return 0;
}

struct VerifyOpts {
  std::string problem = "toy", stream;
  std::uint64_t seed = 1;
  std::int64_t W = 64, S = 0;
  // problem knobs reuse sensible defaults; enough surface for spot checks
  std::int64_t n = 8, m_elems = 32, k = 2, d = 2, Delta = 64, power = 2, t = 2;
  std::string kind = "remote-edge";
};

int run_verify(const VerifyOpts& opt) {
  if (opt.problem == "toy") {
    ToyParams params;
    const std::int64_t S = opt.S > 0 ? opt.S : 4 * params.k_thr_units();
    return verify_stream<BitItem>(
        read_bits(opt.stream), make_ladder(1, static_cast<double>(opt.W)),
        [&, li = std::size_t{0}](double o) mutable { return ones_spec(o, params, opt.seed, li++); },
        S);
  }
  if (opt.problem == "kcover") {
    KCoverParams params{opt.n, opt.m_elems, opt.k};
    const std::int64_t S = opt.S > 0 ? opt.S : 64;
    return verify_stream<Edge>(
        read_edges(opt.stream),
        make_ladder(1, static_cast<double>(std::min(opt.m_elems, opt.W))),
        [&, li = std::size_t{0}](double o) mutable { return kcover_spec(o, params, opt.seed, li++); },
        S);
  }
  if (opt.problem == "diversity") {
    DivParams params{opt.k, opt.t, 0.25, opt.d, opt.Delta, div_kind_from_name(opt.kind)};
    const std::int64_t S = opt.S > 0 ? opt.S : 4 * opt.d * (opt.W + opt.k);
    return verify_stream<Pt>(
        read_points(opt.stream, opt.d),
        make_ladder(1, std::sqrt(static_cast<double>(opt.d)) * static_cast<double>(opt.Delta)),
        [&](double o) { return div_spec(o, params); }, S);
  }
  if (opt.problem == "cluster") {
    ClusterParams params;
    params.k = opt.k;
    params.d = opt.d;
    params.Delta = opt.Delta;
    params.power = opt.power;
    params.n = opt.W;
    const auto grids = build_grids(opt.Delta, opt.d, params.n, opt.seed);
    const std::int64_t S = opt.S > 0 ? opt.S : 400000;
    return verify_stream<Pt>(
        read_points(opt.stream, opt.d), make_ladder(1, params.ladder_max()),
        [&, li = std::size_t{0}](double o) mutable {
          return cluster_spec(o, params, grids, opt.seed, li++);
        },
        S);
  }
  throw std::runtime_error("unknown problem: " + opt.problem);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sliding-window bucketing sketches"};
  app.require_subcommand(1);

  ToyOpts toy;
  auto* toy_cmd = app.add_subcommand("toy", "windowed count-of-ones / toy 1-median");
  toy_cmd->add_option("--stream", toy.stream)->required();
  toy_cmd->add_option("--variant", toy.variant)->check(CLI::IsMember({"ones", "median"}));
  toy_cmd->add_option("--W", toy.W)->check(CLI::PositiveNumber);
  toy_cmd->add_option("--eps", toy.eps)->check(CLI::PositiveNumber);
  toy_cmd->add_option("--delta", toy.delta)->check(CLI::PositiveNumber);
  toy_cmd->add_option("--seeds", toy.seeds);
  toy_cmd->add_option("--S", toy.S);
  toy_cmd->add_option("--out", toy.out);
  toy_cmd->add_flag("--oracle", toy.oracle);
  toy_cmd->add_flag("--timing", toy.timing);

  KcoverOpts kc;
  auto* kc_cmd = app.add_subcommand("kcover", "sliding-window max k-coverage");
  kc_cmd->add_option("--stream", kc.stream)->required();
  kc_cmd->add_option("--n", kc.n)->check(CLI::PositiveNumber);
  kc_cmd->add_option("--m-elems", kc.m_elems)->check(CLI::PositiveNumber);
  kc_cmd->add_option("--k", kc.k)->check(CLI::PositiveNumber);
  kc_cmd->add_option("--W", kc.W)->check(CLI::PositiveNumber);
  kc_cmd->add_option("--eps", kc.eps)->check(CLI::PositiveNumber);
  kc_cmd->add_option("--delta", kc.delta)->check(CLI::PositiveNumber);
  kc_cmd->add_option("--desk-factor", kc.desk_factor)->check(CLI::PositiveNumber);
  kc_cmd->add_option("--mode", kc.mode)->check(CLI::IsMember({"exact", "greedy"}));
  kc_cmd->add_option("--seeds", kc.seeds);
  kc_cmd->add_option("--S", kc.S);
  kc_cmd->add_option("--out", kc.out);
  kc_cmd->add_flag("--oracle", kc.oracle);
  kc_cmd->add_flag("--timing", kc.timing);

  DivOpts dv;
  auto* dv_cmd = app.add_subcommand("diversity", "sliding-window diversity maximization");
  dv_cmd->add_option("--stream", dv.stream)->required();
  dv_cmd->add_option("--kind", dv.kind);
  dv_cmd->add_option("--k", dv.k)->check(CLI::PositiveNumber);
  dv_cmd->add_option("--t", dv.t)->check(CLI::PositiveNumber);
  dv_cmd->add_option("--d", dv.d)->check(CLI::PositiveNumber);
  dv_cmd->add_option("--Delta", dv.Delta)->check(CLI::PositiveNumber);
  dv_cmd->add_option("--W", dv.W)->check(CLI::PositiveNumber);
  dv_cmd->add_option("--eps", dv.eps)->check(CLI::PositiveNumber);
  dv_cmd->add_option("--solver", dv.solver)->check(CLI::IsMember({"exact", "greedy"}));
  dv_cmd->add_option("--seeds", dv.seeds);
  dv_cmd->add_option("--S", dv.S);
  dv_cmd->add_option("--out", dv.out);
  dv_cmd->add_flag("--oracle", dv.oracle);
  dv_cmd->add_flag("--timing", dv.timing);

  ClusterOpts cl;
  auto* cl_cmd = app.add_subcommand("cluster", "sliding-window (k,p)-clustering");
  cl_cmd->add_option("--stream", cl.stream)->required();
  cl_cmd->add_option("--k", cl.k)->check(CLI::PositiveNumber);
  cl_cmd->add_option("--p", cl.power)->check(CLI::Range(std::int64_t{1}, std::int64_t{2}));
  cl_cmd->add_option("--d", cl.d)->check(CLI::PositiveNumber);
  cl_cmd->add_option("--Delta", cl.Delta)->check(CLI::PositiveNumber);
  cl_cmd->add_option("--W", cl.W)->check(CLI::PositiveNumber);
  cl_cmd->add_option("--eps", cl.eps)->check(CLI::PositiveNumber);
  cl_cmd->add_option("--delta", cl.delta)->check(CLI::PositiveNumber);
  cl_cmd->add_option("--profile", cl.profile)->check(CLI::IsMember({"theory", "desk"}));
  cl_cmd->add_option("--method", cl.method)
      ->check(CLI::IsMember({"exhaustive", "local", "lloyd"}));
  cl_cmd->add_option("--seeds", cl.seeds);
  cl_cmd->add_option("--S", cl.S);
  cl_cmd->add_option("--jl", cl.jl);
  cl_cmd->add_option("--out", cl.out);
  cl_cmd->add_flag("--oracle", cl.oracle);
  cl_cmd->add_flag("--timing", cl.timing);

  GenOpts gn;
  auto* gn_cmd = app.add_subcommand("gen", "synthetic stream generation");
  gn_cmd->add_option("--kind", gn.kind)
      ->check(CLI::IsMember({"bits", "bipartite", "mixture", "adv-kcover", "adv-diversity"}));
  gn_cmd->add_option("--out", gn.out);
  gn_cmd->add_option("--seed", gn.seed);
  gn_cmd->add_option("--length", gn.length)->check(CLI::NonNegativeNumber);
  gn_cmd->add_option("--p1", gn.p1);
  gn_cmd->add_option("--n", gn.n)->check(CLI::PositiveNumber);
  gn_cmd->add_option("--m-elems", gn.m_elems)->check(CLI::PositiveNumber);
  gn_cmd->add_option("--d", gn.d)->check(CLI::PositiveNumber);
  gn_cmd->add_option("--Delta", gn.Delta)->check(CLI::PositiveNumber);
  gn_cmd->add_option("--centers", gn.centers)->check(CLI::PositiveNumber);
  gn_cmd->add_option("--sigma", gn.sigma)->check(CLI::PositiveNumber);
  gn_cmd->add_option("--m", gn.m)->check(CLI::PositiveNumber);

  VerifyOpts vf;
  auto* vf_cmd = app.add_subcommand("verify", "engine vs offline-sketch replay check");
  vf_cmd->add_option("--problem", vf.problem)
      ->check(CLI::IsMember({"toy", "kcover", "diversity", "cluster"}));
  vf_cmd->add_option("--stream", vf.stream)->required();
  vf_cmd->add_option("--seed", vf.seed);
  vf_cmd->add_option("--W", vf.W)->check(CLI::PositiveNumber);
  vf_cmd->add_option("--S", vf.S);
  vf_cmd->add_option("--n", vf.n);
  vf_cmd->add_option("--m-elems", vf.m_elems);
  vf_cmd->add_option("--k", vf.k);
  vf_cmd->add_option("--d", vf.d);
  vf_cmd->add_option("--Delta", vf.Delta);
  vf_cmd->add_option("--p", vf.power);
  vf_cmd->add_option("--t", vf.t);
  vf_cmd->add_option("--kind", vf.kind);

  CLI11_PARSE(app, argc, argv);

  try {
    if (toy_cmd->parsed()) return run_toy(toy);
    if (kc_cmd->parsed()) return run_kcover(kc);
    if (dv_cmd->parsed()) return run_diversity(dv);
    if (cl_cmd->parsed()) return run_cluster(cl);
    if (gn_cmd->parsed()) return run_gen(gn);
    if (vf_cmd->parsed()) return run_verify(vf);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
