#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "probecert/errors.hpp"
#include "probecert/graph_probe.hpp"
#include "probecert/hypergraph_probe.hpp"
#include "probecert/rng.hpp"

namespace probecert {

struct Summary {
  long long count = 0;
  double mean = 0;
  double stddev = 0;
  double min = 0;
  double max = 0;

  // 3 sigma-hat / sqrt(count): the margin used by the statistical gates.
  double margin3() const { return count > 0 ? 3.0 * stddev / std::sqrt(static_cast<double>(count)) : 0; }
};

inline Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.count = static_cast<long long>(xs.size());
  if (xs.empty()) return s;
  double sum = 0;
  s.min = xs[0];
  s.max = xs[0];
  for (double x : xs) {
    sum += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean = sum / static_cast<double>(xs.size());
  double ss = 0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stddev = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0;
  return s;
}

struct WorldRow {
  long long world = 0;
  long long probes = 0;
  int actives = 0;
  int phases = 0;
  long long phase1_probes = 0;
};

struct PolicyEvalResult {
  std::vector<WorldRow> rows;
  Summary probes;
  Summary phase1;
  GpInvariantStats stats;
};

// Monte-Carlo evaluation of the adaptive GP algorithm: world i is drawn from
// substream i of the seed, so any row replays in isolation.
inline PolicyEvalResult evaluate_gp(const ProbeGraph& g, int k, const PolicyFactory& factory,
                                    long worlds, uint64_t seed) {
  PolicyEvalResult out;
  std::vector<double> probe_counts, phase1_counts;
  Rng base(seed);
  for (long i = 0; i < worlds; ++i) {
    Rng wr = base.substream(static_cast<uint64_t>(i));
    const World world = simulate_world(g, wr);
    const Transcript t = vp_to_gp(g, k, factory, world, &out.stats);
    out.rows.push_back({i, t.total_probes(), t.actives_found, t.phases(), t.phase1_probes()});
    probe_counts.push_back(static_cast<double>(t.total_probes()));
    phase1_counts.push_back(static_cast<double>(t.phase1_probes()));
  }
  out.probes = summarize(probe_counts);
  out.phase1 = summarize(phase1_counts);
  return out;
}

inline PolicyEvalResult evaluate_hgp(const ProbeHypergraph& h, int k, const PolicyFactory& factory,
                                     long worlds, uint64_t seed) {
  PolicyEvalResult out;
  std::vector<double> probe_counts, phase1_counts;
  Rng base(seed);
  for (long i = 0; i < worlds; ++i) {
    Rng wr = base.substream(static_cast<uint64_t>(i));
    const World world = simulate_latent_world(h, wr);
    const Transcript t = lvp_to_hgp(h, k, factory, world, &out.stats);
    out.rows.push_back({i, t.total_probes(), t.actives_found, t.phases(), t.phase1_probes()});
    probe_counts.push_back(static_cast<double>(t.total_probes()));
    phase1_counts.push_back(static_cast<double>(t.phase1_probes()));
  }
  out.probes = summarize(probe_counts);
  out.phase1 = summarize(phase1_counts);
  return out;
}

struct RatioRow {
  std::string instance;
  double algorithm = 0;
  double oracle = 0;
  double ratio = 0;
  double bound = 0;
  bool within_bound = false;
};

inline RatioRow make_ratio_row(const std::string& name, double alg, double oracle, double bound) {
  RatioRow r;
  r.instance = name;
  r.algorithm = alg;
  r.oracle = oracle;
  r.ratio = oracle > 0 ? alg / oracle : (alg > 0 ? std::numeric_limits<double>::infinity() : 1.0);
  r.bound = bound;
  r.within_bound = r.ratio <= bound + 1e-9;
  return r;
}

}  // namespace probecert
