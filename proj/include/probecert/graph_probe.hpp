#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "probecert/errors.hpp"
#include "probecert/rng.hpp"

namespace probecert {

// Simple undirected graph with independent Bernoulli vertex variables; edge
// uv observes X_uv = Y_u | Y_v. Edges are canonicalized to (min,max) and
// lex-sorted, so for every vertex the incident edges ascend both by edge id
// and by the other endpoint's id (the two neighbor orderings coincide).
struct ProbeGraph {
  std::vector<double> vertex_prob;
  std::vector<std::pair<int, int>> edges;

  ProbeGraph(std::vector<double> probs, std::vector<std::pair<int, int>> edge_list)
      : vertex_prob(std::move(probs)), edges(std::move(edge_list)) {
    const int v = num_vertices();
    for (double p : vertex_prob)
      if (p < 0 || p > 1) throw ValidationError("ProbeGraph: vertex probability outside [0,1]");
    for (auto& [a, b] : edges) {
      if (a == b) throw ValidationError("ProbeGraph: input graph must be simple (loop found)");
      if (a < 0 || b < 0 || a >= v || b >= v) throw ValidationError("ProbeGraph: edge endpoint out of range");
      if (a > b) std::swap(a, b);
    }
    std::sort(edges.begin(), edges.end());
    for (size_t i = 1; i < edges.size(); ++i)
      if (edges[i] == edges[i - 1]) throw ValidationError("ProbeGraph: input graph must be simple (multi-edge)");
  }

  int num_vertices() const { return static_cast<int>(vertex_prob.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  std::vector<int> degrees() const {
    std::vector<int> deg(num_vertices(), 0);
    for (auto [u, v] : edges) {
      deg[u]++;
      deg[v]++;
    }
    return deg;
  }
};

using World = std::vector<uint8_t>;  // hidden Y assignment

inline World simulate_world(const ProbeGraph& g, Rng& rng) {
  World y(g.num_vertices());
  for (size_t v = 0; v < y.size(); ++v) y[v] = rng.bernoulli(g.vertex_prob[v]) ? 1 : 0;
  return y;
}

inline int edge_outcome(const ProbeGraph& g, const World& y, int e) {
  return y[g.edges[e].first] | y[g.edges[e].second];
}

// ----------------------------------------------------------------------------
// Vertex Probing (stochastic min-knapsack) policy interface.

struct VpItem {
  int id = 0;
  double prob = 0;
  long long weight = 0;
};

class VertexPolicy {
 public:
  virtual ~VertexPolicy() = default;
  // Next item to probe, or nullopt to stop.
  virtual std::optional<int> next() = 0;
  // Observed (or reported) outcome for a previously requested item.
  virtual void report(int id, int outcome) = 0;
};

// Default adaptive policy: request the unprobed item maximizing
// p * min(weight, remaining target); stop once the believed target is met.
// Items keep being requested (even at score zero) until exhaustion, matching
// the min-knapsack termination rule "or until everything has been probed".
class GreedyCoveragePolicy final : public VertexPolicy {
 public:
  GreedyCoveragePolicy(std::vector<VpItem> items, long long target)
      : items_(std::move(items)), target_(target) {}

  std::optional<int> next() override {
    if (target_ <= 0) return std::nullopt;
    int best = -1;
    double best_score = -1;
    for (size_t i = 0; i < items_.size(); ++i) {
      if (used_.size() <= i) used_.resize(items_.size(), 0);
      if (used_[i]) continue;
      const double score =
          items_[i].prob * static_cast<double>(std::min<long long>(items_[i].weight, target_));
      if (score > best_score + 1e-15) {
        best_score = score;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) return std::nullopt;
    used_[best] = 1;
    return items_[best].id;
  }

  void report(int id, int outcome) override {
    if (outcome) {
      for (const VpItem& it : items_)
        if (it.id == id) {
          target_ -= it.weight;
          break;
        }
    }
  }

 private:
  std::vector<VpItem> items_;
  std::vector<char> used_;
  long long target_;
};

using PolicyFactory =
    std::function<std::unique_ptr<VertexPolicy>(const std::vector<VpItem>&, long long target)>;

inline PolicyFactory default_vertex_policy() {
  return [](const std::vector<VpItem>& items, long long target) {
    return std::make_unique<GreedyCoveragePolicy>(items, target);
  };
}

// Pure Vertex Probing simulation (no graph): probes items following the
// policy until the realized total weight reaches the target or the policy
// stops. Returns the number of probes. Used by the misreporting tests.
inline long long run_vertex_probing(VertexPolicy& policy, const std::vector<VpItem>& items,
                                    const std::vector<uint8_t>& outcome_by_index, long long target) {
  long long probes = 0, value = 0;
  std::vector<char> probed(items.size(), 0);
  while (value < target) {
    auto req = policy.next();
    if (!req) break;
    int idx = -1;
    for (size_t i = 0; i < items.size(); ++i)
      if (items[i].id == *req) {
        idx = static_cast<int>(i);
        break;
      }
    if (idx < 0 || probed[idx]) throw InvariantViolation("vertex policy requested an unknown or probed item");
    probed[idx] = 1;
    ++probes;
    if (outcome_by_index[idx]) value += items[idx].weight;
    policy.report(*req, outcome_by_index[idx]);
  }
  return probes;
}

// ----------------------------------------------------------------------------
// Residual graph machinery (Algorithms 3 and 4).

struct ProbeRecord {
  int item = 0;     // original edge id
  int outcome = 0;  // observed X value
};

struct GpInvariantStats {
  long long probe_vertex_runs = 0;
  long long m0m1_checks = 0;
  long long independence_checks = 0;
  long long phase_checks = 0;
  long long violations = 0;

  GpInvariantStats& operator+=(const GpInvariantStats& o) {
    probe_vertex_runs += o.probe_vertex_runs;
    m0m1_checks += o.m0m1_checks;
    independence_checks += o.independence_checks;
    phase_checks += o.phase_checks;
    violations += o.violations;
    return *this;
  }
};

struct Transcript {
  std::vector<ProbeRecord> probes;
  std::vector<int> phase_end;  // cumulative probe counts at phase boundaries
  long long probe_vertex_calls = 0;
  int actives_found = 0;
  bool target_met = false;

  long long total_probes() const { return static_cast<long long>(probes.size()); }
  long long phase1_probes() const {
    if (phase_end.empty()) return total_probes();
    return phase_end.front();
  }
  int phases() const { return static_cast<int>(phase_end.size()); }
};

// One world's residual state: every original edge is either still a proper
// edge of E', a loop owned by one endpoint (the other endpoint is determined
// inactive), probed, or dropped (determined 0 without a probe when its loop
// owner was removed).
class GpSession {
 public:
  enum class EdgeState : uint8_t { Edge, Loop, Probed, Dropped };

  GpSession(const ProbeGraph& g, int k, World world)
      : g_(&g), world_(std::move(world)), k_(k) {
    if (k < 0) throw ValidationError("GpSession: k >= 0 required");
    if (static_cast<int>(world_.size()) != g.num_vertices())
      throw DimensionError("GpSession: world size mismatch");
    state_.assign(g.num_edges(), EdgeState::Edge);
    loop_owner_.assign(g.num_edges(), -1);
    in_residual_.assign(g.num_vertices(), 1);
    b_.assign(g.num_vertices(), kUnknown);
  }

  static constexpr int8_t kUnknown = -1;

  int remaining_target() const { return k_; }
  bool stopped() const { return stop_; }
  bool vertex_in_residual(int v) const { return in_residual_[v]; }
  int8_t reported_outcome(int v) const { return b_[v]; }
  EdgeState edge_state(int e) const { return state_[e]; }
  const Transcript& transcript() const { return transcript_; }
  Transcript& transcript() { return transcript_; }
  GpInvariantStats& stats() { return stats_; }

  bool residual_empty() const {
    for (EdgeState s : state_)
      if (s == EdgeState::Edge || s == EdgeState::Loop) return false;
    return true;
  }

  // Top-level ProbeVertex run (Algorithm 4), with the per-run m0 <= m1 + 1
  // and residual-independence invariants asserted on completion.
  void probe_vertex(int v) {
    if (!in_residual_[v]) throw PreconditionError("probe_vertex: vertex not in residual graph");
    run_m0_ = run_m1_ = 0;
    ++transcript_.probe_vertex_calls;
    ++stats_.probe_vertex_runs;
    probe_vertex_rec(v);
    ++stats_.m0m1_checks;
    if (run_m0_ > run_m1_ + 1) {
      ++stats_.violations;
      throw InvariantViolation("probe_vertex: m0 = " + std::to_string(run_m0_) + " > m1 + 1 = " +
                               std::to_string(run_m1_ + 1));
    }
    if (!stop_) assert_independence();
  }

  // RemoveVertex: delete v's loops (their values are already determined),
  // rewire its remaining proper edges into loops at the other endpoint, and
  // drop v from the residual vertex set.
  void remove_vertex(int v) {
    if (!in_residual_[v]) throw PreconditionError("remove_vertex: vertex not in residual graph");
    for (int e = 0; e < g_->num_edges(); ++e) {
      if (state_[e] == EdgeState::Loop && loop_owner_[e] == v) {
        state_[e] = EdgeState::Dropped;
      } else if (state_[e] == EdgeState::Edge) {
        auto [a, b] = g_->edges[e];
        if (a == v || b == v) {
          state_[e] = EdgeState::Loop;
          loop_owner_[e] = (a == v) ? b : a;
        }
      }
    }
    in_residual_[v] = 0;
  }

  // Residual instance handed to the knapsack policy: vertices of V' with
  // their activation probabilities and original degrees (ProbeVertex never
  // probes an edge at a residual vertex, so degrees are preserved).
  std::vector<VpItem> residual_items() const {
    std::vector<VpItem> items;
    const auto deg = g_->degrees();
    for (int v = 0; v < g_->num_vertices(); ++v)
      if (in_residual_[v]) items.push_back({v, g_->vertex_prob[v], deg[v]});
    return items;
  }

  void record_phase_end() { transcript_.phase_end.push_back(static_cast<int>(transcript_.probes.size())); }

  // Final sweep (Algorithm 3 line 14): probe every original edge that was
  // never physically probed, in id order.
  void final_sweep() {
    for (int e = 0; e < g_->num_edges(); ++e) {
      if (state_[e] == EdgeState::Probed) continue;
      probe_edge(e);
      if (stop_) break;
    }
  }

  void check_phase_shrink(int k_before) {
    ++stats_.phase_checks;
    if (stop_ || residual_empty()) return;
    if (2 * k_ > k_before) {
      ++stats_.violations;
      throw InvariantViolation("phase ended with k' = " + std::to_string(k_) + " > half of " +
                               std::to_string(k_before));
    }
  }

 private:
  int probe_edge(int e) {
    const int out = edge_outcome(*g_, world_, e);
    state_[e] = EdgeState::Probed;
    transcript_.probes.push_back({e, out});
    if (out) {
      ++run_m1_;
      ++transcript_.actives_found;
      if (--k_ == 0) {
        stop_ = true;
        transcript_.target_met = true;
      }
    } else {
      ++run_m0_;
    }
    return out;
  }

  void probe_vertex_rec(int v) {
    if (stop_ || !in_residual_[v]) return;
    // loops at v first: each evaluates Y_v (the other endpoint is inactive)
    std::vector<int> loops;
    for (int e = 0; e < g_->num_edges(); ++e)
      if (state_[e] == EdgeState::Loop && loop_owner_[e] == v) loops.push_back(e);
    for (int e : loops) {
      if (probe_edge(e) == 0) {
        remove_vertex(v);
        b_[v] = 0;
        return;
      }
      if (stop_) return;
    }
    // proper edges to residual neighbors, ascending neighbor id (equals
    // ascending edge id for the canonical edge ordering)
    std::vector<std::pair<int, int>> nbrs;  // (neighbor, edge id)
    for (int e = 0; e < g_->num_edges(); ++e) {
      if (state_[e] != EdgeState::Edge) continue;
      auto [a, b] = g_->edges[e];
      if (a == v)
        nbrs.emplace_back(b, e);
      else if (b == v)
        nbrs.emplace_back(a, e);
    }
    std::sort(nbrs.begin(), nbrs.end());
    for (size_t i = 0; i < nbrs.size(); ++i) {
      const auto [u, e] = nbrs[i];
      if (probe_edge(e) == 0) {
        remove_vertex(v);
        remove_vertex(u);
        for (size_t j = 0; j < i; ++j) {
          if (stop_) break;
          if (in_residual_[nbrs[j].first]) probe_vertex_rec(nbrs[j].first);
        }
        b_[v] = 0;
        b_[u] = 0;
        return;
      }
      if (stop_) return;
    }
    // all incident edges were active: v leaves the residual graph (nothing to
    // rewire) and is reported active, which may overstate Y_v
    in_residual_[v] = 0;
    b_[v] = 1;
    for (const auto& [u, e] : nbrs) {
      if (stop_) return;
      if (in_residual_[u]) probe_vertex_rec(u);
    }
  }

  void assert_independence() {
    ++stats_.independence_checks;
    for (const ProbeRecord& rec : transcript_.probes) {
      auto [a, b] = g_->edges[rec.item];
      if (in_residual_[a] || in_residual_[b]) {
        ++stats_.violations;
        throw InvariantViolation("probed edge " + std::to_string(rec.item) +
                                 " touches the residual vertex set");
      }
    }
  }

  const ProbeGraph* g_;
  World world_;
  int k_;
  bool stop_ = false;
  std::vector<EdgeState> state_;
  std::vector<int> loop_owner_;
  std::vector<char> in_residual_;
  std::vector<int8_t> b_;
  Transcript transcript_;
  GpInvariantStats stats_;
  long long run_m0_ = 0, run_m1_ = 0;
};

// Algorithm 3, VertexProbingToGraphProbing: run the knapsack policy in
// phases on the residual instance; every requested vertex triggers a
// ProbeVertex run; leftover determined edges are probed in a final pseudo-
// phase. Throws InvariantViolation if any inline lemma check fails.
inline Transcript vp_to_gp(const ProbeGraph& g, int k, const PolicyFactory& make_policy,
                           const World& world, GpInvariantStats* stats_out = nullptr) {
  if (k <= 0) {
    Transcript t;
    t.target_met = true;
    return t;
  }
  GpSession session(g, k, world);
  while (!session.stopped() && !session.residual_empty()) {
    const int k_before = session.remaining_target();
    auto policy = make_policy(session.residual_items(), k_before);
    std::vector<char> requested(g.num_vertices(), 0);
    while (true) {
      auto req = policy->next();
      if (!req) break;
      const int v = *req;
      if (v < 0 || v >= g.num_vertices() || requested[v])
        throw InvariantViolation("vertex policy requested an invalid or repeated vertex");
      requested[v] = 1;
      if (session.vertex_in_residual(v)) session.probe_vertex(v);
      if (session.stopped()) break;
      policy->report(v, session.reported_outcome(v));
    }
    session.record_phase_end();
    session.check_phase_shrink(k_before);
  }
  if (!session.stopped()) {
    session.final_sweep();
    session.record_phase_end();
  }
  if (stats_out) *stats_out += session.stats();
  return session.transcript();
}

// ----------------------------------------------------------------------------
// Algorithm 2, GraphProbingToVertexProbing.

class EdgePolicy {
 public:
  virtual ~EdgePolicy() = default;
  virtual std::optional<int> next() = 0;           // edge id to probe
  virtual void report(int edge, int outcome) = 0;  // X value fed back
};

// Baseline adaptive GP policy: probe edges in id order until k actives.
class SequentialEdgePolicy final : public EdgePolicy {
 public:
  SequentialEdgePolicy(int num_edges, int k) : num_edges_(num_edges), remaining_(k) {}
  std::optional<int> next() override {
    if (remaining_ <= 0 || cursor_ >= num_edges_) return std::nullopt;
    return cursor_++;
  }
  void report(int, int outcome) override {
    if (outcome) --remaining_;
  }

 private:
  int num_edges_;
  int cursor_ = 0;
  int remaining_;
};

struct VpTranscript {
  std::vector<int> vertex_probes;
  std::vector<ProbeRecord> edge_reports;
  long long realized_value = 0;  // sum of deg_v Y_v over probed vertices
  bool target_met = false;
};

// Wraps a GP edge policy as a Vertex Probing algorithm: probing edge uv
// probes both endpoints (if new) and reports X_uv back. Vertex probes never
// exceed twice the edge probes.
inline VpTranscript gp_to_vp(const ProbeGraph& g, int k, EdgePolicy& policy, const World& world) {
  VpTranscript out;
  const auto deg = g.degrees();
  std::vector<char> probed(g.num_vertices(), 0);
  while (out.realized_value < k) {
    auto req = policy.next();
    if (!req) break;
    const auto [u, v] = g.edges[*req];
    for (int w : {u, v}) {
      if (!probed[w]) {
        probed[w] = 1;
        out.vertex_probes.push_back(w);
        if (world[w]) out.realized_value += deg[w];
      }
    }
    const int x = edge_outcome(g, world, *req);
    out.edge_reports.push_back({*req, x});
    policy.report(*req, x);
    if (2 * out.edge_reports.size() < out.vertex_probes.size())
      throw InvariantViolation("gp_to_vp: vertex probes exceeded twice the edge probes");
  }
  out.target_met = out.realized_value >= k;
  return out;
}

// ----------------------------------------------------------------------------
// Adaptivity-gap construction: a union of stars with inactive leaves.
// k = round(sqrt(n)); floor(n/(k+1)) stars, the last absorbing the remainder
// leaves; center activation probability log(n)/sqrt(n).
inline std::pair<ProbeGraph, int> star_gap_instance(int n) {
  if (n < 16) throw PreconditionError("star_gap_instance: n >= 16 required");
  const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  const int stars = n / (k + 1);
  const double p = std::log(static_cast<double>(n)) / std::sqrt(static_cast<double>(n));
  std::vector<double> probs(n, 0.0);
  std::vector<std::pair<int, int>> edges;
  // vertices are assigned star by star: center first, then its leaves
  int next_vertex = 0;
  for (int s = 0; s < stars; ++s) {
    const int center = next_vertex++;
    probs[center] = p;
    int leaves = k;
    if (s == stars - 1) leaves = n - next_vertex;  // absorb remainder
    for (int l = 0; l < leaves; ++l) {
      const int leaf = next_vertex++;
      edges.emplace_back(center, leaf);
    }
  }
  return {ProbeGraph(std::move(probs), std::move(edges)), k};
}

// Cost of probing edges in a fixed order until k actives are found (or
// exhaustion) — the non-adaptive baseline of the gap experiment.
inline long long fixed_order_cost(const ProbeGraph& g, const std::vector<int>& order, int k,
                                  const World& world) {
  int actives = 0;
  long long probes = 0;
  for (int e : order) {
    ++probes;
    if (edge_outcome(g, world, e)) {
      if (++actives >= k) return probes;
    }
  }
  return probes;
}

}  // namespace probecert
