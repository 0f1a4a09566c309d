#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "probecert/errors.hpp"
#include "probecert/graph_probe.hpp"
#include "probecert/rng.hpp"

namespace probecert {

// Latent OR model: observed variable X_i = OR of the independent latent
// Bernoullis in its neighborhood N(i). Rank rho = max |N(i)|; rho = 2 with
// lex-sorted pair neighborhoods is exactly Graph Probing.
struct ProbeHypergraph {
  std::vector<double> latent_prob;
  std::vector<std::vector<int>> observed;  // neighborhoods, each sorted ascending

  ProbeHypergraph(std::vector<double> probs, std::vector<std::vector<int>> neighborhoods)
      : latent_prob(std::move(probs)), observed(std::move(neighborhoods)) {
    for (double p : latent_prob)
      if (p < 0 || p > 1) throw ValidationError("ProbeHypergraph: latent probability outside [0,1]");
    for (auto& nb : observed) {
      if (nb.empty()) throw ValidationError("ProbeHypergraph: empty neighborhood");
      std::sort(nb.begin(), nb.end());
      for (size_t j = 1; j < nb.size(); ++j)
        if (nb[j] == nb[j - 1]) throw ValidationError("ProbeHypergraph: duplicate latent in neighborhood");
      for (int j : nb)
        if (j < 0 || j >= static_cast<int>(latent_prob.size()))
          throw ValidationError("ProbeHypergraph: latent id out of range");
    }
  }

  static ProbeHypergraph from_graph(const ProbeGraph& g) {
    std::vector<std::vector<int>> nbs;
    nbs.reserve(g.edges.size());
    for (auto [u, v] : g.edges) nbs.push_back({u, v});
    return ProbeHypergraph(g.vertex_prob, std::move(nbs));
  }

  int num_latents() const { return static_cast<int>(latent_prob.size()); }
  int num_observed() const { return static_cast<int>(observed.size()); }

  int rank() const {
    size_t r = 0;
    for (const auto& nb : observed) r = std::max(r, nb.size());
    return static_cast<int>(r);
  }

  std::vector<int> latent_weights() const {
    std::vector<int> w(num_latents(), 0);
    for (const auto& nb : observed)
      for (int j : nb) w[j]++;
    return w;
  }
};

inline World simulate_latent_world(const ProbeHypergraph& h, Rng& rng) {
  World y(h.num_latents());
  for (size_t j = 0; j < y.size(); ++j) y[j] = rng.bernoulli(h.latent_prob[j]) ? 1 : 0;
  return y;
}

inline int observed_outcome(const ProbeHypergraph& h, const World& y, int i) {
  for (int j : h.observed[i])
    if (y[j]) return 1;
  return 0;
}

// Residual hypergraph state. Each observed variable keeps its residual
// neighborhood (latents not yet determined inactive); a variable whose
// residual neighborhood empties is determined 0 and dropped unprobed.
class HgpSession {
 public:
  enum class ObsState : uint8_t { Open, Probed, Dropped };

  HgpSession(const ProbeHypergraph& h, int k, World world) : h_(&h), world_(std::move(world)), k_(k) {
    if (k < 0) throw ValidationError("HgpSession: k >= 0 required");
    if (static_cast<int>(world_.size()) != h.num_latents())
      throw DimensionError("HgpSession: world size mismatch");
    state_.assign(h.num_observed(), ObsState::Open);
    residual_nb_ = h.observed;
    in_residual_.assign(h.num_latents(), 1);
    b_.assign(h.num_latents(), kUnknown);
  }

  static constexpr int8_t kUnknown = -1;

  int remaining_target() const { return k_; }
  bool stopped() const { return stop_; }
  bool latent_in_residual(int j) const { return in_residual_[j]; }
  int8_t reported_outcome(int j) const { return b_[j]; }
  const Transcript& transcript() const { return transcript_; }
  GpInvariantStats& stats() { return stats_; }

  bool residual_empty() const {
    for (ObsState s : state_)
      if (s == ObsState::Open) return false;
    return true;
  }

  // ProbeLatent: the rho-ary transliteration of ProbeVertex. Per-run bound
  // m0 <= (rho - 1) m1 + 1 and the independence invariant are asserted.
  void probe_latent(int j) {
    if (!in_residual_[j]) throw PreconditionError("probe_latent: latent not in residual instance");
    run_m0_ = run_m1_ = 0;
    ++transcript_.probe_vertex_calls;
    ++stats_.probe_vertex_runs;
    probe_latent_rec(j);
    ++stats_.m0m1_checks;
    const long long rho = std::max(1, h_->rank());
    if (run_m0_ > (rho - 1) * run_m1_ + 1) {
      ++stats_.violations;
      throw InvariantViolation("probe_latent: m0 = " + std::to_string(run_m0_) + " > (rho-1) m1 + 1 = " +
                               std::to_string((rho - 1) * run_m1_ + 1));
    }
    if (!stop_) assert_independence();
  }

  // Latent j is determined inactive: drop it from every open residual
  // neighborhood; variables whose OR empties are determined 0 unprobed.
  void remove_latent(int j) {
    if (!in_residual_[j]) throw PreconditionError("remove_latent: latent not in residual instance");
    for (int i = 0; i < h_->num_observed(); ++i) {
      if (state_[i] != ObsState::Open) continue;
      auto& nb = residual_nb_[i];
      auto it = std::find(nb.begin(), nb.end(), j);
      if (it == nb.end()) continue;
      nb.erase(it);
      if (nb.empty()) state_[i] = ObsState::Dropped;
    }
    in_residual_[j] = 0;
  }

  std::vector<VpItem> residual_items() const {
    std::vector<VpItem> items;
    const auto w = h_->latent_weights();
    for (int j = 0; j < h_->num_latents(); ++j)
      if (in_residual_[j]) items.push_back({j, h_->latent_prob[j], w[j]});
    return items;
  }

  void record_phase_end() { transcript_.phase_end.push_back(static_cast<int>(transcript_.probes.size())); }

  void final_sweep() {
    for (int i = 0; i < h_->num_observed(); ++i) {
      if (state_[i] == ObsState::Probed) continue;
      probe_observed(i);
      if (stop_) break;
    }
  }

  // Phase shrink for rank rho: rho * k'_after <= (rho - 1) * k'_before.
  void check_phase_shrink(int k_before) {
    ++stats_.phase_checks;
    if (stop_ || residual_empty()) return;
    const long long rho = std::max(1, h_->rank());
    if (rho * static_cast<long long>(k_) > (rho - 1) * static_cast<long long>(k_before)) {
      ++stats_.violations;
      throw InvariantViolation("phase ended with k' = " + std::to_string(k_) +
                               " above the (1 - 1/rho) decay from " + std::to_string(k_before));
    }
  }

 private:
  int probe_observed(int i) {
    const int out = observed_outcome(*h_, world_, i);
    state_[i] = ObsState::Probed;
    transcript_.probes.push_back({i, out});
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

  void probe_latent_rec(int j) {
    if (stop_ || !in_residual_[j]) return;
    // singleton hyperedges first: X_i with residual neighborhood {j} reads Y_j
    std::vector<int> singles;
    for (int i = 0; i < h_->num_observed(); ++i)
      if (state_[i] == ObsState::Open && residual_nb_[i].size() == 1 && residual_nb_[i][0] == j)
        singles.push_back(i);
    for (int i : singles) {
      if (probe_observed(i) == 0) {
        remove_latent(j);
        b_[j] = 0;
        return;
      }
      if (stop_) return;
    }
    // wider hyperedges containing j, ascending observed id; remember the
    // residual co-latents of each as probed for the deferred recursion
    std::vector<int> direct;
    for (int i = 0; i < h_->num_observed(); ++i) {
      if (state_[i] != ObsState::Open) continue;
      const auto& nb = residual_nb_[i];
      if (nb.size() >= 2 && std::find(nb.begin(), nb.end(), j) != nb.end()) direct.push_back(i);
    }
    std::vector<std::vector<int>> others(direct.size());
    for (size_t idx = 0; idx < direct.size(); ++idx) {
      const int i = direct[idx];
      for (int l : residual_nb_[i])
        if (l != j) others[idx].push_back(l);
      if (probe_observed(i) == 0) {
        // every latent in the residual neighborhood is inactive
        remove_latent(j);
        for (int l : others[idx])
          if (in_residual_[l]) remove_latent(l);
        for (size_t m = 0; m < idx; ++m) {
          for (int l : others[m]) {
            if (stop_) break;
            if (in_residual_[l]) probe_latent_rec(l);
          }
          if (stop_) break;
        }
        b_[j] = 0;
        for (int l : others[idx]) b_[l] = 0;
        return;
      }
      if (stop_) return;
    }
    // all active: j leaves the residual instance and is reported active
    in_residual_[j] = 0;
    b_[j] = 1;
    for (size_t idx = 0; idx < direct.size(); ++idx) {
      for (int l : others[idx]) {
        if (stop_) return;
        if (in_residual_[l]) probe_latent_rec(l);
      }
    }
  }

  void assert_independence() {
    ++stats_.independence_checks;
    for (const ProbeRecord& rec : transcript_.probes)
      for (int j : h_->observed[rec.item])
        if (in_residual_[j]) {
          ++stats_.violations;
          throw InvariantViolation("probed observed variable " + std::to_string(rec.item) +
                                   " intersects the residual latent set");
        }
  }

  const ProbeHypergraph* h_;
  World world_;
  int k_;
  bool stop_ = false;
  std::vector<ObsState> state_;
  std::vector<std::vector<int>> residual_nb_;
  std::vector<char> in_residual_;
  std::vector<int8_t> b_;
  Transcript transcript_;
  GpInvariantStats stats_;
  long long run_m0_ = 0, run_m1_ = 0;
};

// Phase loop for Hypergraph Probing (mirrors vp_to_gp with the knapsack
// policy running over latents weighted by hypergraph degree).
inline Transcript lvp_to_hgp(const ProbeHypergraph& h, int k, const PolicyFactory& make_policy,
                             const World& world, GpInvariantStats* stats_out = nullptr) {
  if (k <= 0) {
    Transcript t;
    t.target_met = true;
    return t;
  }
  HgpSession session(h, k, world);
  while (!session.stopped() && !session.residual_empty()) {
    const int k_before = session.remaining_target();
    auto policy = make_policy(session.residual_items(), k_before);
    std::vector<char> requested(h.num_latents(), 0);
    while (true) {
      auto req = policy->next();
      if (!req) break;
      const int j = *req;
      if (j < 0 || j >= h.num_latents() || requested[j])
        throw InvariantViolation("latent policy requested an invalid or repeated latent");
      requested[j] = 1;
      if (session.latent_in_residual(j)) session.probe_latent(j);
      if (session.stopped()) break;
      policy->report(j, session.reported_outcome(j));
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

class ObservedPolicy {
 public:
  virtual ~ObservedPolicy() = default;
  virtual std::optional<int> next() = 0;
  virtual void report(int observed, int outcome) = 0;
};

class SequentialObservedPolicy final : public ObservedPolicy {
 public:
  SequentialObservedPolicy(int num_observed, int k) : num_observed_(num_observed), remaining_(k) {}
  std::optional<int> next() override {
    if (remaining_ <= 0 || cursor_ >= num_observed_) return std::nullopt;
    return cursor_++;
  }
  void report(int, int outcome) override {
    if (outcome) --remaining_;
  }

 private:
  int num_observed_;
  int cursor_ = 0;
  int remaining_;
};

struct LvpTranscript {
  std::vector<int> latent_probes;
  std::vector<ProbeRecord> observed_reports;
  long long realized_value = 0;
  bool target_met = false;
};

// HGP-to-LVP direction: probing observed X_i probes every latent in N(i)
// that is still unprobed; latent probes never exceed rho times the observed
// probes.
inline LvpTranscript hgp_to_lvp(const ProbeHypergraph& h, int k, ObservedPolicy& policy,
                                const World& world) {
  LvpTranscript out;
  const auto w = h.latent_weights();
  std::vector<char> probed(h.num_latents(), 0);
  const long long rho = std::max(1, h.rank());
  while (out.realized_value < k) {
    auto req = policy.next();
    if (!req) break;
    for (int j : h.observed[*req]) {
      if (!probed[j]) {
        probed[j] = 1;
        out.latent_probes.push_back(j);
        if (world[j]) out.realized_value += w[j];
      }
    }
    const int x = observed_outcome(h, world, *req);
    out.observed_reports.push_back({*req, x});
    policy.report(*req, x);
    if (static_cast<long long>(out.latent_probes.size()) >
        rho * static_cast<long long>(out.observed_reports.size()))
      throw InvariantViolation("hgp_to_lvp: latent probes exceeded rho times the observed probes");
  }
  out.target_met = out.realized_value >= k;
  return out;
}

}  // namespace probecert
