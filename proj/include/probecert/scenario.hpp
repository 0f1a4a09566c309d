#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "probecert/bits.hpp"
#include "probecert/errors.hpp"
#include "probecert/rng.hpp"

namespace probecert {

struct GroundSet {
  int n = 0;
};

// The event "every element of forced_active is active and every element of
// forced_inactive is inactive" — the (U_1, U_0) pair of the joint oracle.
struct ConditioningEvent {
  Bits forced_active;
  Bits forced_inactive;

  ConditioningEvent(Bits active, Bits inactive)
      : forced_active(std::move(active)), forced_inactive(std::move(inactive)) {
    if (forced_active.width() != forced_inactive.width())
      throw DimensionError("ConditioningEvent: width mismatch");
    if (forced_active.intersects(forced_inactive))
      throw ValidationError("ConditioningEvent: forced_active and forced_inactive overlap");
  }

  static ConditioningEvent trivial(uint32_t n) { return {Bits(n), Bits(n)}; }

  bool matches(const Bits& scenario) const {
    return forced_active.subset_of(scenario) && !forced_inactive.intersects(scenario);
  }
};

enum class DistKind { Explicit, LatentVertex, PermutationReduction };

inline const char* to_string(DistKind k) {
  switch (k) {
    case DistKind::Explicit: return "explicit";
    case DistKind::LatentVertex: return "latent-vertex";
    case DistKind::PermutationReduction: return "permutation-reduction";
  }
  return "?";
}

// Joint distribution over active sets. Explicit supports carry their atoms
// directly; the two generative kinds (latent OR model, hitting-set
// permutation model) materialize an explicit support eagerly when small
// enough, and otherwise stay sampling-only with combinatorial joint queries.
class ScenarioDistribution {
 public:
  static constexpr double kNormTol = 1e-9;

  static ScenarioDistribution explicit_support(uint32_t n, std::vector<std::pair<Bits, double>> atoms) {
    ScenarioDistribution d;
    d.n_ = n;
    d.kind_ = DistKind::Explicit;
    d.support_ = std::move(atoms);
    d.validate_support();
    d.build_cdf();
    return d;
  }

  static ScenarioDistribution point_mass(const Bits& s) {
    return explicit_support(s.width(), {{s, 1.0}});
  }

  static ScenarioDistribution uniform_over(uint32_t n, const std::vector<Bits>& scenarios) {
    std::unordered_map<Bits, double, BitsHash> acc;
    for (const auto& s : scenarios) acc[s] += 1.0 / static_cast<double>(scenarios.size());
    std::vector<std::pair<Bits, double>> atoms(acc.begin(), acc.end());
    std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return explicit_support(n, std::move(atoms));
  }

  // Latent OR model: observed variable i is active iff some latent j in
  // neighborhood(i) is active; latents are independent Bernoulli(p_j).
  // Scenario bits range over the observed variables.
  static ScenarioDistribution latent_or_model(std::vector<double> latent_probs,
                                              std::vector<std::vector<int>> neighborhoods) {
    ScenarioDistribution d;
    d.kind_ = DistKind::LatentVertex;
    d.n_ = static_cast<uint32_t>(neighborhoods.size());
    for (double p : latent_probs)
      if (p < 0 || p > 1) throw ValidationError("latent_or_model: probability outside [0,1]");
    for (auto& nb : neighborhoods) {
      if (nb.empty()) throw ValidationError("latent_or_model: empty neighborhood");
      for (int j : nb)
        if (j < 0 || j >= static_cast<int>(latent_probs.size()))
          throw ValidationError("latent_or_model: latent id out of range");
      std::sort(nb.begin(), nb.end());
    }
    d.latent_probs_ = std::move(latent_probs);
    d.neighborhoods_ = std::move(neighborhoods);
    if (d.latent_probs_.size() <= kLatentMaterializeCap) {
      d.support_ = d.materialize_latent();
      d.build_cdf();
    }
    return d;
  }

  // Hitting-set reduction distribution: N sets over a universe of N original
  // elements; ground set has n = N^2 elements (copy l of e has id l*N+e).
  // A uniformly random permutation pi assigns set A_{pi(l)} to part l and the
  // copy e_l is active iff e is in A_{pi(l)}.
  static ScenarioDistribution permutation_reduction(std::vector<Bits> sets) {
    const int N = static_cast<int>(sets.size());
    if (N < 1) throw ValidationError("permutation_reduction: no sets");
    for (const auto& a : sets) {
      if (static_cast<int>(a.width()) != N)
        throw ValidationError("permutation_reduction: sets must live on an N-element universe");
      if (a.none()) throw ValidationError("permutation_reduction: sets must be nonempty");
    }
    ScenarioDistribution d;
    d.kind_ = DistKind::PermutationReduction;
    d.n_ = static_cast<uint32_t>(N) * static_cast<uint32_t>(N);
    d.hs_sets_ = std::move(sets);
    if (N <= kPermutationMaterializeCap) {
      d.support_ = d.materialize_permutation();
      d.build_cdf();
    }
    return d;
  }

  uint32_t n() const { return n_; }
  DistKind kind() const { return kind_; }
  bool has_explicit_support() const { return !support_.empty(); }

  const std::vector<std::pair<Bits, double>>& support() const {
    if (!has_explicit_support())
      throw CapacityError("ScenarioDistribution: support not materialized for this instance size");
    return support_;
  }

  const std::vector<double>& latent_probs() const { return latent_probs_; }
  const std::vector<std::vector<int>>& neighborhoods() const { return neighborhoods_; }
  const std::vector<Bits>& hs_sets() const { return hs_sets_; }

  // Exact Pr(S ⊇ U1, S ∩ U0 = ∅).
  double joint_probability(const ConditioningEvent& ev) const {
    if (ev.forced_active.width() != n_) throw DimensionError("joint_probability: event width mismatch");
    if (has_explicit_support()) {
      double total = 0;
      for (const auto& [s, p] : support_)
        if (ev.matches(s)) total += p;
      return total;
    }
    if (kind_ == DistKind::PermutationReduction) return permutation_joint(ev);
    throw CapacityError("joint_probability: no exact oracle for this instance size");
  }

  Bits sample(Rng& rng) const {
    if (has_explicit_support()) {
      const double u = rng.next_unit();
      auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      size_t idx = static_cast<size_t>(it - cdf_.begin());
      if (idx >= support_.size()) idx = support_.size() - 1;
      return support_[idx].first;
    }
    if (kind_ == DistKind::LatentVertex) {
      Bits s(n_);
      std::vector<uint8_t> y(latent_probs_.size());
      for (size_t j = 0; j < y.size(); ++j) y[j] = rng.bernoulli(latent_probs_[j]) ? 1 : 0;
      for (uint32_t i = 0; i < n_; ++i)
        for (int j : neighborhoods_[i])
          if (y[j]) {
            s.set(i);
            break;
          }
      return s;
    }
    // permutation kind, sampling-only
    const int N = static_cast<int>(hs_sets_.size());
    std::vector<int> pi = rng.permutation(N);
    return scenario_for_permutation(pi);
  }

  static constexpr size_t kLatentMaterializeCap = 16;   // 2^16 latent assignments
  static constexpr int kPermutationMaterializeCap = 5;  // 5! = 120 permutations

 private:
  void validate_support() {
    if (support_.empty()) throw ValidationError("ScenarioDistribution: empty support");
    double total = 0;
    for (const auto& [s, p] : support_) {
      if (s.width() != n_) throw DimensionError("ScenarioDistribution: scenario width mismatch");
      if (p < 0) throw ValidationError("ScenarioDistribution: negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > kNormTol)
      throw ValidationError("ScenarioDistribution: probabilities sum to " + std::to_string(total));
    std::sort(support_.begin(), support_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (size_t i = 1; i < support_.size(); ++i)
      if (support_[i].first == support_[i - 1].first)
        throw ValidationError("ScenarioDistribution: duplicate support scenario");
  }

  void build_cdf() {
    cdf_.clear();
    double acc = 0;
    for (const auto& [s, p] : support_) {
      acc += p;
      cdf_.push_back(acc);
    }
    if (!cdf_.empty()) cdf_.back() = 1.0;
  }

  std::vector<std::pair<Bits, double>> materialize_latent() const {
    const size_t m = latent_probs_.size();
    std::unordered_map<Bits, double, BitsHash> acc;
    for (uint64_t y = 0; y < (uint64_t{1} << m); ++y) {
      double p = 1;
      for (size_t j = 0; j < m; ++j) p *= (y >> j) & 1 ? latent_probs_[j] : 1 - latent_probs_[j];
      if (p == 0) continue;
      Bits s(n_);
      for (uint32_t i = 0; i < n_; ++i)
        for (int j : neighborhoods_[i])
          if ((y >> j) & 1) {
            s.set(i);
            break;
          }
      acc[s] += p;
    }
    std::vector<std::pair<Bits, double>> atoms(acc.begin(), acc.end());
    std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return atoms;
  }

  Bits scenario_for_permutation(const std::vector<int>& pi) const {
    const int N = static_cast<int>(hs_sets_.size());
    Bits s(n_);
    for (int l = 0; l < N; ++l)
      for (int e = 0; e < N; ++e)
        if (hs_sets_[pi[l]].test(e)) s.set(static_cast<uint32_t>(l * N + e));
    return s;
  }

  std::vector<std::pair<Bits, double>> materialize_permutation() const {
    const int N = static_cast<int>(hs_sets_.size());
    std::vector<int> pi(N);
    for (int i = 0; i < N; ++i) pi[i] = i;
    std::unordered_map<Bits, double, BitsHash> acc;
    double per = 1;
    for (int i = 2; i <= N; ++i) per /= i;
    do {
      acc[scenario_for_permutation(pi)] += per;
    } while (std::next_permutation(pi.begin(), pi.end()));
    std::vector<std::pair<Bits, double>> atoms(acc.begin(), acc.end());
    std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    // absorb rounding drift from the 1/N! terms
    double total = 0;
    for (auto& [s, p] : atoms) total += p;
    for (auto& [s, p] : atoms) p /= total;
    return atoms;
  }

  double permutation_joint(const ConditioningEvent& ev) const {
    const int N = static_cast<int>(hs_sets_.size());
    if (N > 8) throw CapacityError("joint_probability: permutation support too large to enumerate");
    std::vector<int> pi(N);
    for (int i = 0; i < N; ++i) pi[i] = i;
    long match = 0, total = 0;
    do {
      ++total;
      if (ev.matches(scenario_for_permutation(pi))) ++match;
    } while (std::next_permutation(pi.begin(), pi.end()));
    return static_cast<double>(match) / static_cast<double>(total);
  }

  uint32_t n_ = 0;
  DistKind kind_ = DistKind::Explicit;
  std::vector<std::pair<Bits, double>> support_;
  std::vector<double> cdf_;
  std::vector<double> latent_probs_;
  std::vector<std::vector<int>> neighborhoods_;
  std::vector<Bits> hs_sets_;
};

using JointOracle = std::function<double(const ConditioningEvent&)>;

// Sampling oracle built from a joint probability oracle: walk the elements in
// id order, flipping one conditional coin per element. Exactly n oracle calls;
// the denominator of each conditional is carried over from the previous step.
inline Bits sample_from_joint_oracle(const JointOracle& jp, int n, Rng& rng) {
  Bits active(n), inactive(n);
  double mass = 1.0;  // Pr(current prefix pattern)
  for (int e = 0; e < n; ++e) {
    Bits with_e = active;
    with_e.set(e);
    const double num = jp(ConditioningEvent(with_e, inactive));
    const double cond = num / mass;
    if (!(cond >= -1e-9 && cond <= 1.0 + 1e-9))
      throw ValidationError("sample_from_joint_oracle: inconsistent oracle, conditional = " +
                            std::to_string(cond));
    if (rng.next_unit() < cond) {
      active = with_e;
      mass = num;
    } else {
      inactive.set(e);
      mass -= num;
    }
    if (mass <= 0) mass = std::numeric_limits<double>::min();  // guard exhausted prefixes
  }
  return active;
}

inline double estimate_joint_from_sampler(const ScenarioDistribution& d, const ConditioningEvent& ev,
                                          long samples, Rng& rng) {
  if (samples < 1) throw PreconditionError("estimate_joint_from_sampler: samples >= 1 required");
  long hits = 0;
  for (long i = 0; i < samples; ++i)
    if (ev.matches(d.sample(rng))) ++hits;
  return static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace probecert
