#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "probecert/bits.hpp"
#include "probecert/errors.hpp"
#include "probecert/matroid.hpp"
#include "probecert/rng.hpp"
#include "probecert/scenario.hpp"

namespace probecert {

struct MatroidInstance {
  Matroid matroid;
  ScenarioDistribution dist;
};

// ----------------------------------------------------------------------------
// Hitting-set reduction (the hardness construction, used as a generator).

// N sets over a universe of N elements -> partition matroid on N^2 elements
// (copy l of original element e has id l*N+e, part l holds the l-th copies,
// every quota is 1) paired with the random-permutation distribution.
inline MatroidInstance hitting_set_reduction(const std::vector<Bits>& sets) {
  const int N = static_cast<int>(sets.size());
  ScenarioDistribution dist = ScenarioDistribution::permutation_reduction(sets);
  std::vector<std::vector<int>> parts(N);
  for (int l = 0; l < N; ++l)
    for (int e = 0; e < N; ++e) parts[l].push_back(l * N + e);
  std::vector<int> quotas(N, 1);
  return {Matroid::partition(parts, quotas), std::move(dist)};
}

// Step 3 of the reduction: for each part, the shortest prefix of the order
// restricted to that part whose originals hit every set; returns the smallest
// such hitting set (over the original universe).
inline Bits extract_hitting_set(const std::vector<int>& order, const std::vector<Bits>& sets) {
  const int N = static_cast<int>(sets.size());
  if (static_cast<int>(order.size()) != N * N)
    throw PreconditionError("extract_hitting_set: order must cover all N^2 elements");
  auto hits_all = [&](const Bits& chosen) {
    for (const Bits& a : sets)
      if (!a.intersects(chosen)) return false;
    return true;
  };
  Bits best(N);
  int best_size = N + 1;
  for (int l = 0; l < N; ++l) {
    Bits chosen(N);
    int taken = 0;
    for (int id : order) {
      if (id / N != l) continue;
      chosen.set(id % N);
      ++taken;
      if (hits_all(chosen)) break;
    }
    if (!hits_all(chosen))
      throw InternalError("extract_hitting_set: a full part failed to hit every set");
    if (taken < best_size) {
      best_size = taken;
      best = chosen;
    }
  }
  return best;
}

inline bool is_hitting_set(const Bits& chosen, const std::vector<Bits>& sets) {
  for (const Bits& a : sets)
    if (!a.intersects(chosen)) return false;
  return true;
}

// Exhaustive minimum hitting set (N <= 20).
inline int brute_force_hitting_set(const std::vector<Bits>& sets) {
  const int N = static_cast<int>(sets[0].width());
  if (N > 20) throw CapacityError("brute_force_hitting_set: N <= 20 required");
  int best = N + 1;
  for (uint32_t mask = 0; mask < (uint32_t{1} << N); ++mask) {
    const Bits chosen = Bits::from_mask(N, mask);
    if (static_cast<int>(chosen.count()) < best && is_hitting_set(chosen, sets))
      best = static_cast<int>(chosen.count());
  }
  return best;
}

// The explicit probing order of the reduction's cost claim: all N copies of
// each chosen element first, then everything else in id order.
inline std::vector<int> reduction_claim_order(const std::vector<Bits>& sets, const Bits& hitting_set) {
  const int N = static_cast<int>(sets.size());
  std::vector<int> order;
  std::vector<char> used(N * N, 0);
  for (int e = 0; e < N; ++e) {
    if (!hitting_set.test(e)) continue;
    for (int l = 0; l < N; ++l) {
      order.push_back(l * N + e);
      used[l * N + e] = 1;
    }
  }
  for (int id = 0; id < N * N; ++id)
    if (!used[id]) order.push_back(id);
  return order;
}

// ----------------------------------------------------------------------------
// Paley-Zygmund experiment: Pr(exists l in T with phi(l) = pi(l)) over a
// uniformly random permutation pi.

inline double paley_zygmund_check(int N, const Bits& t_set, const std::vector<int>& phi, long trials,
                                  Rng& rng) {
  if (static_cast<int>(phi.size()) != N) throw DimensionError("paley_zygmund_check: phi size mismatch");
  long hits = 0;
  for (long i = 0; i < trials; ++i) {
    const std::vector<int> pi = rng.permutation(N);
    for (int l = 0; l < N; ++l)
      if (t_set.test(l) && phi[l] == pi[l]) {
        ++hits;
        break;
      }
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

inline double paley_zygmund_exact(int N, const Bits& t_set, const std::vector<int>& phi) {
  if (N > 8) throw CapacityError("paley_zygmund_exact: N <= 8 required");
  std::vector<int> pi(N);
  std::iota(pi.begin(), pi.end(), 0);
  long match = 0, total = 0;
  do {
    ++total;
    for (int l = 0; l < N; ++l)
      if (t_set.test(l) && phi[l] == pi[l]) {
        ++match;
        break;
      }
  } while (std::next_permutation(pi.begin(), pi.end()));
  return static_cast<double>(match) / static_cast<double>(total);
}

// ----------------------------------------------------------------------------
// Random fixtures.

inline Matroid random_matroid(int n, Matroid::Kind kind, Rng& rng) {
  switch (kind) {
    case Matroid::Kind::Uniform:
      return Matroid::uniform(n, 1 + static_cast<int>(rng.next_below(std::max(1, n - 1))));
    case Matroid::Kind::Partition: {
      const int num_parts = 1 + static_cast<int>(rng.next_below(std::min(3, n)));
      std::vector<std::vector<int>> parts(num_parts);
      for (int e = 0; e < n; ++e) parts[e % num_parts].push_back(e);
      // keep ids contiguous-free: shuffle element assignment
      std::vector<int> ids = rng.permutation(n);
      std::vector<std::vector<int>> shuffled(num_parts);
      int at = 0;
      for (int l = 0; l < num_parts; ++l)
        for (size_t c = 0; c < parts[l].size(); ++c) shuffled[l].push_back(ids[at++]);
      std::vector<int> quotas(num_parts);
      for (int l = 0; l < num_parts; ++l)
        quotas[l] = 1 + static_cast<int>(rng.next_below(shuffled[l].size()));
      return Matroid::partition(shuffled, quotas);
    }
    case Matroid::Kind::Graphic: {
      // simple graph with exactly n edges: a random spanning tree plus random
      // chords; v is sized so the complete graph has room for n edges
      int v = 2;
      while (v * (v - 1) / 2 < n) ++v;
      v += static_cast<int>(rng.next_below(2));
      std::vector<std::pair<int, int>> edges;
      auto has = [&](int a, int b) {
        for (auto [x, y] : edges)
          if ((x == a && y == b) || (x == b && y == a)) return true;
        return false;
      };
      for (int w = 1; w < v && static_cast<int>(edges.size()) < n; ++w)
        edges.emplace_back(static_cast<int>(rng.next_below(w)), w);  // random spanning tree
      while (static_cast<int>(edges.size()) < n) {
        const int a = static_cast<int>(rng.next_below(v));
        const int b = static_cast<int>(rng.next_below(v));
        if (a != b && !has(a, b)) edges.emplace_back(std::min(a, b), std::max(a, b));
      }
      return Matroid::graphic(v, edges);
    }
  }
  throw InternalError("random_matroid: unknown kind");
}

// Random explicit distribution over spanning sets of a random matroid of the
// given kind, with exp(1)-weighted normalized probabilities. Deterministic in
// the seed.
inline MatroidInstance random_correlated_instance(int n, int support_size, Matroid::Kind kind,
                                                  uint64_t seed) {
  if (n > 16) throw PreconditionError("random_correlated_instance: n <= 16 for oracle compatibility");
  Rng rng(seed, 101);
  Matroid m = random_matroid(n, kind, rng);
  std::vector<Bits> spanning;
  for (uint32_t mask = 0; mask < (uint32_t{1} << n); ++mask) {
    const Bits s = Bits::from_mask(n, mask);
    if (m.is_spanning(s)) spanning.push_back(s);
  }
  rng.shuffle(spanning);
  if (static_cast<int>(spanning.size()) > support_size) spanning.resize(support_size);
  std::vector<Bits>& scenarios = spanning;
  std::vector<std::pair<Bits, double>> atoms;
  double total = 0;
  std::vector<double> w(scenarios.size());
  for (size_t i = 0; i < w.size(); ++i) {
    w[i] = rng.exponential();
    total += w[i];
  }
  for (size_t i = 0; i < w.size(); ++i) atoms.emplace_back(scenarios[i], w[i] / total);
  // absorb rounding drift exactly
  double acc = 0;
  for (size_t i = 0; i + 1 < atoms.size(); ++i) acc += atoms[i].second;
  atoms.back().second = 1.0 - acc;
  return {std::move(m), ScenarioDistribution::explicit_support(n, std::move(atoms))};
}

// k-MSSC style instance: uniform distribution over random sets of size >= k,
// paired with the k-uniform matroid.
inline MatroidInstance kmssc_instance(int n, int k, int num_sets, uint64_t seed) {
  Rng rng(seed, 202);
  std::vector<Bits> sets;
  long guard = 0;
  while (static_cast<int>(sets.size()) < num_sets) {
    const int size = k + static_cast<int>(rng.next_below(n - k + 1));
    std::vector<int> ids = rng.permutation(n);
    ids.resize(size);
    Bits s = Bits::from_ids(n, ids);
    if (std::find(sets.begin(), sets.end(), s) != sets.end() && ++guard < 1000) continue;
    sets.push_back(s);
  }
  return {Matroid::uniform(n, k), ScenarioDistribution::uniform_over(n, sets)};
}

// ----------------------------------------------------------------------------
// Negatively associated families for the CNA tests.

// Pr(S) proportional to prod_{e in S} w_e over size-k subsets.
inline ScenarioDistribution weighted_k_subset_distribution(int n, int k, const std::vector<double>& w) {
  if (static_cast<int>(w.size()) != n) throw DimensionError("weighted_k_subset_distribution: weight size");
  if (n > 20) throw CapacityError("weighted_k_subset_distribution: n <= 20 required");
  std::vector<std::pair<Bits, double>> atoms;
  double total = 0;
  for (uint32_t mask = 0; mask < (uint32_t{1} << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    double p = 1;
    for (uint32_t m = mask; m; m &= m - 1) p *= w[std::countr_zero(m)];
    atoms.emplace_back(Bits::from_mask(n, mask), p);
    total += p;
  }
  if (atoms.empty() || total <= 0) throw ValidationError("weighted_k_subset_distribution: empty family");
  for (auto& [s, p] : atoms) p /= total;
  double acc = 0;
  for (size_t i = 0; i + 1 < atoms.size(); ++i) acc += atoms[i].second;
  atoms.back().second = 1.0 - acc;
  return ScenarioDistribution::explicit_support(n, std::move(atoms));
}

// Uniform distribution over the spanning trees of a small graph, as edge
// indicator vectors (elements = edges).
inline ScenarioDistribution uniform_spanning_tree_distribution(int vertices,
                                                               const std::vector<std::pair<int, int>>& edges) {
  const int n = static_cast<int>(edges.size());
  if (n > 20) throw CapacityError("uniform_spanning_tree_distribution: <= 20 edges required");
  Matroid g = Matroid::graphic(vertices, edges);
  const int target = vertices - 1;
  std::vector<Bits> trees;
  for (uint32_t mask = 0; mask < (uint32_t{1} << n); ++mask) {
    if (std::popcount(mask) != target) continue;
    const Bits t = Bits::from_mask(n, mask);
    if (g.rank(t) == target && g.rank_full() == target) trees.push_back(t);
  }
  if (trees.empty()) throw ValidationError("uniform_spanning_tree_distribution: graph is not connected");
  return ScenarioDistribution::uniform_over(n, trees);
}

}  // namespace probecert
