#pragma once

#include <algorithm>
#include <bit>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "probecert/bits.hpp"
#include "probecert/errors.hpp"
#include "probecert/rng.hpp"

namespace probecert {

// Rank-oracle matroid with three concrete kinds:
//   Uniform(n, k):      r(T) = min(|T|, k)
//   Partition:          r(T) = sum_l min(|T ∩ part_l|, quota_l)
//   Graphic:            ground set = edges, r(T) = forest rank via union-find
// Immutable after construction; rank calls are pure.
class Matroid {
 public:
  enum class Kind { Uniform, Partition, Graphic };

  static Matroid uniform(int n, int k) {
    if (n < 1) throw ValidationError("uniform matroid: n must be >= 1");
    if (k < 0 || k > n) throw ValidationError("uniform matroid: need 0 <= k <= n");
    Matroid m;
    m.kind_ = Kind::Uniform;
    m.n_ = n;
    m.k_ = k;
    m.rank_full_ = k;
    return m;
  }

  static Matroid partition(const std::vector<std::vector<int>>& parts, const std::vector<int>& quotas) {
    if (parts.size() != quotas.size()) throw ValidationError("partition matroid: parts/quotas size mismatch");
    int n = 0;
    for (const auto& p : parts) n += static_cast<int>(p.size());
    if (n < 1) throw ValidationError("partition matroid: empty ground set");
    Matroid m;
    m.kind_ = Kind::Partition;
    m.n_ = n;
    m.part_of_.assign(n, -1);
    for (size_t l = 0; l < parts.size(); ++l) {
      if (parts[l].empty()) throw ValidationError("partition matroid: empty part");
      if (quotas[l] < 0 || quotas[l] > static_cast<int>(parts[l].size()))
        throw ValidationError("partition matroid: quota out of range");
      for (int e : parts[l]) {
        if (e < 0 || e >= n) throw ValidationError("partition matroid: element id out of range");
        if (m.part_of_[e] != -1) throw ValidationError("partition matroid: parts must be disjoint");
        m.part_of_[e] = static_cast<int>(l);
      }
    }
    for (int e = 0; e < n; ++e)
      if (m.part_of_[e] == -1) throw ValidationError("partition matroid: parts must cover the ground set");
    m.quotas_ = quotas;
    m.rank_full_ = std::accumulate(quotas.begin(), quotas.end(), 0);
    return m;
  }

  // Ground set = edge list; element i is edges[i].
  static Matroid graphic(int num_vertices, const std::vector<std::pair<int, int>>& edges) {
    if (num_vertices < 1) throw ValidationError("graphic matroid: need >= 1 vertex");
    if (edges.empty()) throw ValidationError("graphic matroid: empty ground set");
    Matroid m;
    m.kind_ = Kind::Graphic;
    m.n_ = static_cast<int>(edges.size());
    m.num_vertices_ = num_vertices;
    for (auto [u, v] : edges) {
      if (u < 0 || u >= num_vertices || v < 0 || v >= num_vertices)
        throw ValidationError("graphic matroid: edge endpoint out of range");
      m.edges_.emplace_back(u, v);
    }
    m.rank_full_ = m.rank(Bits::full(m.n_));
    return m;
  }

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  int rank_full() const { return rank_full_; }
  int uniform_k() const { return k_; }
  int num_vertices() const { return num_vertices_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& quotas() const { return quotas_; }
  const std::vector<int>& part_of() const { return part_of_; }

  std::vector<std::vector<int>> parts() const {
    std::vector<std::vector<int>> out(quotas_.size());
    for (int e = 0; e < n_; ++e) out[part_of_[e]].push_back(e);
    return out;
  }

  int rank(const Bits& t) const {
    if (static_cast<int>(t.width()) != n_) throw DimensionError("Matroid::rank: width mismatch");
    switch (kind_) {
      case Kind::Uniform:
        return std::min<int>(static_cast<int>(t.count()), k_);
      case Kind::Partition: {
        std::vector<int> cnt(quotas_.size(), 0);
        for (int e = 0; e < n_; ++e)
          if (t.test(e)) cnt[part_of_[e]]++;
        int r = 0;
        for (size_t l = 0; l < quotas_.size(); ++l) r += std::min(cnt[l], quotas_[l]);
        return r;
      }
      case Kind::Graphic: {
        UnionFind uf(num_vertices_);
        int r = 0;
        for (int e = 0; e < n_; ++e)
          if (t.test(e) && uf.unite(edges_[e].first, edges_[e].second)) r++;
        return r;
      }
    }
    return 0;
  }

  // Rank of the subset of `members` selected by `mask`. Hot path for the
  // 2^|S| subset scans; avoids building Bits per query.
  int rank_mask(std::span<const int> members, uint32_t mask) const {
    switch (kind_) {
      case Kind::Uniform:
        return std::min<int>(std::popcount(mask), k_);
      case Kind::Partition: {
        int r = 0;
        // quotas are small; count per part on the fly
        std::vector<int> cnt(quotas_.size(), 0);
        for (uint32_t m = mask; m; m &= m - 1) cnt[part_of_[members[std::countr_zero(m)]]]++;
        for (size_t l = 0; l < quotas_.size(); ++l) r += std::min(cnt[l], quotas_[l]);
        return r;
      }
      case Kind::Graphic: {
        UnionFind uf(num_vertices_);
        int r = 0;
        for (uint32_t m = mask; m; m &= m - 1) {
          auto [u, v] = edges_[members[std::countr_zero(m)]];
          if (uf.unite(u, v)) r++;
        }
        return r;
      }
    }
    return 0;
  }

  bool is_spanning(const Bits& s) const { return rank(s) == rank_full_; }

 private:
  struct UnionFind {
    explicit UnionFind(int n) : parent(n) {
      for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    }
    bool unite(int a, int b) {
      a = find(a);
      b = find(b);
      if (a == b) return false;
      parent[b] = a;
      return true;
    }
    std::vector<int> parent;
  };

  Kind kind_ = Kind::Uniform;
  int n_ = 0;
  int rank_full_ = 0;
  int k_ = 0;                                 // uniform
  std::vector<int> part_of_, quotas_;         // partition
  int num_vertices_ = 0;                      // graphic
  std::vector<std::pair<int, int>> edges_;    // graphic
};

struct RankAxiomWitness {
  Bits a, b;
  std::string what;
};

// Randomized/exhaustive validation of the rank oracle: monotone, submodular,
// bounded by cardinality. Exhaustive over all pairs when n <= 12, otherwise
// `trials` sampled pairs. Returns a witness on failure.
inline std::optional<RankAxiomWitness> check_rank_axioms(const Matroid& m, long trials, Rng& rng) {
  const int n = m.n();
  auto violation = [&](const Bits& a, const Bits& b) -> std::optional<RankAxiomWitness> {
    const int ra = m.rank(a), rb = m.rank(b);
    if (ra > static_cast<int>(a.count())) return RankAxiomWitness{a, b, "rank exceeds cardinality"};
    if (a.subset_of(b) && ra > rb) return RankAxiomWitness{a, b, "rank not monotone"};
    if (ra + rb < m.rank(a | b) + m.rank(a & b)) return RankAxiomWitness{a, b, "rank not submodular"};
    return std::nullopt;
  };
  if (n <= 12) {
    for (uint64_t x = 0; x < (uint64_t{1} << n); ++x)
      for (uint64_t y = x; y < (uint64_t{1} << n); ++y)
        if (auto w = violation(Bits::from_mask(n, x), Bits::from_mask(n, y))) return w;
    return std::nullopt;
  }
  for (long i = 0; i < trials; ++i) {
    Bits a(n), b(n);
    for (int e = 0; e < n; ++e) {
      if (rng.bernoulli(0.5)) a.set(e);
      if (rng.bernoulli(0.5)) b.set(e);
    }
    if (auto w = violation(a, b)) return w;
  }
  return std::nullopt;
}

}  // namespace probecert
