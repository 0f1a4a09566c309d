#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "probecert/matroid.hpp"
#include "probecert/rng.hpp"

using namespace probecert;

namespace {

// Independent forest-rank oracle: vertices touched minus components touched,
// via plain DFS (no union-find).
int dfs_forest_rank(int vertices, const std::vector<std::pair<int, int>>& edges, const Bits& t) {
  std::vector<std::vector<int>> adj(vertices);
  std::vector<char> touched(vertices, 0);
  for (size_t e = 0; e < edges.size(); ++e) {
    if (!t.test(static_cast<uint32_t>(e))) continue;
    auto [u, v] = edges[e];
    adj[u].push_back(v);
    adj[v].push_back(u);
    touched[u] = touched[v] = 1;
  }
  std::vector<char> seen(vertices, 0);
  int verts = 0, comps = 0;
  for (int v = 0; v < vertices; ++v)
    if (touched[v]) ++verts;
  for (int s = 0; s < vertices; ++s) {
    if (!touched[s] || seen[s]) continue;
    ++comps;
    std::vector<int> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
    }
  }
  return verts - comps;
}

}  // namespace

TEST_CASE("uniform rank caps cardinality") {
  Matroid m = Matroid::uniform(4, 2);
  REQUIRE(m.rank(Bits::from_ids(4, {0, 1, 2})) == 2);
  REQUIRE(m.rank(Bits::from_ids(4, {0})) == 1);
  REQUIRE(m.rank_full() == 2);
}

TEST_CASE("partition rank saturates per part") {
  Matroid m = Matroid::partition({{0, 1}, {2, 3}}, {1, 1});
  REQUIRE(m.rank(Bits::from_ids(4, {0, 1})) == 1);
  REQUIRE(m.rank(Bits::from_ids(4, {0, 2})) == 2);
  REQUIRE(m.rank_full() == 2);
}

TEST_CASE("graphic rank of the triangle") {
  Matroid m = Matroid::graphic(3, {{0, 1}, {1, 2}, {0, 2}});
  REQUIRE(m.rank(Bits::full(3)) == 2);
  REQUIRE(m.rank(Bits::from_ids(3, {0, 1})) == 2);
  REQUIRE(m.rank(Bits::from_ids(3, {0})) == 1);
}

TEST_CASE("malformed matroids are rejected at construction") {
  REQUIRE_THROWS_AS(Matroid::partition({{0, 1}, {1, 2}}, {1, 1}), ValidationError);  // overlap
  REQUIRE_THROWS_AS(Matroid::partition({{0, 1}}, {3}), ValidationError);             // quota too big
  REQUIRE_THROWS_AS(Matroid::uniform(3, 4), ValidationError);
  REQUIRE_THROWS_AS(Matroid::graphic(2, {{0, 5}}), ValidationError);
}

TEST_CASE("is_spanning") {
  Matroid u = Matroid::uniform(4, 2);
  REQUIRE(u.is_spanning(Bits::full(4)));
  REQUIRE_FALSE(u.is_spanning(Bits::from_ids(4, {1})));
  Matroid g = Matroid::graphic(3, {{0, 1}, {1, 2}, {0, 2}});
  REQUIRE(g.is_spanning(Bits::from_ids(3, {0, 1})));  // two edges of K3 span
  REQUIRE(g.is_spanning(Bits::full(3)));
  REQUIRE_FALSE(g.is_spanning(Bits::from_ids(3, {2})));
}

TEST_CASE("spanning agrees with exhaustive basis search on small matroids") {
  Rng rng(3);
  std::vector<Matroid> ms;
  ms.push_back(Matroid::uniform(5, 3));
  ms.push_back(Matroid::partition({{0, 2, 4}, {1, 3}}, {2, 1}));
  ms.push_back(Matroid::graphic(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}}));
  for (const Matroid& m : ms) {
    const int n = m.n();
    for (uint32_t smask = 0; smask < (uint32_t{1} << n); ++smask) {
      Bits s = Bits::from_mask(n, smask);
      // brute force: some subset of S of size r* with rank r*
      bool has_basis = false;
      for (uint32_t bmask = 0; bmask <= smask && !has_basis; ++bmask) {
        if ((bmask & smask) != bmask) continue;
        Bits b = Bits::from_mask(n, bmask);
        if (static_cast<int>(b.count()) == m.rank_full() && m.rank(b) == m.rank_full()) has_basis = true;
      }
      REQUIRE(m.is_spanning(s) == has_basis);
    }
  }
}

TEST_CASE("rank axioms hold for all kinds") {
  Rng rng(9);
  Matroid u = Matroid::uniform(5, 3);
  REQUIRE_FALSE(check_rank_axioms(u, 0, rng).has_value());
  Matroid p = Matroid::partition({{0, 1, 2}, {3, 4}}, {2, 1});
  REQUIRE_FALSE(check_rank_axioms(p, 0, rng).has_value());
  // K4, exhaustive (n = 6 edges)
  Matroid g = Matroid::graphic(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  REQUIRE_FALSE(check_rank_axioms(g, 0, rng).has_value());
  // sampled mode on a larger graphic matroid
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < 7; ++i)
    for (int j = i + 1; j < 7; ++j) edges.emplace_back(i, j);
  Matroid big = Matroid::graphic(7, edges);
  REQUIRE_FALSE(check_rank_axioms(big, 10000, rng).has_value());
}

TEST_CASE("graphic rank agrees with an independent DFS oracle on random graphs") {
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const int v = 2 + static_cast<int>(rng.next_below(5));
    const int e = 1 + static_cast<int>(rng.next_below(10));
    std::vector<std::pair<int, int>> edges;
    std::vector<std::pair<int, int>> pool;
    for (int a = 0; a < v; ++a)
      for (int b = a + 1; b < v; ++b) pool.emplace_back(a, b);
    rng.shuffle(pool);
    for (int i = 0; i < e && i < static_cast<int>(pool.size()); ++i) edges.push_back(pool[i]);
    if (edges.empty()) continue;
    Matroid m = Matroid::graphic(v, edges);
    const int n = m.n();
    for (int s = 0; s < 8; ++s) {
      Bits t(n);
      for (int i = 0; i < n; ++i)
        if (rng.bernoulli(0.5)) t.set(i);
      REQUIRE(m.rank(t) == dfs_forest_rank(v, edges, t));
    }
  }
}

TEST_CASE("rank_mask matches rank on member lists") {
  Rng rng(33);
  Matroid g = Matroid::graphic(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}});
  Bits s = Bits::from_ids(5, {0, 2, 3, 4});
  auto members = s.ids();
  for (uint32_t mask = 0; mask < (1u << members.size()); ++mask) {
    Bits t(5);
    for (size_t j = 0; j < members.size(); ++j)
      if (mask & (1u << j)) t.set(members[j]);
    REQUIRE(g.rank_mask(members, mask) == g.rank(t));
  }
}
