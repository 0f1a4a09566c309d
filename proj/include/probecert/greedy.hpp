#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "probecert/bits.hpp"
#include "probecert/errors.hpp"
#include "probecert/rng.hpp"
#include "probecert/scenario.hpp"

namespace probecert {

// Trace of a probe order on a 1-of-n instance. With the order relabeled
// X_1..X_n: q_j = Pr(X_j active, X_1..X_{j-1} inactive), c_j the conditional
// version, r_j = Pr(X_1..X_{j-1} all inactive). residual_end is the mass
// never covered by the order (zero on feasible instances).
struct GreedyTrace {
  std::vector<int> order;
  std::vector<double> q, c, r;
  double residual_end = 0;

  void check_identities(double tol = 1e-9) const {
    if (!(std::abs(r[0] - 1.0) <= tol)) throw InternalError("trace: r_1 != 1");
    for (size_t j = 0; j < order.size(); ++j) {
      if (std::abs(q[j] - c[j] * r[j]) > tol) throw InternalError("trace: q_j != c_j r_j");
      const double next = j + 1 < order.size() ? r[j + 1] : residual_end;
      if (std::abs(next - (r[j] - q[j])) > tol) throw InternalError("trace: r_{j+1} != r_j - q_j");
      if (next > r[j] + tol) throw InternalError("trace: r increasing");
    }
  }
};

namespace detail {

// Exact single-pass trace of an arbitrary probe order over the explicit
// support. mass[i] tracks which atoms are still uncovered.
inline GreedyTrace trace_order(const std::vector<int>& order, const ScenarioDistribution& d) {
  const auto& support = d.support();
  GreedyTrace tr;
  tr.order = order;
  const size_t n = order.size();
  tr.q.resize(n);
  tr.c.resize(n);
  tr.r.resize(n);
  std::vector<char> alive(support.size(), 1);
  double remaining = 1.0;
  for (size_t j = 0; j < n; ++j) {
    const int e = order[j];
    double hit = 0;
    for (size_t i = 0; i < support.size(); ++i)
      if (alive[i] && support[i].first.test(e)) hit += support[i].second;
    tr.r[j] = remaining;
    tr.q[j] = hit;
    tr.c[j] = remaining > 0 ? hit / remaining : 0.0;
    for (size_t i = 0; i < support.size(); ++i)
      if (alive[i] && support[i].first.test(e)) alive[i] = 0;
    remaining -= hit;
  }
  tr.residual_end = std::max(0.0, remaining);
  return tr;
}

}  // namespace detail

// The updated (conditional) greedy for 1-of-n: probe the element with the
// highest probability of being active conditioned on everything probed so far
// being inactive. Ties break toward the smallest element id. Marginals are
// exact sums over the explicit support.
inline GreedyTrace conditional_greedy(const ScenarioDistribution& d) {
  const auto& support = d.support();
  for (const auto& [s, p] : support)
    if (s.none())
      throw InfeasibleError("conditional_greedy: empty scenario in support cannot be certified");
  const int n = static_cast<int>(d.n());
  std::vector<char> alive(support.size(), 1);
  std::vector<char> probed(n, 0);
  std::vector<int> order;
  order.reserve(n);
  for (int j = 0; j < n; ++j) {
    int best = -1;
    double best_mass = -1;
    for (int e = 0; e < n; ++e) {
      if (probed[e]) continue;
      double mass = 0;
      for (size_t i = 0; i < support.size(); ++i)
        if (alive[i] && support[i].first.test(e)) mass += support[i].second;
      if (mass > best_mass + 1e-15) {
        best_mass = mass;
        best = e;
      }
    }
    probed[best] = 1;
    order.push_back(best);
    for (size_t i = 0; i < support.size(); ++i)
      if (alive[i] && support[i].first.test(best)) alive[i] = 0;
  }
  GreedyTrace tr = detail::trace_order(order, d);
  tr.check_identities();
  return tr;
}

// Expected number of probes of a traced order: sum_j r_j, with mass never
// covered paying for all n slots.
inline double trace_cost(const GreedyTrace& tr) {
  double cost = 0;
  for (double r : tr.r) cost += r;
  return cost;
}

// trace_cost plus the cost identities sum_j j q_j = sum_j r_j = sum_j q_j/c_j
// (q_j = 0 terms skipped). The q/c identity needs every zero-progress step to
// carry zero residual mass, which holds for greedy traces on feasible
// instances but not for arbitrary orders with dead probes.
inline double greedy_cost(const GreedyTrace& tr, double tol = 1e-9) {
  tr.check_identities(tol);
  const size_t n = tr.order.size();
  double by_jq = 0, by_qc = 0, dead_mass = tr.residual_end;
  for (size_t j = 0; j < n; ++j) {
    by_jq += static_cast<double>(j + 1) * tr.q[j];
    if (tr.q[j] > 0)
      by_qc += tr.q[j] / tr.c[j];
    else
      dead_mass = std::max(dead_mass, tr.r[j]);
  }
  by_jq += static_cast<double>(n) * tr.residual_end;
  const double by_r = trace_cost(tr);
  if (std::abs(by_jq - by_r) > tol) throw InternalError("greedy_cost: sum j q_j != sum r_j");
  if (dead_mass <= tol && std::abs(by_qc - by_r) > tol)
    throw InternalError("greedy_cost: sum q_j/c_j != sum r_j");
  return by_r;
}

struct CncpViolation {
  Bits event_active, event_inactive;  // the conditioning assignment E
  Bits a, b;                          // Pr(A, not-B | E) < Pr(A|E) Pr(not-B|E)
  double lhs = 0, rhs = 0;
};

// Exhaustive check of the conditional negative cylinder property: for every
// conditioning assignment E with positive probability and disjoint A, B
// outside E's variables, Pr(A active, B inactive | E) >= Pr(A|E) Pr(B-bar|E).
// Returns the first violating triple, or nullopt if the property holds.
inline std::optional<CncpViolation> check_cncp(const ScenarioDistribution& d, double tol = 1e-9) {
  const int n = static_cast<int>(d.n());
  if (n > 12) throw CapacityError("check_cncp: exhaustive mode limited to n <= 12");
  const auto& support = d.support();
  auto cylinder = [&](uint64_t ones, uint64_t zeros) {
    double p = 0;
    for (const auto& [s, ps] : support) {
      const uint64_t w = s.low_word();
      if ((w & ones) == ones && (w & zeros) == 0) p += ps;
    }
    return p;
  };
  const uint64_t full = (n == 64) ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
  for (uint64_t cond = 0; cond <= full; ++cond) {
    // assignment on the conditioned set: v ranges over subsets of cond
    for (uint64_t v = cond;; v = (v - 1) & cond) {
      const uint64_t e1 = v, e0 = cond & ~v;
      const double pe = cylinder(e1, e0);
      if (pe > 0) {
        const uint64_t rest = full & ~cond;
        for (uint64_t a = rest; a; a = (a - 1) & rest) {
          const uint64_t rem = rest & ~a;
          for (uint64_t b = rem; b; b = (b - 1) & rem) {
            const double lhs = cylinder(e1 | a, e0 | b) / pe;
            const double rhs = (cylinder(e1 | a, e0) / pe) * (cylinder(e1, e0 | b) / pe);
            if (lhs < rhs - tol) {
              CncpViolation w;
              w.event_active = Bits::from_mask(n, e1);
              w.event_inactive = Bits::from_mask(n, e0);
              w.a = Bits::from_mask(n, a);
              w.b = Bits::from_mask(n, b);
              w.lhs = lhs;
              w.rhs = rhs;
              return w;
            }
          }
        }
      }
      if (v == 0) break;
    }
  }
  return std::nullopt;
}

// Trace of an arbitrary order plus the proxy diagnostics of the 2-approx
// analysis: d*_t = min_{s<=t} c*_s and proxy cost sum_t q*_t / d*_t.
struct OptTrace {
  GreedyTrace trace;
  std::vector<double> dstar;
  double cost = 0;
  double proxy = 0;
};

inline OptTrace proxy_opt_diagnostics(const std::vector<int>& order, const ScenarioDistribution& d) {
  OptTrace out;
  out.trace = detail::trace_order(order, d);
  const size_t n = order.size();
  out.dstar.resize(n);
  double running = std::numeric_limits<double>::infinity();
  for (size_t t = 0; t < n; ++t) {
    running = std::min(running, out.trace.c[t]);
    out.dstar[t] = running;
  }
  out.trace.check_identities();
  out.cost = trace_cost(out.trace);
  for (size_t t = 0; t < n; ++t) {
    if (out.trace.q[t] <= 0) continue;
    if (out.dstar[t] <= 0) {
      out.proxy = std::numeric_limits<double>::infinity();
      return out;
    }
    out.proxy += out.trace.q[t] / out.dstar[t];
  }
  return out;
}

// Exact minimum expected cover time over all n! probe orders (ties toward the
// lexicographically smallest permutation). Oracle for approximation tests.
inline std::pair<std::vector<int>, double> brute_force_opt_order(const ScenarioDistribution& d) {
  const int n = static_cast<int>(d.n());
  if (n > 8) throw CapacityError("brute_force_opt_order: n <= 8 required");
  const auto& support = d.support();
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::vector<int> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0;
    for (const auto& [s, p] : support) {
      int cover = n;
      for (int t = 0; t < n; ++t)
        if (s.test(perm[t])) {
          cover = t + 1;
          break;
        }
      cost += p * cover;
    }
    if (cost < best_cost - 1e-12) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best, best_cost};
}

// Expected probes of a fixed order under the k-of-n SBFE stopping rule:
// stop as soon as k active elements or n-k+1 inactive elements are seen
// (certifying |S| < k means exhibiting n-k+1 inactive elements).
inline double sbfe_order_cost(const std::vector<int>& order, const ScenarioDistribution& d, int k) {
  const int n = static_cast<int>(d.n());
  if (static_cast<int>(order.size()) != n) throw PreconditionError("sbfe_order_cost: order must cover U");
  if (k < 1 || k > n) throw PreconditionError("sbfe_order_cost: 1 <= k <= n required");
  double cost = 0;
  for (const auto& [s, p] : d.support()) {
    int active = 0, inactive = 0, probes = n;
    for (int t = 0; t < n; ++t) {
      if (s.test(order[t]))
        ++active;
      else
        ++inactive;
      if (active >= k || inactive >= n - k + 1) {
        probes = t + 1;
        break;
      }
    }
    cost += p * probes;
  }
  return cost;
}

}  // namespace probecert
