#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "probecert/bits.hpp"
#include "probecert/errors.hpp"
#include "probecert/lp.hpp"
#include "probecert/matroid.hpp"
#include "probecert/rng.hpp"
#include "probecert/scenario.hpp"

namespace probecert {

// Probe order produced by rounding. `probes` covers a subset of U in probe
// order; epoch_end[i] = (epoch index sigma, probe count at its end).
struct RoundedOrder {
  std::vector<int> probes;
  std::vector<std::pair<int, int>> epoch_end;
};

// Epoch rounding of a feasible LP point: in epoch sigma = 1..ceil(log2 n),
// every still-unprobed element is probed independently with probability
// min(1, alpha * sum_{t <= 2^sigma} x_{e,t}), elements visited in id order.
inline RoundedOrder randomized_rounding(const FractionalSchedule& x, double alpha, Rng& rng) {
  if (alpha < 1.0) throw PreconditionError("randomized_rounding: alpha >= 1 required");
  x.validate();
  const int n = static_cast<int>(x.n());
  const int epochs = std::max(1, static_cast<int>(std::ceil(std::log2(std::max(1, n)))));
  RoundedOrder out;
  std::vector<char> probed(n, 0);
  for (int sigma = 1; sigma <= epochs; ++sigma) {
    const int horizon = std::min<long long>(n, 1LL << sigma);
    for (int e = 0; e < n; ++e) {
      if (probed[e]) continue;
      double mass = 0;
      for (int t = 0; t < horizon; ++t) mass += x(e, t);
      if (rng.next_unit() < std::min(1.0, alpha * mass)) {
        probed[e] = 1;
        out.probes.push_back(e);
      }
    }
    out.epoch_end.emplace_back(sigma, static_cast<int>(out.probes.size()));
  }
  return out;
}

// Complete a partial probe order to a full permutation of U, appending the
// never-probed elements in id order (the cost model needs a full order).
inline std::vector<int> complete_order(const RoundedOrder& order, int n) {
  std::vector<int> full = order.probes;
  std::vector<char> seen(n, 0);
  for (int e : full) seen[e] = 1;
  for (int e = 0; e < n; ++e)
    if (!seen[e]) full.push_back(e);
  return full;
}

// Exact expected certification time of a full probe order: for each support
// scenario, the first prefix whose active elements span the matroid.
inline double order_cost(const std::vector<int>& order, const ScenarioDistribution& d, const Matroid& m) {
  const int n = m.n();
  if (static_cast<int>(order.size()) != n) throw PreconditionError("order_cost: order must cover U");
  double cost = 0;
  for (const auto& [s, p] : d.support()) {
    if (!m.is_spanning(s))
      throw InfeasibleError("order_cost: support scenario " + s.to_string() + " is not spanning");
    Bits probed_active(s.width());
    int cover = n;
    for (int t = 0; t < n; ++t) {
      if (s.test(order[t])) probed_active.set(order[t]);
      if (m.rank(probed_active) == m.rank_full()) {
        cover = t + 1;
        break;
      }
    }
    cost += p * cover;
  }
  return cost;
}

struct SamplingCheckResult {
  double mean_rank = 0;
  double stddev = 0;
  long trials = 0;
  double lower_bound = 0;  // (1 - e^{-beta}) r(S)
};

// Monte-Carlo check of the matroid sampling guarantee: include each e in S
// independently with probability min(1, beta * y_e) and average the rank.
// Precondition (checked exhaustively): the scaled point (r(S)/y(S)) y lies in
// the base polymatroid of M restricted to S.
inline SamplingCheckResult matroid_sampling_check(const Matroid& m, const Bits& s,
                                                  const std::vector<double>& y, double beta, long trials,
                                                  Rng& rng) {
  if (beta < 1.0) throw PreconditionError("matroid_sampling_check: beta >= 1 required");
  const auto members = s.ids();
  const int sz = static_cast<int>(members.size());
  if (sz > 16) throw CapacityError("matroid_sampling_check: |S| <= 16 required for up-hull verification");
  if (static_cast<int>(y.size()) != sz) throw DimensionError("matroid_sampling_check: y size mismatch");
  const int rS = m.rank(s);
  double yS = 0;
  for (double v : y) {
    if (!(v >= 0)) throw PreconditionError("matroid_sampling_check: y must be nonnegative");
    yS += v;
  }
  if (yS <= 0) throw PreconditionError("matroid_sampling_check: y(S) > 0 required");
  const double scale = static_cast<double>(rS) / yS;
  for (uint32_t mask = 1; mask < (uint32_t{1} << sz); ++mask) {
    double zT = 0;
    for (uint32_t mm = mask; mm; mm &= mm - 1) zT += scale * y[std::countr_zero(mm)];
    if (zT > m.rank_mask(members, mask) + 1e-9)
      throw PreconditionError("matroid_sampling_check: scaled point leaves the base polymatroid at T = " +
                              std::to_string(mask));
  }

  double sum = 0, sumsq = 0;
  Bits sample(s.width());
  for (long i = 0; i < trials; ++i) {
    for (int j = 0; j < sz; ++j) sample.set(members[j], rng.next_unit() < std::min(1.0, beta * y[j]));
    const double r = m.rank(sample);
    sum += r;
    sumsq += r * r;
  }
  SamplingCheckResult out;
  out.trials = trials;
  out.mean_rank = sum / trials;
  const double var = std::max(0.0, (sumsq - sum * sum / trials) / std::max<long>(1, trials - 1));
  out.stddev = std::sqrt(var);
  out.lower_bound = (1.0 - std::exp(-beta)) * rS;
  return out;
}

// Exact E[rank] of the same sampling experiment by enumerating all 2^|S|
// outcomes (test oracle for the Monte-Carlo path).
inline double exact_sampling_expectation(const Matroid& m, const Bits& s, const std::vector<double>& y,
                                         double beta) {
  const auto members = s.ids();
  const int sz = static_cast<int>(members.size());
  if (sz > 20) throw CapacityError("exact_sampling_expectation: |S| <= 20 required");
  std::vector<double> q(sz);
  for (int j = 0; j < sz; ++j) q[j] = std::min(1.0, beta * y[j]);
  double expect = 0;
  for (uint32_t mask = 0; mask < (uint32_t{1} << sz); ++mask) {
    double p = 1;
    for (int j = 0; j < sz; ++j) p *= (mask >> j) & 1 ? q[j] : 1 - q[j];
    if (p > 0) expect += p * m.rank_mask(members, mask);
  }
  return expect;
}

// Alpha-point rounding for the k-uniform path: element e fires at the first
// slot where its cumulative fractional mass reaches alpha_e * theta for
// alpha_e uniform in (0,1]; the order sorts by firing slot (ties by the exact
// crossing position within the slot, then by id). Elements that never fire
// are appended in id order.
inline RoundedOrder round_k_uniform(const FractionalSchedule& x, double theta, Rng& rng) {
  x.validate();
  const int n = static_cast<int>(x.n());
  struct Fire {
    double time;
    int element;
  };
  std::vector<Fire> fired;
  std::vector<int> never;
  for (int e = 0; e < n; ++e) {
    const double need = rng.next_unit_open_zero() * theta;
    double cum = 0;
    bool hit = false;
    for (int t = 0; t < n; ++t) {
      const double prev = cum;
      cum += x(e, t);
      if (cum >= need - 1e-15) {
        // fractional position of the crossing inside slot t
        const double frac = x(e, t) > 0 ? (need - prev) / x(e, t) : 0.0;
        fired.push_back({t + std::clamp(frac, 0.0, 1.0), e});
        hit = true;
        break;
      }
    }
    if (!hit) never.push_back(e);
  }
  std::sort(fired.begin(), fired.end(), [](const Fire& a, const Fire& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.element < b.element;
  });
  RoundedOrder out;
  for (const Fire& f : fired) out.probes.push_back(f.element);
  out.epoch_end.emplace_back(1, static_cast<int>(out.probes.size()));
  for (int e : never) out.probes.push_back(e);
  return out;
}

// Per-scenario fractional cost sum_t u_{S,t}(x) of an LP point.
inline double scenario_lp_cost(const FractionalSchedule& x, const Matroid& m, const Bits& s) {
  detail::LpEvaluator ev(ScenarioDistribution::point_mass(s), m);
  return ev.scenario_cost(x, 0);
}

// Cover time of one scenario under a full probe order.
inline int scenario_cover_time(const std::vector<int>& order, const Matroid& m, const Bits& s) {
  Bits probed_active(s.width());
  for (size_t t = 0; t < order.size(); ++t) {
    if (s.test(order[t])) probed_active.set(order[t]);
    if (m.rank(probed_active) == m.rank_full()) return static_cast<int>(t) + 1;
  }
  return static_cast<int>(order.size());
}

}  // namespace probecert
