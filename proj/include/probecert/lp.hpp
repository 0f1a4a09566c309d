#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "probecert/bits.hpp"
#include "probecert/errors.hpp"
#include "probecert/matroid.hpp"
#include "probecert/ratio.hpp"
#include "probecert/rng.hpp"
#include "probecert/scenario.hpp"

namespace probecert {

// LP point x in [0,1]^{U x [n]}: x(e, t) is the fractional amount of element e
// scheduled in time slot t. Slots are 1-indexed in the formulation and
// 0-indexed here. Feasibility (the set K): entries in [0,1], column sums <= 1.
class FractionalSchedule {
 public:
  FractionalSchedule() = default;
  explicit FractionalSchedule(uint32_t n) : n_(n), x_(static_cast<size_t>(n) * n, 0.0) {}

  static FractionalSchedule from_order(const std::vector<int>& order) {
    FractionalSchedule s(static_cast<uint32_t>(order.size()));
    for (size_t t = 0; t < order.size(); ++t) s.at(order[t], static_cast<int>(t)) = 1.0;
    return s;
  }

  uint32_t n() const { return n_; }
  double operator()(int e, int t) const { return x_[static_cast<size_t>(e) * n_ + t]; }
  double& at(int e, int t) { return x_[static_cast<size_t>(e) * n_ + t]; }
  const std::vector<double>& data() const { return x_; }
  std::vector<double>& data() { return x_; }

  // Sum over slots strictly before 1-indexed time t.
  double cum_before(int e, int t) const {
    double s = 0;
    for (int u = 0; u + 1 < t; ++u) s += (*this)(e, u);
    return s;
  }

  void validate(double tol = 1e-9) const {
    for (double v : x_)
      if (v < -1e-12 || v > 1.0 + tol)
        throw ValidationError("FractionalSchedule: entry " + std::to_string(v) + " outside [0,1]");
    for (uint32_t t = 0; t < n_; ++t) {
      double col = 0;
      for (uint32_t e = 0; e < n_; ++e) col += (*this)(e, t);
      if (col > 1.0 + tol)
        throw ValidationError("FractionalSchedule: slot " + std::to_string(t + 1) + " schedules " +
                              std::to_string(col));
    }
  }

 private:
  uint32_t n_ = 0;
  std::vector<double> x_;
};

// Euclidean projection of one slot vector onto {v in [0,1]^n : sum v <= 1}.
// Clip to the box first; if the sum cap binds, the KKT conditions give
// w = clip(v - theta, 0, 1) with theta > 0 solving sum w = 1, found exactly
// by scanning the 2n breakpoints of the piecewise-linear sum.
inline void project_slot(std::vector<double>& v) {
  double clipped_sum = 0;
  for (double x : v) clipped_sum += std::clamp(x, 0.0, 1.0);
  if (clipped_sum <= 1.0) {
    for (double& x : v) x = std::clamp(x, 0.0, 1.0);
    return;
  }
  std::vector<double> bps;
  bps.reserve(2 * v.size());
  for (double x : v) {
    bps.push_back(x - 1.0);
    bps.push_back(x);
  }
  std::sort(bps.begin(), bps.end());
  auto sum_at = [&](double theta) {
    double s = 0;
    for (double x : v) s += std::clamp(x - theta, 0.0, 1.0);
    return s;
  };
  // sum_at is nonincreasing, piecewise linear, linear between breakpoints
  double lo = bps.front(), hi = bps.back();
  for (double b : bps) {
    if (sum_at(b) >= 1.0)
      lo = std::max(lo, b);
    else
      hi = std::min(hi, b);
  }
  const double slo = sum_at(lo), shi = sum_at(hi);
  const double theta = (slo - shi) < 1e-15 ? lo : lo + (slo - 1.0) * (hi - lo) / (slo - shi);
  for (double& x : v) x = std::clamp(x - theta, 0.0, 1.0);
}

// Projection onto K; the constraint set is a product over time slots, so the
// projection decomposes per slot.
inline FractionalSchedule project_onto_K(const std::vector<double>& z, uint32_t n) {
  if (z.size() != static_cast<size_t>(n) * n) throw DimensionError("project_onto_K: size mismatch");
  FractionalSchedule out(n);
  std::vector<double> col(n);
  for (uint32_t t = 0; t < n; ++t) {
    for (uint32_t e = 0; e < n; ++e) col[e] = z[static_cast<size_t>(e) * n + t];
    project_slot(col);
    for (uint32_t e = 0; e < n; ++e) out.at(e, t) = col[e];
  }
  return out;
}

struct CoverageEntry {
  double u = 0;
  Bits witness;      // the T-hat achieving the max (meaningful only when u > 0)
  int witness_rank = 0;
};

// u_{S,t}(x) = max(0, 1 - min ratio) with the ratio taken at weights
// y_e = x_{e,<t}; also returns the maximizing witness for subgradients.
inline CoverageEntry eval_u(const FractionalSchedule& x, const Matroid& m, const Bits& s, int t) {
  if (x.n() != s.width() || static_cast<int>(x.n()) != m.n())
    throw DimensionError("eval_u: dimension mismatch");
  if (m.rank_full() == 0) return {0.0, Bits(s.width()), 0};
  const auto members = s.ids();
  std::vector<double> y(members.size());
  for (size_t i = 0; i < members.size(); ++i) y[i] = x.cum_before(members[i], t);
  RatioProblem p(m, s, std::move(y));
  RatioSolution sol = min_ratio(p);
  if (sol.ratio >= 1.0) return {0.0, Bits(s.width()), 0};
  return {1.0 - sol.ratio, sol.t_hat, sol.rank_t_hat};
}

namespace detail {

// Shared evaluation core: one RatioProblem per support scenario, reused
// across time slots via set_weights. Weights advance incrementally with t.
class LpEvaluator {
 public:
  LpEvaluator(const ScenarioDistribution& d, const Matroid& m) : dist_(&d), matroid_(&m) {
    if (d.n() != static_cast<uint32_t>(m.n())) throw DimensionError("LpEvaluator: n mismatch");
    for (const auto& [s, p] : d.support()) {
      if (!m.is_spanning(s))
        throw InfeasibleError("LpEvaluator: support scenario " + s.to_string() + " is not spanning");
      problems_.push_back(std::make_unique<RatioProblem>(m, s, std::vector<double>(s.count(), 0.0)));
    }
  }

  // f(x) = sum_t sum_S p_S u_{S,t}(x), exact over the explicit support.
  // When grad != nullptr, accumulates the exact full subgradient as well.
  double objective(const FractionalSchedule& x, std::vector<double>* grad = nullptr) {
    const uint32_t n = x.n();
    if (grad) grad->assign(static_cast<size_t>(n) * n, 0.0);
    double f = 0;
    const auto& support = dist_->support();
    for (size_t i = 0; i < support.size(); ++i)
      f += support[i].second * scenario_cost(x, i, grad, support[i].second);
    return f;
  }

  // sum_t u_{S,t}(x) for support atom i; optionally adds
  // weight * sum_t ∂u_{S,t}(x) into grad.
  double scenario_cost(const FractionalSchedule& x, size_t atom, std::vector<double>* grad = nullptr,
                       double weight = 1.0) {
    const uint32_t n = x.n();
    RatioProblem& p = *problems_[atom];
    const auto& members = p.members();
    std::vector<double> y(members.size(), 0.0);
    double cost = 0;
    for (uint32_t t = 1; t <= n; ++t) {
      if (t > 1)
        for (size_t j = 0; j < members.size(); ++j) y[j] += x(members[j], static_cast<int>(t) - 2);
      p.set_weights(y);
      if (p.rank_full() == 0) break;
      RatioSolution sol = min_ratio(p);
      if (sol.ratio >= 1.0) break;  // u is nonincreasing in t: once covered, stays covered
      cost += 1.0 - sol.ratio;
      if (grad) {
        const double g = -weight / static_cast<double>(p.rank_full() - sol.rank_t_hat);
        for (size_t j = 0; j < members.size(); ++j) {
          if (sol.t_hat_mask & (uint32_t{1} << j)) continue;  // e in T-hat: coefficient 0
          for (uint32_t tp = 0; tp + 1 < t; ++tp) (*grad)[static_cast<size_t>(members[j]) * n + tp] += g;
        }
      }
    }
    return cost;
  }

  size_t support_index(const Bits& s) const {
    const auto& support = dist_->support();
    for (size_t i = 0; i < support.size(); ++i)
      if (support[i].first == s) return i;
    throw InternalError("LpEvaluator: sampled scenario not in support");
  }

  const ScenarioDistribution& dist() const { return *dist_; }
  const Matroid& matroid() const { return *matroid_; }

 private:
  const ScenarioDistribution* dist_;
  const Matroid* matroid_;
  std::vector<std::unique_ptr<RatioProblem>> problems_;
};

}  // namespace detail

// Reusable evaluation context: keeps the per-scenario rank lattices alive
// across many objective/gradient queries on the same instance.
class LpContext {
 public:
  LpContext(const ScenarioDistribution& d, const Matroid& m) : ev_(d, m) {}

  double objective(const FractionalSchedule& x) { return ev_.objective(x); }

  std::vector<double> full_subgradient(const FractionalSchedule& x, double* objective_out = nullptr) {
    std::vector<double> grad;
    const double f = ev_.objective(x, &grad);
    if (objective_out) *objective_out = f;
    return grad;
  }

  std::vector<double> subgradient_estimate(const FractionalSchedule& x, Rng& rng) {
    std::vector<double> grad(static_cast<size_t>(x.n()) * x.n(), 0.0);
    const Bits s = ev_.dist().sample(rng);
    ev_.scenario_cost(x, ev_.support_index(s), &grad, 1.0);
    return grad;
  }

  // sum_t u_{S,t}(x) for one scenario of the support.
  double scenario_cost(const FractionalSchedule& x, const Bits& s) {
    return ev_.scenario_cost(x, ev_.support_index(s));
  }

 private:
  detail::LpEvaluator ev_;
};

// Exact LP objective by full enumeration of support x time.
inline double objective(const FractionalSchedule& x, const ScenarioDistribution& d, const Matroid& m) {
  detail::LpEvaluator ev(d, m);
  return ev.objective(x);
}

// One-sample unbiased subgradient estimate: draw S ~ p, return
// G(x) = sum_t ∂u_{S,t}(x). ||G||_2 <= n^2 always.
inline std::vector<double> subgradient_estimate(const FractionalSchedule& x, const ScenarioDistribution& d,
                                                const Matroid& m, Rng& rng) {
  detail::LpEvaluator ev(d, m);
  std::vector<double> grad(static_cast<size_t>(x.n()) * x.n(), 0.0);
  const Bits s = d.sample(rng);
  ev.scenario_cost(x, ev.support_index(s), &grad, 1.0);
  return grad;
}

// Exact full subgradient sum_S p_S sum_t ∂u_{S,t}(x); also reports f(x).
inline std::vector<double> full_subgradient(const FractionalSchedule& x, const ScenarioDistribution& d,
                                            const Matroid& m, double* objective_out = nullptr) {
  detail::LpEvaluator ev(d, m);
  std::vector<double> grad;
  const double f = ev.objective(x, &grad);
  if (objective_out) *objective_out = f;
  return grad;
}

struct SgdConfig {
  enum class Mode { Sgd, FullGradient };

  Mode mode = Mode::Sgd;
  double epsilon = 0.05;       // target additive accuracy
  long long iterations = 0;    // 0 -> ceil(2 D^2 B^2 / eps^2) with D = sqrt(n), B = n^2
  uint64_t seed = 0;
  int trace_points = 25;       // exact-objective evaluations along the run

  // deterministic mode: geometric step decay, restarting each round from the
  // best iterate seen so far
  int full_rounds = 70;
  int full_iters_per_round = 600;
  int full_start_variant = 0;  // 0: x = 0, 1: uniform spread (for stability checks)
};

struct LpSolution {
  FractionalSchedule x;
  double objective = 0;
  std::vector<std::pair<long long, double>> trace;  // (iteration, exact objective)
};

inline long long sgd_iteration_bound(uint32_t n, double epsilon) {
  const double d2 = n;                                    // D = sqrt(n)
  const double b = static_cast<double>(n) * n;            // B = n^2
  return static_cast<long long>(std::ceil(2.0 * d2 * b * b / (epsilon * epsilon)));
}

// Projected (stochastic) subgradient descent over K.
//
// Sgd mode follows the textbook recipe: step D/(B sqrt(t)) with uniform
// iterate averaging, one sampled-scenario subgradient per step. The returned
// objective is the exact objective of the averaged iterate.
//
// FullGradient mode is the deterministic regression baseline: exact
// subgradients over the whole support, normalized steps with geometric decay
// (the objective is polyhedral, so decaying steps converge fast and two runs
// from different starts agree to high precision on desk-scale instances).
inline LpSolution solve_lp(const ScenarioDistribution& d, const Matroid& m, const SgdConfig& cfg) {
  const uint32_t n = d.n();
  detail::LpEvaluator ev(d, m);
  LpSolution out;

  if (cfg.mode == SgdConfig::Mode::FullGradient) {
    FractionalSchedule x(n);
    if (cfg.full_start_variant == 1)
      for (uint32_t e = 0; e < n; ++e)
        for (uint32_t t = 0; t < n; ++t) x.at(e, t) = 1.0 / n;
    std::vector<double> grad;
    double f = ev.objective(x, &grad);
    FractionalSchedule best_x = x;
    double best_f = f;
    double step = std::sqrt(static_cast<double>(n));
    long long iter = 0;
    std::vector<double> z(static_cast<size_t>(n) * n);
    std::vector<double> round_sum(static_cast<size_t>(n) * n);
    for (int round = 0; round < cfg.full_rounds; ++round) {
      x = best_x;
      f = ev.objective(x, &grad);
      round_sum.assign(round_sum.size(), 0.0);
      for (int i = 0; i < cfg.full_iters_per_round; ++i) {
        double norm = 0;
        for (double g : grad) norm += g * g;
        norm = std::sqrt(norm);
        if (norm < 1e-15) break;
        for (size_t j = 0; j < z.size(); ++j) z[j] = x.data()[j] - step / norm * grad[j];
        x = project_onto_K(z, n);
        x.validate();
        for (size_t j = 0; j < round_sum.size(); ++j) round_sum[j] += x.data()[j];
        f = ev.objective(x, &grad);
        ++iter;
        if (f < best_f) {
          best_f = f;
          best_x = x;
        }
      }
      // the round's averaged iterate often beats every single iterate on
      // polyhedral objectives; keep it if it does
      FractionalSchedule round_avg(n);
      for (size_t j = 0; j < round_sum.size(); ++j)
        round_avg.data()[j] = round_sum[j] / cfg.full_iters_per_round;
      const double favg = ev.objective(round_avg);
      if (favg < best_f) {
        best_f = favg;
        best_x = round_avg;
      }
      out.trace.emplace_back(iter, best_f);
      step *= 0.5;
    }
    out.x = std::move(best_x);
    out.objective = best_f;
    return out;
  }

  // stochastic mode
  const long long total =
      cfg.iterations > 0 ? cfg.iterations : sgd_iteration_bound(n, cfg.epsilon);
  const double diameter = std::sqrt(static_cast<double>(n));
  const double grad_bound = static_cast<double>(n) * n;
  Rng rng(cfg.seed, /*stream=*/17);
  FractionalSchedule x(n);
  std::vector<double> avg(static_cast<size_t>(n) * n, 0.0);
  std::vector<double> grad(static_cast<size_t>(n) * n);
  std::vector<double> z(static_cast<size_t>(n) * n);
  const long long stride = std::max<long long>(1, total / std::max(1, cfg.trace_points));
  for (long long it = 1; it <= total; ++it) {
    grad.assign(grad.size(), 0.0);
    const Bits s = d.sample(rng);
    ev.scenario_cost(x, ev.support_index(s), &grad, 1.0);
    const double eta = diameter / (grad_bound * std::sqrt(static_cast<double>(it)));
    for (size_t j = 0; j < z.size(); ++j) z[j] = x.data()[j] - eta * grad[j];
    x = project_onto_K(z, n);
    x.validate();
    for (size_t j = 0; j < avg.size(); ++j) avg[j] += x.data()[j];
    if (it % stride == 0 || it == total) {
      FractionalSchedule xbar(n);
      for (size_t j = 0; j < avg.size(); ++j) xbar.data()[j] = avg[j] / static_cast<double>(it);
      out.trace.emplace_back(it, ev.objective(xbar));
    }
  }
  FractionalSchedule xbar(n);
  for (size_t j = 0; j < avg.size(); ++j) xbar.data()[j] = avg[j] / static_cast<double>(total);
  xbar.validate();
  out.x = std::move(xbar);
  out.objective = ev.objective(out.x);
  return out;
}

}  // namespace probecert
