#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "probecert/bits.hpp"
#include "probecert/errors.hpp"
#include "probecert/matroid.hpp"

namespace probecert {

// min_{T ⊆ S, r(T) < r(S)} (y(S) - y(T)) / (r(S) - r(T)) for a spanning set S
// and nonnegative weights y on its members. This is the engine behind the LP
// coverage values u_{S,t} and their subgradient witnesses.
//
// The submodular minimizations of h_lambda run exhaustively over the 2^|S|
// subset lattice, which is exact at desk scale (|S| <= 22). Rank values over
// the lattice are precomputed once per problem; subset weight sums get a
// table as well when |S| <= 16 and are otherwise accumulated per mask.
class RatioProblem {
 public:
  static constexpr int kExhaustiveCap = 22;
  static constexpr int kWeightTableCap = 16;

  RatioProblem(const Matroid& m, const Bits& spanning_set, std::vector<double> weights)
      : matroid_(&m), scenario_(spanning_set), members_(spanning_set.ids()), y_(std::move(weights)) {
    const int sz = static_cast<int>(members_.size());
    if (sz > kExhaustiveCap)
      throw CapacityError("RatioProblem: |S| = " + std::to_string(sz) + " above exhaustive cap");
    if (!m.is_spanning(spanning_set)) throw PreconditionError("RatioProblem: S must be spanning");
    if (static_cast<int>(y_.size()) != sz)
      throw DimensionError("RatioProblem: weight vector must align with S's members");
    for (double w : y_)
      if (!(w >= 0)) throw ValidationError("RatioProblem: weights must be nonnegative");
    rank_.resize(size_t{1} << sz);
    for (uint32_t mask = 0; mask < rank_.size(); ++mask)
      rank_[mask] = static_cast<uint8_t>(m.rank_mask(members_, mask));
    rebuild_weight_table();
  }

  int size() const { return static_cast<int>(members_.size()); }
  const std::vector<int>& members() const { return members_; }
  const Bits& scenario() const { return scenario_; }
  const Matroid& matroid() const { return *matroid_; }
  int rank_full() const { return rank_[rank_.size() - 1]; }
  int rank_of(uint32_t mask) const { return rank_[mask]; }
  const std::vector<double>& weights() const { return y_; }

  // Swap in new weights without recomputing the rank lattice (the LP
  // evaluates the same scenario across all time slots).
  void set_weights(std::vector<double> weights) {
    if (weights.size() != y_.size()) throw DimensionError("RatioProblem::set_weights: size mismatch");
    for (double w : weights)
      if (!(w >= 0)) throw ValidationError("RatioProblem::set_weights: weights must be nonnegative");
    y_ = std::move(weights);
    rebuild_weight_table();
  }

  double total_weight() const { return total_weight_; }

  double weight_of(uint32_t mask) const {
    if (!ysum_.empty()) return ysum_[mask];
    double s = 0;
    for (uint32_t m = mask; m; m &= m - 1) s += y_[std::countr_zero(m)];
    return s;
  }

  Bits mask_to_bits(uint32_t mask) const {
    Bits b(scenario_.width());
    for (uint32_t m = mask; m; m &= m - 1) b.set(static_cast<uint32_t>(members_[std::countr_zero(m)]));
    return b;
  }

 private:
  void rebuild_weight_table() {
    const int sz = size();
    total_weight_ = 0;
    for (double w : y_) total_weight_ += w;
    if (sz > kWeightTableCap) {
      ysum_.clear();
      return;
    }
    ysum_.resize(size_t{1} << sz);
    ysum_[0] = 0;
    for (uint32_t mask = 1; mask < ysum_.size(); ++mask)
      ysum_[mask] = ysum_[mask & (mask - 1)] + y_[std::countr_zero(mask)];
  }

  const Matroid* matroid_;
  Bits scenario_;
  std::vector<int> members_;
  std::vector<double> y_;
  std::vector<uint8_t> rank_;
  std::vector<double> ysum_;
  double total_weight_ = 0;
};

struct HMinResult {
  uint32_t mask = 0;
  double value = 0;
};

// argmin_{T ⊆ S} h_lambda(T) with h_lambda(T) = (y(S) - y(T)) - lambda (r(S) - r(T)).
// Ties break toward the numerically smallest mask (lexicographically smallest
// bit vector), so results are reproducible.
inline HMinResult minimize_h_lambda(const RatioProblem& p, double lambda) {
  const uint32_t full = (uint32_t{1} << p.size()) - 1;
  const double yS = p.total_weight();
  const int rS = p.rank_full();
  HMinResult best{0, yS - lambda * rS};  // T = empty set
  for (uint32_t mask = 1; mask <= full; ++mask) {
    const double h = (yS - p.weight_of(mask)) - lambda * (rS - p.rank_of(mask));
    if (h < best.value) best = {mask, h};
  }
  return best;
}

struct RatioSolution {
  Bits t_hat;
  uint32_t t_hat_mask = 0;
  double ratio = 0;
  int rank_t_hat = 0;
  int dinkelbach_iterations = 0;
};

// Dinkelbach search for the constrained minimum ratio: start from the T = ∅
// candidate lambda_0 = y(S)/r(S) and repeatedly re-anchor lambda at the ratio
// of the current h_lambda minimizer until the minimum of h_lambda is ~0.
// Candidates are only accepted with r(T) < r(S); since y >= 0 forces
// h_lambda(T) >= 0 whenever r(T) = r(S), a strictly negative minimizer always
// qualifies, and a rank-saturated minimizer triggers a constrained rescan.
inline RatioSolution min_ratio(const RatioProblem& p) {
  constexpr double kTol = 1e-9;
  const int rS = p.rank_full();
  if (rS < 1) throw PreconditionError("min_ratio: r(S) >= 1 required");
  const double yS = p.total_weight();

  uint32_t best_mask = 0;
  double lambda = yS / rS;
  int iters = 0;
  const int max_iters = p.size() + 2;
  while (true) {
    if (++iters > max_iters)
      throw InternalError("min_ratio: Dinkelbach failed to terminate in |S|+2 iterations");
    HMinResult h = minimize_h_lambda(p, lambda);
    if (h.value >= -kTol) break;
    if (p.rank_of(h.mask) == rS) {
      // constrained rescan over r(T) < r(S)
      const uint32_t full = (uint32_t{1} << p.size()) - 1;
      HMinResult c{0, yS - lambda * rS};
      for (uint32_t mask = 1; mask <= full; ++mask) {
        if (p.rank_of(mask) == rS) continue;
        const double v = (yS - p.weight_of(mask)) - lambda * (rS - p.rank_of(mask));
        if (v < c.value) c = {mask, v};
      }
      if (c.value >= -kTol) break;
      h = c;
    }
    best_mask = h.mask;
    lambda = (yS - p.weight_of(h.mask)) / (rS - p.rank_of(h.mask));
  }

  RatioSolution sol;
  sol.t_hat_mask = best_mask;
  sol.t_hat = p.mask_to_bits(best_mask);
  sol.rank_t_hat = p.rank_of(best_mask);
  sol.ratio = lambda;
  sol.dinkelbach_iterations = iters;
  return sol;
}

}  // namespace probecert
