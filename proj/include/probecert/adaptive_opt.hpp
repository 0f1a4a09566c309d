#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "probecert/errors.hpp"
#include "probecert/graph_probe.hpp"
#include "probecert/hypergraph_probe.hpp"

namespace probecert {

// Exact minimum expected number of probes over all adaptive policies, by
// memoized search on belief states. A state records each observed variable as
// unprobed / probed-0 / probed-1 (2 bits each); the posterior weight of a
// state is the exact probability of its probed outcomes, summed over the
// latent assignments of the variables its probed set touches (everything
// else marginalizes out). Terminal states have k active probes or nothing
// left to probe.
class AdaptiveOptimum {
 public:
  static constexpr int kMaxObserved = 10;
  static constexpr int kMaxLatents = 12;

  AdaptiveOptimum(std::vector<double> latent_probs, std::vector<std::vector<int>> neighborhoods, int k)
      : p_(std::move(latent_probs)), nb_(std::move(neighborhoods)), k_(k) {
    if (static_cast<int>(nb_.size()) > kMaxObserved)
      throw CapacityError("AdaptiveOptimum: at most " + std::to_string(kMaxObserved) + " observed variables");
    if (static_cast<int>(p_.size()) > kMaxLatents)
      throw CapacityError("AdaptiveOptimum: at most " + std::to_string(kMaxLatents) + " latent variables");
    if (k < 0) throw ValidationError("AdaptiveOptimum: k >= 0 required");
  }

  double value() { return best(0); }

 private:
  // state encoding: 2 bits per observed variable, 0 unprobed / 1 probed-0 / 2 probed-1
  static int code(uint64_t state, int i) { return static_cast<int>((state >> (2 * i)) & 3); }
  static uint64_t with(uint64_t state, int i, int outcome) {
    return state | (static_cast<uint64_t>(outcome ? 2 : 1) << (2 * i));
  }

  double weight(uint64_t state) {
    auto it = weight_memo_.find(state);
    if (it != weight_memo_.end()) return it->second;
    uint64_t touched = 0;
    for (size_t i = 0; i < nb_.size(); ++i)
      if (code(state, static_cast<int>(i)) != 0)
        for (int j : nb_[i]) touched |= uint64_t{1} << j;
    std::vector<int> vars;
    for (int j = 0; j < static_cast<int>(p_.size()); ++j)
      if ((touched >> j) & 1) vars.push_back(j);
    double total = 0;
    for (uint64_t a = 0; a < (uint64_t{1} << vars.size()); ++a) {
      double pr = 1;
      uint64_t active = 0;
      for (size_t t = 0; t < vars.size(); ++t) {
        if ((a >> t) & 1) {
          pr *= p_[vars[t]];
          active |= uint64_t{1} << vars[t];
        } else {
          pr *= 1 - p_[vars[t]];
        }
      }
      if (pr == 0) continue;
      bool ok = true;
      for (size_t i = 0; i < nb_.size() && ok; ++i) {
        const int c = code(state, static_cast<int>(i));
        if (c == 0) continue;
        int x = 0;
        for (int j : nb_[i])
          if ((active >> j) & 1) {
            x = 1;
            break;
          }
        if (x != (c == 2 ? 1 : 0)) ok = false;
      }
      if (ok) total += pr;
    }
    weight_memo_.emplace(state, total);
    return total;
  }

  double best(uint64_t state) {
    auto it = value_memo_.find(state);
    if (it != value_memo_.end()) return it->second;
    int actives = 0, unprobed = 0;
    for (size_t i = 0; i < nb_.size(); ++i) {
      const int c = code(state, static_cast<int>(i));
      if (c == 2) ++actives;
      if (c == 0) ++unprobed;
    }
    double v = 0;
    if (actives < k_ && unprobed > 0) {
      const double w = weight(state);
      if (w <= 0) throw InternalError("AdaptiveOptimum: zero-weight state reached");
      v = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < nb_.size(); ++i) {
        if (code(state, static_cast<int>(i)) != 0) continue;
        const uint64_t s1 = with(state, static_cast<int>(i), 1);
        const uint64_t s0 = with(state, static_cast<int>(i), 0);
        const double w1 = weight(s1);
        const double w0 = w - w1;  // weights of the two children partition the parent
        double cand = 1.0;
        if (w1 > 1e-15) cand += (w1 / w) * best(s1);
        if (w0 > 1e-15) cand += (w0 / w) * best(s0);
        v = std::min(v, cand);
      }
    }
    value_memo_.emplace(state, v);
    return v;
  }

  std::vector<double> p_;
  std::vector<std::vector<int>> nb_;
  int k_;
  std::unordered_map<uint64_t, double> weight_memo_;
  std::unordered_map<uint64_t, double> value_memo_;
};

inline double exact_adaptive_opt(const ProbeHypergraph& h, int k) {
  return AdaptiveOptimum(h.latent_prob, h.observed, k).value();
}

inline double exact_adaptive_opt(const ProbeGraph& g, int k) {
  return exact_adaptive_opt(ProbeHypergraph::from_graph(g), k);
}

}  // namespace probecert
