#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "probecert/errors.hpp"

namespace probecert {

// Fixed-width bit vector over element ids 0..n-1. Scenarios, matroid subsets
// and conditioning events all use this type. Widths up to 64 stay in a single
// inline word (the core path); wider sets up to 1024 spill into extra words.
class Bits {
 public:
  static constexpr uint32_t kMaxWidth = 1024;

  Bits() = default;

  explicit Bits(uint32_t n) : n_(n) {
    if (n > kMaxWidth) throw CapacityError("Bits: width " + std::to_string(n) + " exceeds 1024");
    if (n > 64) ext_.assign((n + 63) / 64 - 1, 0);
  }

  static Bits from_mask(uint32_t n, uint64_t mask) {
    if (n > 64) throw CapacityError("Bits::from_mask requires n <= 64");
    Bits b(n);
    b.w0_ = (n == 64) ? mask : (mask & ((uint64_t{1} << n) - 1));
    return b;
  }

  static Bits from_ids(uint32_t n, std::initializer_list<int> ids) {
    Bits b(n);
    for (int i : ids) b.set(static_cast<uint32_t>(i));
    return b;
  }

  static Bits from_ids(uint32_t n, const std::vector<int>& ids) {
    Bits b(n);
    for (int i : ids) b.set(static_cast<uint32_t>(i));
    return b;
  }

  static Bits full(uint32_t n) {
    Bits b(n);
    for (uint32_t i = 0; i < n; ++i) b.set(i);
    return b;
  }

  uint32_t width() const { return n_; }

  bool test(uint32_t i) const {
    check_index(i);
    return (word(i >> 6) >> (i & 63)) & 1;
  }

  void set(uint32_t i, bool v = true) {
    check_index(i);
    uint64_t& w = word_ref(i >> 6);
    if (v)
      w |= uint64_t{1} << (i & 63);
    else
      w &= ~(uint64_t{1} << (i & 63));
  }

  void reset(uint32_t i) { set(i, false); }

  uint32_t count() const {
    uint32_t c = std::popcount(w0_);
    for (uint64_t w : ext_) c += std::popcount(w);
    return c;
  }

  bool none() const {
    if (w0_) return false;
    for (uint64_t w : ext_)
      if (w) return false;
    return true;
  }

  bool any() const { return !none(); }

  bool subset_of(const Bits& o) const {
    check_width(o);
    if (w0_ & ~o.w0_) return false;
    for (size_t i = 0; i < ext_.size(); ++i)
      if (ext_[i] & ~o.ext_[i]) return false;
    return true;
  }

  bool intersects(const Bits& o) const {
    check_width(o);
    if (w0_ & o.w0_) return true;
    for (size_t i = 0; i < ext_.size(); ++i)
      if (ext_[i] & o.ext_[i]) return true;
    return false;
  }

  Bits operator&(const Bits& o) const {
    check_width(o);
    Bits r(n_);
    r.w0_ = w0_ & o.w0_;
    for (size_t i = 0; i < ext_.size(); ++i) r.ext_[i] = ext_[i] & o.ext_[i];
    return r;
  }

  Bits operator|(const Bits& o) const {
    check_width(o);
    Bits r(n_);
    r.w0_ = w0_ | o.w0_;
    for (size_t i = 0; i < ext_.size(); ++i) r.ext_[i] = ext_[i] | o.ext_[i];
    return r;
  }

  // Set difference: bits in *this and not in o.
  Bits and_not(const Bits& o) const {
    check_width(o);
    Bits r(n_);
    r.w0_ = w0_ & ~o.w0_;
    for (size_t i = 0; i < ext_.size(); ++i) r.ext_[i] = ext_[i] & ~o.ext_[i];
    return r;
  }

  bool operator==(const Bits& o) const {
    return n_ == o.n_ && w0_ == o.w0_ && ext_ == o.ext_;
  }
  bool operator!=(const Bits& o) const { return !(*this == o); }

  // Order by value as a little-endian integer; used for deterministic
  // tie-breaking ("lexicographically smallest bit vector").
  bool operator<(const Bits& o) const {
    for (size_t i = ext_.size(); i-- > 0;)
      if (ext_[i] != o.ext_[i]) return ext_[i] < o.ext_[i];
    return w0_ < o.w0_;
  }

  std::vector<int> ids() const {
    std::vector<int> out;
    out.reserve(count());
    for (uint32_t i = 0; i < n_; ++i)
      if (test(i)) out.push_back(static_cast<int>(i));
    return out;
  }

  uint64_t low_word() const { return w0_; }

  size_t hash() const {
    size_t h = std::hash<uint64_t>{}(w0_) ^ (n_ * 0x9e3779b9u);
    for (uint64_t w : ext_) h = h * 1099511628211ull ^ std::hash<uint64_t>{}(w);
    return h;
  }

  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (uint32_t i = 0; i < n_; ++i) {
      if (!test(i)) continue;
      if (!first) s += ",";
      s += std::to_string(i);
      first = false;
    }
    return s + "}";
  }

 private:
  void check_index(uint32_t i) const {
    if (i >= n_) throw DimensionError("Bits: index " + std::to_string(i) + " out of width " + std::to_string(n_));
  }
  void check_width(const Bits& o) const {
    if (n_ != o.n_)
      throw DimensionError("Bits: width mismatch " + std::to_string(n_) + " vs " + std::to_string(o.n_));
  }
  uint64_t word(size_t w) const { return w == 0 ? w0_ : ext_[w - 1]; }
  uint64_t& word_ref(size_t w) { return w == 0 ? w0_ : ext_[w - 1]; }

  uint32_t n_ = 0;
  uint64_t w0_ = 0;
  std::vector<uint64_t> ext_;  // words 1.. for n > 64
};

struct BitsHash {
  size_t operator()(const Bits& b) const { return b.hash(); }
};

}  // namespace probecert
