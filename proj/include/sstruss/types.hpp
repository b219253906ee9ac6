#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace sstruss {

using u64 = std::uint64_t;
using i64 = std::int64_t;

// Hop distance sentinel for unreachable pairs. All hop arithmetic must guard
// against it; never add two sentinels.
inline constexpr int kInfHops = std::numeric_limits<int>::max();

inline constexpr double kInfDist = std::numeric_limits<double>::infinity();

// Stable keyword hash (splitmix64 finalizer). Index files depend on this
// mapping, so it must never change across platforms or versions.
inline u64 mix64(u64 x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Fixed-width bit vector used as a may-contain filter over keyword ids.
class KeywordBits {
 public:
  KeywordBits() = default;
  explicit KeywordBits(int width) : width_(width), words_(width / 64, 0) {
    if (width <= 0 || (width & (width - 1)) != 0 || width % 64 != 0)
      throw std::invalid_argument("bit width must be a power of two >= 64");
  }

  int width() const { return width_; }

  void insert(int keyword) {
    u64 pos = mix64(static_cast<u64>(keyword)) & static_cast<u64>(width_ - 1);
    words_[pos >> 6] |= (1ULL << (pos & 63));
  }

  // May-contain: false means definitely absent.
  bool may_contain(int keyword) const {
    u64 pos = mix64(static_cast<u64>(keyword)) & static_cast<u64>(width_ - 1);
    return (words_[pos >> 6] >> (pos & 63)) & 1ULL;
  }

  bool intersects(const KeywordBits& other) const {
    for (size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & other.words_[i]) return true;
    return false;
  }

  bool contains_all(const KeywordBits& other) const {
    for (size_t i = 0; i < words_.size(); ++i)
      if ((other.words_[i] & ~words_[i]) != 0) return false;
    return true;
  }

  void or_with(const KeywordBits& other) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  }

  bool any() const {
    for (u64 w : words_)
      if (w) return true;
    return false;
  }

  int popcount() const {
    int n = 0;
    for (u64 w : words_) n += __builtin_popcountll(w);
    return n;
  }

  const std::vector<u64>& words() const { return words_; }
  std::vector<u64>& words() { return words_; }

  bool operator==(const KeywordBits& other) const = default;

 private:
  int width_ = 0;
  std::vector<u64> words_;
};

// Deterministic RNG. mt19937_64's raw output is standardized; the bounded and
// real helpers below avoid std::*_distribution, whose results are
// implementation-defined. Generated files must be byte-identical everywhere.
class Rng {
 public:
  explicit Rng(u64 seed) : state_(seed) {
    // splitmix warmup so nearby seeds diverge
    for (int i = 0; i < 4; ++i) next();
  }

  u64 next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  u64 below(u64 n) { return n == 0 ? 0 : next() % n; }

  int range(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(below(static_cast<u64>(hi - lo + 1)));
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double gauss(double mean = 0.0, double stddev = 1.0) {
    // Marsaglia polar method; the second draw is cached as the spare.
    if (has_spare_) {
      has_spare_ = false;
      return mean + stddev * spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * unit() - 1.0;
      v = 2.0 * unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return mean + stddev * u * f;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  u64 state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sstruss
