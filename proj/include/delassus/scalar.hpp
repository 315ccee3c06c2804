#pragma once

#include <cmath>
#include <cstdint>

namespace delassus {

/// Tally of scalar floating-point operations recorded by a metered run.
/// Only mul, add/sub, div and sqrt are counted; copies, negations,
/// comparisons and integer bookkeeping are free.
struct OpCounts {
  std::uint64_t mul = 0;
  std::uint64_t add_sub = 0;
  std::uint64_t div = 0;
  std::uint64_t sqrt_ops = 0;

  std::uint64_t total() const { return mul + add_sub + div + sqrt_ops; }

  OpCounts& operator+=(const OpCounts& o) {
    mul += o.mul;
    add_sub += o.add_sub;
    div += o.div;
    sqrt_ops += o.sqrt_ops;
    return *this;
  }

  bool operator==(const OpCounts& o) const = default;
};

namespace detail {
inline thread_local OpCounts* tl_counter = nullptr;

inline void bump_mul() {
  if (tl_counter) ++tl_counter->mul;
}
inline void bump_add() {
  if (tl_counter) ++tl_counter->add_sub;
}
inline void bump_div() {
  if (tl_counter) ++tl_counter->div;
}
inline void bump_sqrt() {
  if (tl_counter) ++tl_counter->sqrt_ops;
}
}  // namespace detail

/// Binds an OpCounts to the calling thread for the lifetime of the scope.
/// Scopes nest; the innermost one receives the counts. Each invocation owns
/// its own OpCounts, so concurrent metered runs on different threads never
/// share a counter.
class MeterScope {
 public:
  explicit MeterScope(OpCounts& counts) : prev_(detail::tl_counter) {
    detail::tl_counter = &counts;
  }
  ~MeterScope() { detail::tl_counter = prev_; }

  MeterScope(const MeterScope&) = delete;
  MeterScope& operator=(const MeterScope&) = delete;

 private:
  OpCounts* prev_;
};

/// double wrapper that reports each arithmetic operation to the thread's
/// active OpCounts. All numerical kernels are templated on the scalar type,
/// so the same code runs plain (double) or metered (Metered).
struct Metered {
  double v = 0.0;

  Metered() = default;
  Metered(double x) : v(x) {}  // implicit: literals appear in shared kernels
};

inline Metered operator+(Metered a, Metered b) {
  detail::bump_add();
  return {a.v + b.v};
}
inline Metered operator-(Metered a, Metered b) {
  detail::bump_add();
  return {a.v - b.v};
}
inline Metered operator*(Metered a, Metered b) {
  detail::bump_mul();
  return {a.v * b.v};
}
inline Metered operator/(Metered a, Metered b) {
  detail::bump_div();
  return {a.v / b.v};
}
inline Metered operator-(Metered a) { return {-a.v}; }
inline Metered operator+(Metered a) { return a; }

inline Metered& operator+=(Metered& a, Metered b) { return a = a + b; }
inline Metered& operator-=(Metered& a, Metered b) { return a = a - b; }
inline Metered& operator*=(Metered& a, Metered b) { return a = a * b; }
inline Metered& operator/=(Metered& a, Metered b) { return a = a / b; }

inline bool operator<(Metered a, Metered b) { return a.v < b.v; }
inline bool operator>(Metered a, Metered b) { return a.v > b.v; }
inline bool operator<=(Metered a, Metered b) { return a.v <= b.v; }
inline bool operator>=(Metered a, Metered b) { return a.v >= b.v; }
inline bool operator==(Metered a, Metered b) { return a.v == b.v; }
inline bool operator!=(Metered a, Metered b) { return a.v != b.v; }

inline Metered sqrt(Metered a) {
  detail::bump_sqrt();
  return {std::sqrt(a.v)};
}
// Trig and abs are outside the counted categories.
inline Metered sin(Metered a) { return {std::sin(a.v)}; }
inline Metered cos(Metered a) { return {std::cos(a.v)}; }
inline Metered abs(Metered a) { return {std::abs(a.v)}; }

inline double to_double(double x) { return x; }
inline double to_double(Metered x) { return x.v; }

}  // namespace delassus
