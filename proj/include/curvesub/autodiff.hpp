#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace curvesub::ad {

// Reverse-mode tape. Nodes are appended during the forward pass; each node
// stores its parents and the local partials, so one backward sweep accumulates
// adjoints. Constants carry idx == -1 and never touch the tape, which keeps
// detached subgraphs (ground truth, warm-up polygons, frozen features) free.
//
// Nodes are variable-arity: a fused dot product is one node with n arguments.
// That matters; the training graph is dominated by matrix rows.

class Tape {
 public:
  struct Node {
    uint32_t off;
    uint32_t n;
  };

  int32_t push0() {
    nodes_.push_back({static_cast<uint32_t>(arg_idx_.size()), 0});
    return last_index();
  }

  int32_t push1(int32_t p, double d) {
    auto off = static_cast<uint32_t>(arg_idx_.size());
    arg_idx_.push_back(static_cast<uint32_t>(p));
    arg_partial_.push_back(d);
    nodes_.push_back({off, 1});
    return last_index();
  }

  int32_t push2(int32_t p0, double d0, int32_t p1, double d1) {
    auto off = static_cast<uint32_t>(arg_idx_.size());
    arg_idx_.push_back(static_cast<uint32_t>(p0));
    arg_idx_.push_back(static_cast<uint32_t>(p1));
    arg_partial_.push_back(d0);
    arg_partial_.push_back(d1);
    nodes_.push_back({off, 2});
    return last_index();
  }

  // n-ary accumulation: begin_node / arg / end_node.
  void begin_node() { pending_off_ = static_cast<uint32_t>(arg_idx_.size()); }
  void arg(int32_t p, double d) {
    arg_idx_.push_back(static_cast<uint32_t>(p));
    arg_partial_.push_back(d);
  }
  int32_t end_node() {
    nodes_.push_back({pending_off_, static_cast<uint32_t>(arg_idx_.size()) - pending_off_});
    return last_index();
  }

  size_t size() const { return nodes_.size(); }

  void clear() {
    nodes_.clear();
    arg_idx_.clear();
    arg_partial_.clear();
  }

  // Adjoints for every node, seeded with d(out)/d(out) = 1.
  std::vector<double> backward(int32_t out) const {
    std::vector<double> adj(nodes_.size(), 0.0);
    if (out < 0) return adj;
    adj[static_cast<size_t>(out)] = 1.0;
    for (int32_t i = out; i >= 0; --i) {
      double a = adj[static_cast<size_t>(i)];
      if (a == 0.0) continue;
      const Node& nd = nodes_[static_cast<size_t>(i)];
      for (uint32_t k = 0; k < nd.n; ++k) {
        adj[arg_idx_[nd.off + k]] += arg_partial_[nd.off + k] * a;
      }
    }
    return adj;
  }

 private:
  int32_t last_index() const { return static_cast<int32_t>(nodes_.size()) - 1; }

  std::vector<Node> nodes_;
  std::vector<uint32_t> arg_idx_;
  std::vector<double> arg_partial_;
  uint32_t pending_off_ = 0;
};

Tape* active_tape();

// Scoped activation; tapes are thread-local so per-sample evaluations can run
// on independent tapes concurrently.
class TapeScope {
 public:
  explicit TapeScope(Tape& t);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* prev_;
};

struct Var {
  double v = 0.0;
  int32_t idx = -1;

  Var() = default;
  Var(double value) : v(value) {}  // constant; intentionally implicit
  Var(double value, int32_t i) : v(value), idx(i) {}

  bool tracked() const { return idx >= 0; }
};

// Leaf variable on the active tape (parameters, differentiable inputs).
inline Var leaf(double v) {
  Tape* t = active_tape();
  assert(t != nullptr);
  return Var(v, t->push0());
}

inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.v; }

inline Var detach(const Var& x) { return Var(x.v); }
inline double detach(double x) { return x; }

namespace detail {
inline Tape& tape() {
  Tape* t = active_tape();
  assert(t != nullptr);
  return *t;
}
}  // namespace detail

inline Var operator+(const Var& a, const Var& b) {
  if (!a.tracked() && !b.tracked()) return Var(a.v + b.v);
  if (!b.tracked()) return Var(a.v + b.v, detail::tape().push1(a.idx, 1.0));
  if (!a.tracked()) return Var(a.v + b.v, detail::tape().push1(b.idx, 1.0));
  return Var(a.v + b.v, detail::tape().push2(a.idx, 1.0, b.idx, 1.0));
}

inline Var operator-(const Var& a, const Var& b) {
  if (!a.tracked() && !b.tracked()) return Var(a.v - b.v);
  if (!b.tracked()) return Var(a.v - b.v, detail::tape().push1(a.idx, 1.0));
  if (!a.tracked()) return Var(a.v - b.v, detail::tape().push1(b.idx, -1.0));
  return Var(a.v - b.v, detail::tape().push2(a.idx, 1.0, b.idx, -1.0));
}

inline Var operator-(const Var& a) {
  if (!a.tracked()) return Var(-a.v);
  return Var(-a.v, detail::tape().push1(a.idx, -1.0));
}

inline Var operator*(const Var& a, const Var& b) {
  if (!a.tracked() && !b.tracked()) return Var(a.v * b.v);
  if (!b.tracked()) return Var(a.v * b.v, detail::tape().push1(a.idx, b.v));
  if (!a.tracked()) return Var(a.v * b.v, detail::tape().push1(b.idx, a.v));
  return Var(a.v * b.v, detail::tape().push2(a.idx, b.v, b.idx, a.v));
}

inline Var operator/(const Var& a, const Var& b) {
  double inv = 1.0 / b.v;
  if (!a.tracked() && !b.tracked()) return Var(a.v * inv);
  if (!b.tracked()) return Var(a.v * inv, detail::tape().push1(a.idx, inv));
  double db = -a.v * inv * inv;
  if (!a.tracked()) return Var(a.v * inv, detail::tape().push1(b.idx, db));
  return Var(a.v * inv, detail::tape().push2(a.idx, inv, b.idx, db));
}

inline Var operator+(const Var& a, double b) { return a + Var(b); }
inline Var operator+(double a, const Var& b) { return Var(a) + b; }
inline Var operator-(const Var& a, double b) { return a - Var(b); }
inline Var operator-(double a, const Var& b) { return Var(a) - b; }
inline Var operator*(const Var& a, double b) { return a * Var(b); }
inline Var operator*(double a, const Var& b) { return Var(a) * b; }
inline Var operator/(const Var& a, double b) { return a / Var(b); }
inline Var operator/(double a, const Var& b) { return Var(a) / b; }

inline Var& operator+=(Var& a, const Var& b) { a = a + b; return a; }
inline Var& operator-=(Var& a, const Var& b) { a = a - b; return a; }
inline Var& operator*=(Var& a, const Var& b) { a = a * b; return a; }

namespace detail {
inline Var unary(const Var& x, double v, double d) {
  if (!x.tracked()) return Var(v);
  return Var(v, tape().push1(x.idx, d));
}
}  // namespace detail

// sqrt with subgradient 0 at the origin, so norms of coincident points
// propagate zero instead of infinity.
inline Var sqrt(const Var& x) {
  double s = std::sqrt(x.v);
  return detail::unary(x, s, x.v > 0.0 ? 0.5 / s : 0.0);
}

inline Var sin(const Var& x) { return detail::unary(x, std::sin(x.v), std::cos(x.v)); }
inline Var cos(const Var& x) { return detail::unary(x, std::cos(x.v), -std::sin(x.v)); }

inline Var tan(const Var& x) {
  double t = std::tan(x.v);
  return detail::unary(x, t, 1.0 + t * t);
}

inline Var asin(const Var& x) {
  double d = std::fabs(x.v) < 1.0 ? 1.0 / std::sqrt(1.0 - x.v * x.v) : 0.0;
  return detail::unary(x, std::asin(x.v), d);
}

inline Var acos(const Var& x) {
  double d = std::fabs(x.v) < 1.0 ? -1.0 / std::sqrt(1.0 - x.v * x.v) : 0.0;
  return detail::unary(x, std::acos(x.v), d);
}

inline Var atan(const Var& x) { return detail::unary(x, std::atan(x.v), 1.0 / (1.0 + x.v * x.v)); }

inline Var atan2(const Var& y, const Var& x) {
  double r2 = x.v * x.v + y.v * y.v;
  double dy = r2 > 0.0 ? x.v / r2 : 0.0;
  double dx = r2 > 0.0 ? -y.v / r2 : 0.0;
  double v = std::atan2(y.v, x.v);
  if (!y.tracked() && !x.tracked()) return Var(v);
  if (!x.tracked()) return Var(v, detail::tape().push1(y.idx, dy));
  if (!y.tracked()) return Var(v, detail::tape().push1(x.idx, dx));
  return Var(v, detail::tape().push2(y.idx, dy, x.idx, dx));
}
inline Var atan2(const Var& y, double x) { return atan2(y, Var(x)); }
inline Var atan2(double y, const Var& x) { return atan2(Var(y), x); }

inline Var exp(const Var& x) {
  double e = std::exp(x.v);
  return detail::unary(x, e, e);
}

inline Var log(const Var& x) { return detail::unary(x, std::log(x.v), 1.0 / x.v); }

inline Var tanh(const Var& x) {
  double t = std::tanh(x.v);
  return detail::unary(x, t, 1.0 - t * t);
}

inline Var atanh(const Var& x) {
  double d = std::fabs(x.v) < 1.0 ? 1.0 / (1.0 - x.v * x.v) : 0.0;
  return detail::unary(x, std::atanh(x.v), d);
}

inline Var erf(const Var& x) {
  double d = 1.1283791670955125738961589031 * std::exp(-x.v * x.v);  // 2/sqrt(pi)
  return detail::unary(x, std::erf(x.v), d);
}

inline Var fabs(const Var& x) {
  double s = x.v > 0.0 ? 1.0 : (x.v < 0.0 ? -1.0 : 0.0);
  return detail::unary(x, std::fabs(x.v), s);
}
inline Var abs(const Var& x) { return fabs(x); }

// Exact GELU, x * Phi(x), as a single tape node.
inline double gelu(double x) {
  return 0.5 * x * (1.0 + std::erf(x * 0.70710678118654752440084436210485));
}
inline Var gelu(const Var& x) {
  double phi_cdf = 0.5 * (1.0 + std::erf(x.v * 0.70710678118654752440084436210485));
  double phi_pdf = 0.39894228040143267793994605993438 * std::exp(-0.5 * x.v * x.v);
  return detail::unary(x, x.v * phi_cdf, phi_cdf + x.v * phi_pdf);
}

// Numerically stable logistic.
inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}
inline Var sigmoid(const Var& x) {
  double s = sigmoid(x.v);
  return detail::unary(x, s, s * (1.0 - s));
}

// Guard-rail clamp: identity inside the interval, zero gradient outside.
inline Var clamp_guard(const Var& x, double lo, double hi) {
  if (x.v < lo) return Var(lo);
  if (x.v > hi) return Var(hi);
  return x;
}
inline double clamp_guard(double x, double lo, double hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}

inline Var sq(const Var& x) { return x * x; }
inline double sq(double x) { return x * x; }

}  // namespace curvesub::ad
