#pragma once

#include <algorithm>
#include <climits>
#include <vector>

#include "hsv/errors.hpp"
#include "hsv/scalar.hpp"

namespace hsv {

/// Truncated Laurent series in a formal infinitesimal eps with exact rational
/// coefficients.
///
/// Used to evaluate rational functions at points where the defining formula
/// has a removable 0/0: substitute lambda -> lambda0 * (1 + eps), run the
/// unchanged generic code over this field, and read off the eps^0 term.
///
/// A value is known modulo eps^prec. Exact constants carry prec = kExact.
/// Values that depend on eps carry a relative working precision `work`;
/// every operation keeps at most `work` significant terms.
class Laurent {
 public:
  static constexpr int kExact = INT_MAX / 4;

  Laurent() : val_(kExact), prec_(kExact), work_(0) {}
  template <std::integral I>
  Laurent(I v) : Laurent(Scalar(v)) {}  // NOLINT(google-explicit-constructor)
  Laurent(const Scalar& s)              // NOLINT(google-explicit-constructor)
      : val_(0), prec_(kExact), work_(0) {
    if (s.is_zero()) {
      val_ = kExact;
    } else {
      c_.push_back(s);
    }
  }

  /// x0 * (1 + eps), with `work` significant terms kept through the computation.
  static Laurent perturbed(const Scalar& x0, int work) {
    if (x0.is_zero()) throw InvalidArgument("perturbation point must be nonzero");
    Laurent r;
    r.val_ = 0;
    r.c_ = {x0, x0};
    r.prec_ = kExact;
    r.work_ = work;
    r.cap();
    return r;
  }

  int valuation() const { return val_; }
  int precision() const { return prec_; }
  bool known_zero() const { return c_.empty(); }

  /// Coefficient of eps^k (k must lie below the known precision).
  Scalar coefficient(int k) const {
    if (k >= prec_) throw SingularParameter("coefficient beyond working precision");
    if (k < val_ || k - val_ >= static_cast<int>(c_.size())) return Scalar(0);
    return c_[k - val_];
  }

  /// Value at eps = 0. Throws SingularParameter if the series has a pole or
  /// too little precision survived to decide the constant term.
  Scalar limit() const {
    if (prec_ <= 0) throw SingularParameter("working precision exhausted before the limit");
    if (!c_.empty() && val_ < 0) throw SingularParameter("pole at the evaluation point");
    return coefficient(0);
  }

  Laurent& operator+=(const Laurent& o) { return *this = add(*this, o, false); }
  Laurent& operator-=(const Laurent& o) { return *this = add(*this, o, true); }
  Laurent& operator*=(const Laurent& o) { return *this = mul(*this, o); }
  Laurent& operator/=(const Laurent& o) { return *this = mul(*this, o.inverse()); }

  friend Laurent operator+(const Laurent& a, const Laurent& b) { return add(a, b, false); }
  friend Laurent operator-(const Laurent& a, const Laurent& b) { return add(a, b, true); }
  friend Laurent operator*(const Laurent& a, const Laurent& b) { return mul(a, b); }
  friend Laurent operator/(const Laurent& a, const Laurent& b) { return mul(a, b.inverse()); }
  friend Laurent operator-(const Laurent& a) {
    Laurent r = a;
    for (auto& x : r.c_) x = -x;
    return r;
  }

  Laurent inverse() const {
    if (c_.empty()) throw SingularParameter("division by a quantity that vanishes to working precision");
    Laurent r;
    r.work_ = work_;
    r.val_ = -val_;
    if (c_.size() == 1 && prec_ == kExact) {
      r.c_ = {c_[0].inverse()};
      r.prec_ = kExact;
      return r;
    }
    int rel = prec_ == kExact ? std::max(work_, 1) : prec_ - val_;
    if (work_ > 0) rel = std::min(rel, work_);
    // d = 1 / (c0 + c1 e + ...), term by term.
    std::vector<Scalar> d(rel);
    Scalar inv0 = c_[0].inverse();
    for (int k = 0; k < rel; ++k) {
      Scalar acc = k == 0 ? Scalar(1) : Scalar(0);
      for (int i = 1; i <= k && i < static_cast<int>(c_.size()); ++i) acc -= c_[i] * d[k - i];
      d[k] = acc * inv0;
    }
    r.c_ = std::move(d);
    r.prec_ = r.val_ + rel;
    r.normalize();
    return r;
  }

 private:
  static int sat_add(int a, int b) {
    long s = static_cast<long>(a) + b;
    return static_cast<int>(std::min<long>(s, kExact));
  }

  void normalize() {
    std::size_t lead = 0;
    while (lead < c_.size() && c_[lead].is_zero()) ++lead;
    if (lead == c_.size()) {
      c_.clear();
      val_ = prec_;
      return;
    }
    if (lead) {
      c_.erase(c_.begin(), c_.begin() + static_cast<long>(lead));
      val_ += static_cast<int>(lead);
    }
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }

  void cap() {
    if (work_ > 0 && !c_.empty()) prec_ = std::min(prec_, sat_add(val_, work_));
    if (prec_ != kExact) {
      long keep = static_cast<long>(prec_) - val_;
      if (keep < static_cast<long>(c_.size())) c_.resize(static_cast<std::size_t>(std::max(0L, keep)));
    }
    normalize();
  }

  static Laurent add(const Laurent& a, const Laurent& b, bool subtract) {
    Laurent r;
    r.work_ = std::max(a.work_, b.work_);
    r.prec_ = std::min(a.prec_, b.prec_);
    if (a.c_.empty() && b.c_.empty()) {
      r.val_ = r.prec_;
      return r;
    }
    int lo = std::min(a.c_.empty() ? kExact : a.val_, b.c_.empty() ? kExact : b.val_);
    int hi_a = a.c_.empty() ? lo : a.val_ + static_cast<int>(a.c_.size());
    int hi_b = b.c_.empty() ? lo : b.val_ + static_cast<int>(b.c_.size());
    int hi = std::min(std::max(hi_a, hi_b), r.prec_);
    r.val_ = lo;
    r.c_.assign(static_cast<std::size_t>(std::max(0, hi - lo)), Scalar(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      int e = a.val_ + static_cast<int>(i);
      if (e < hi) r.c_[e - lo] += a.c_[i];
    }
    for (std::size_t i = 0; i < b.c_.size(); ++i) {
      int e = b.val_ + static_cast<int>(i);
      if (e < hi) {
        if (subtract)
          r.c_[e - lo] -= b.c_[i];
        else
          r.c_[e - lo] += b.c_[i];
      }
    }
    r.cap();
    return r;
  }

  static Laurent mul(const Laurent& a, const Laurent& b) {
    Laurent r;
    r.work_ = std::max(a.work_, b.work_);
    int va = a.c_.empty() ? a.prec_ : a.val_;
    int vb = b.c_.empty() ? b.prec_ : b.val_;
    r.prec_ = std::min(sat_add(a.prec_, vb), sat_add(b.prec_, va));
    if (a.c_.empty() || b.c_.empty()) {
      r.val_ = r.prec_;
      return r;
    }
    r.val_ = a.val_ + b.val_;
    long len = static_cast<long>(a.c_.size() + b.c_.size()) - 1;
    len = std::min<long>(len, static_cast<long>(r.prec_) - r.val_);
    if (r.work_ > 0) len = std::min<long>(len, r.work_);
    r.c_.assign(static_cast<std::size_t>(std::max(0L, len)), Scalar(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size() && static_cast<long>(i + j) < len; ++j)
        r.c_[i + j] += a.c_[i] * b.c_[j];
    r.cap();
    return r;
  }

  int val_;
  std::vector<Scalar> c_;
  int prec_;
  int work_;
};

inline bool is_zero(const Laurent& x) { return x.known_zero(); }

}  // namespace hsv
