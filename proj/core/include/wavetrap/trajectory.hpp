#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "wavetrap/math.hpp"
#include "wavetrap/quadrature.hpp"

namespace wavetrap {

struct Kin {
  Vec3 q, v, a;
};

/// Append-only record of uniformly spaced trajectory knots (t_n, q_n, v_n, a_n)
/// with C^1 cubic Hermite interpolation in (q, v) and linear interpolation of
/// the stored accelerations. This is the memory of the delay system: all
/// retarded integrals read the trajectory through it.
class TrajectoryHistory {
 public:
  explicit TrajectoryHistory(double step, bool quiescent_past = false);

  void append(const Vec3& q, const Vec3& v, const Vec3& a);

  /// Integrator-only: patch the acceleration of the newest knot (the initial
  /// knot's force can only be evaluated once the knot exists).
  void set_last_accel(const Vec3& a) { a_.back() = a; }

  double step() const { return h_; }
  std::size_t size() const { return q_.size(); }
  double end_time() const { return h_ * static_cast<double>(q_.size() - 1); }
  bool quiescent_past() const { return quiescent_past_; }

  const Vec3& knot_q(std::size_t i) const { return q_[i]; }
  const Vec3& knot_v(std::size_t i) const { return v_[i]; }
  const Vec3& knot_a(std::size_t i) const { return a_[i]; }

  double speed_bound() const { return speed_bound_; }   // max |v_n| so far
  double radius_bound() const { return radius_bound_; } // max |q_n| so far

  /// C^1 values at t in [0, end_time]; exact at knots. t < 0 returns the t=0
  /// knot with v = a = 0 when a quiescent past was declared, else throws.
  /// t beyond the last knot throws (no extrapolation).
  Kin interpolate(double t) const;

  Vec3 position(double t) const { return interpolate(t).q; }

 private:
  double h_;
  bool quiescent_past_;
  std::vector<Vec3> q_, v_, a_;
  double speed_bound_ = 0.0;
  double radius_bound_ = 0.0;
};

/// Gauss panels over [lo, hi] whose edges sit on the knot grid of spacing
/// `step`: the interpolant is only C^1 at knots, so quadratures of anything
/// built from it must not straddle them.
template <class F>
void knot_aligned_panels(double step, double lo, double hi, int order, F&& f);

/// Read view of a history plus an optional provisional Hermite segment ahead
/// of the last knot; the integrator extends the view with stage data while a
/// step is in progress. Field evaluators only read through this interface.
class HistoryView {
 public:
  explicit HistoryView(const TrajectoryHistory& h) : hist_(&h) {}

  void set_extension(double t1, const Vec3& q1, const Vec3& v1) {
    ext_ = true;
    t1_ = t1;
    q1_ = q1;
    v1_ = v1;
  }
  void clear_extension() { ext_ = false; }

  const TrajectoryHistory& history() const { return *hist_; }
  double end_time() const { return ext_ ? t1_ : hist_->end_time(); }
  double step() const { return hist_->step(); }

  Kin state(double t) const;
  Vec3 position(double t) const { return state(t).q; }

  double speed_bound() const;
  double radius_bound() const;

 private:
  const TrajectoryHistory* hist_;
  bool ext_ = false;
  double t1_ = 0.0;
  Vec3 q1_, v1_;
};

template <class F>
void knot_aligned_panels(double step, double lo, double hi, int order, F&& f) {
  if (!(hi > lo)) return;
  const GaussRule& g = gauss_rule(order);
  double a = lo;
  while (a < hi - 1e-15 * (1.0 + hi)) {
    double b = (std::floor(a / step + 1e-9) + 1.0) * step;
    if (b <= a + 1e-15) b = a + step;
    b = std::min(b, hi);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < g.x.size(); ++i) f(mid + half * g.x[i], half * g.w[i]);
    a = b;
  }
}

}  // namespace wavetrap
