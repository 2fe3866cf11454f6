#include "wavetrap/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavetrap {

TrajectoryHistory::TrajectoryHistory(double step, bool quiescent_past)
    : h_(step), quiescent_past_(quiescent_past) {
  if (!(step > 0.0)) throw std::invalid_argument("TrajectoryHistory: step must be positive");
}

void TrajectoryHistory::append(const Vec3& q, const Vec3& v, const Vec3& a) {
  if (!finite(q) || !finite(v) || !finite(a))
    throw std::runtime_error("TrajectoryHistory: nonfinite knot");
  q_.push_back(q);
  v_.push_back(v);
  a_.push_back(a);
  speed_bound_ = std::max(speed_bound_, norm(v));
  radius_bound_ = std::max(radius_bound_, norm(q));
}

Kin TrajectoryHistory::interpolate(double t) const {
  if (q_.empty()) throw std::runtime_error("TrajectoryHistory: empty");
  if (t < 0.0) {
    if (!quiescent_past_)
      throw std::out_of_range("TrajectoryHistory: t < 0 without a declared quiescent past");
    return {q_.front(), Vec3{}, Vec3{}};
  }
  const double tend = end_time();
  if (t > tend + 1e-12 * (1.0 + tend))
    throw std::out_of_range("TrajectoryHistory: t beyond last knot");
  if (t >= tend) return {q_.back(), v_.back(), a_.back()};

  const double u = t / h_;
  auto i = static_cast<std::size_t>(u);
  if (i >= q_.size() - 1) i = q_.size() - 2;
  const double s = u - static_cast<double>(i);
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  const double g00 = (6 * s2 - 6 * s) / h_, g10 = (3 * s2 - 4 * s + 1);
  const double g01 = (-6 * s2 + 6 * s) / h_, g11 = (3 * s2 - 2 * s);
  Kin k;
  k.q = h00 * q_[i] + (h10 * h_) * v_[i] + h01 * q_[i + 1] + (h11 * h_) * v_[i + 1];
  k.v = g00 * q_[i] + g10 * v_[i] + g01 * q_[i + 1] + g11 * v_[i + 1];
  k.a = (1.0 - s) * a_[i] + s * a_[i + 1];
  return k;
}

Kin HistoryView::state(double t) const {
  const double t0 = hist_->end_time();
  if (!ext_ || t <= t0) return hist_->interpolate(t);
  if (t > t1_ + 1e-12 * (1.0 + t1_))
    throw std::out_of_range("HistoryView: t beyond provisional segment");
  const double dt = t1_ - t0;
  if (dt <= 0.0) return hist_->interpolate(t0);
  const Vec3 q0 = hist_->knot_q(hist_->size() - 1);
  const Vec3 v0 = hist_->knot_v(hist_->size() - 1);
  const double s = std::min(1.0, (t - t0) / dt);
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  const double g00 = (6 * s2 - 6 * s) / dt, g10 = (3 * s2 - 4 * s + 1);
  const double g01 = (-6 * s2 + 6 * s) / dt, g11 = (3 * s2 - 2 * s);
  Kin k;
  k.q = h00 * q0 + (h10 * dt) * v0 + h01 * q1_ + (h11 * dt) * v1_;
  k.v = g00 * q0 + g10 * v0 + g01 * q1_ + g11 * v1_;
  k.a = (v1_ - v0) / dt;  // crude within-step estimate; never read by forces
  return k;
}

double HistoryView::speed_bound() const {
  double b = hist_->speed_bound();
  if (ext_) b = std::max(b, norm(v1_));
  return b;
}

double HistoryView::radius_bound() const {
  double b = hist_->radius_bound();
  if (ext_) b = std::max(b, norm(q1_));
  return b;
}

}  // namespace wavetrap
