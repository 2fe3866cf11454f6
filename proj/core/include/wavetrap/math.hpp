#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace wavetrap {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kFourPi = 4.0 * kPi;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline bool finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// Symmetric 3x3 matrix, enough for Hessians.
struct Mat3 {
  std::array<double, 9> m{};
  double operator()(int i, int j) const { return m[static_cast<std::size_t>(3 * i + j)]; }
  double& operator()(int i, int j) { return m[static_cast<std::size_t>(3 * i + j)]; }
  Vec3 apply(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
};

inline Mat3 identity_times(double s) {
  Mat3 r;
  r(0, 0) = r(1, 1) = r(2, 2) = s;
  return r;
}

/// Cubic Hermite interpolant on a uniform grid storing values and slopes.
/// Evaluation outside [a,b] uses user-supplied closed-form extensions when
/// present, otherwise clamps (tables are always built to cover actual use).
class CubicTable {
 public:
  CubicTable() = default;
  CubicTable(double a, double b, std::vector<double> values, std::vector<double> slopes)
      : a_(a), b_(b), f_(std::move(values)), df_(std::move(slopes)) {
    if (f_.size() < 2 || f_.size() != df_.size()) throw std::invalid_argument("CubicTable: bad node data");
    h_ = (b_ - a_) / static_cast<double>(f_.size() - 1);
  }

  /// Build from pointwise value/slope callables.
  static CubicTable sample(double a, double b, int n,
                           const std::function<double(double)>& f,
                           const std::function<double(double)>& df);

  /// Build the running integral of `g`: I(x) = int_a^x g, with I' = g stored
  /// exactly at the nodes. Per-segment Gauss accumulation; `breaks` lists
  /// interior discontinuities of g so no Gauss panel straddles one.
  static CubicTable accumulate(double a, double b, int n, const std::function<double(double)>& g,
                               const std::vector<double>& breaks = {});

  double eval(double x) const {
    const auto n = f_.size() - 1;
    double u = (x - a_) / h_;
    if (u <= 0.0) u = 0.0;
    if (u >= static_cast<double>(n)) u = static_cast<double>(n) - 1e-12;
    auto i = static_cast<std::size_t>(u);
    if (i >= n) i = n - 1;
    const double t = u - static_cast<double>(i);
    const double f0 = f_[i], f1 = f_[i + 1];
    const double m0 = df_[i] * h_, m1 = df_[i + 1] * h_;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * m0 +
           (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * m1;
  }

  double deriv(double x) const {
    const auto n = f_.size() - 1;
    double u = (x - a_) / h_;
    if (u <= 0.0) u = 0.0;
    if (u >= static_cast<double>(n)) u = static_cast<double>(n) - 1e-12;
    auto i = static_cast<std::size_t>(u);
    if (i >= n) i = n - 1;
    const double t = u - static_cast<double>(i);
    const double f0 = f_[i], f1 = f_[i + 1];
    const double m0 = df_[i] * h_, m1 = df_[i + 1] * h_;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * f0 + (3 * t2 - 4 * t + 1) * m0 +
            (-6 * t2 + 6 * t) * f1 + (3 * t2 - 2 * t) * m1) / h_;
  }

  double front() const { return f_.front(); }
  double back() const { return f_.back(); }
  double xmin() const { return a_; }
  double xmax() const { return b_; }
  bool empty() const { return f_.empty(); }

 private:
  double a_ = 0.0, b_ = 1.0, h_ = 1.0;
  std::vector<double> f_, df_;
};

/// Adaptive Simpson quadrature; independent of the Gauss panel machinery so
/// the two can cross-check each other.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-12, int max_depth = 28);

}  // namespace wavetrap
