#include "wavetrap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace wavetrap {

GaussRule::GaussRule(int n) {
  if (n < 1) throw std::invalid_argument("GaussRule: order must be >= 1");
  x.resize(static_cast<std::size_t>(n));
  w.resize(static_cast<std::size_t>(n));
  // Newton iteration on P_n; standard initial guess per root.
  for (int i = 0; i < n; ++i) {
    double xi = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * j - 1) * xi * p1 - (j - 1) * p2) / j;
      }
      dp = n * (xi * p0 - p1) / (xi * xi - 1.0);
      const double dx = p0 / dp;
      xi -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = xi;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
  // enforce exact +/- symmetry of the rule
  for (int i = 0; i < n / 2; ++i) {
    const auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
    x[lo] = -x[hi];
    w[lo] = w[hi];
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.0;
}

const GaussRule& gauss_rule(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, GaussRule(n)).first;
  return it->second;
}

double gauss_panel(const std::function<double(double)>& f, double a, double b, int n) {
  const GaussRule& g = gauss_rule(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(mid + half * g.x[i]);
  return half * s;
}

double gauss_composite(const std::function<double(double)>& f, double a, double b,
                       int panels, int n) {
  if (panels < 1) panels = 1;
  const double w = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) s += gauss_panel(f, a + p * w, a + (p + 1) * w, n);
  return s;
}

double gauss_composite_split(const std::function<double(double)>& f, double a, double b,
                             int panels, int n, const std::vector<double>& breaks) {
  std::vector<double> edges{a};
  for (double c : breaks)
    if (c > a + 1e-14 && c < b - 1e-14) edges.push_back(c);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i], hi = edges[i + 1];
    const int p = std::max(1, static_cast<int>(std::ceil(panels * (hi - lo) / (b - a))));
    s += gauss_composite(f, lo, hi, p, n);
  }
  return s;
}

BallRule::BallRule(const Vec3& center, double radius, int nr, int nmu, int nphi) {
  const GaussRule& gr = gauss_rule(nr);
  const GaussRule& gm = gauss_rule(nmu);
  nodes.reserve(static_cast<std::size_t>(nr * nmu * nphi));
  const double dphi = 2.0 * kPi / nphi;
  for (int ir = 0; ir < nr; ++ir) {
    const double r = 0.5 * radius * (gr.x[static_cast<std::size_t>(ir)] + 1.0);
    const double wr = 0.5 * radius * gr.w[static_cast<std::size_t>(ir)] * r * r;
    for (int im = 0; im < nmu; ++im) {
      const double mu = gm.x[static_cast<std::size_t>(im)];
      const double wm = gm.w[static_cast<std::size_t>(im)];
      const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
      for (int ip = 0; ip < nphi; ++ip) {
        const double phi = dphi * ip;
        const Vec3 dir{s * std::cos(phi), s * std::sin(phi), mu};
        nodes.push_back({center + r * dir, wr * wm * dphi});
      }
    }
  }
}

SphereRule::SphereRule(int nmu, int nphi) {
  const GaussRule& gm = gauss_rule(nmu);
  nodes.reserve(static_cast<std::size_t>(nmu * nphi));
  const double dphi = 2.0 * kPi / nphi;
  for (int im = 0; im < nmu; ++im) {
    const double mu = gm.x[static_cast<std::size_t>(im)];
    const double wm = gm.w[static_cast<std::size_t>(im)];
    const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    for (int ip = 0; ip < nphi; ++ip) {
      const double phi = dphi * ip;
      nodes.push_back({Vec3{s * std::cos(phi), s * std::sin(phi), mu}, wm * dphi});
    }
  }
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson(a, fa, b, fb, fm);
  return adaptive_step(f, a, fa, b, fb, m, fm, whole, abs_tol, max_depth);
}

CubicTable CubicTable::sample(double a, double b, int n, const std::function<double(double)>& f,
                              const std::function<double(double)>& df) {
  if (n < 2) throw std::invalid_argument("CubicTable::sample: need n >= 2");
  std::vector<double> v(static_cast<std::size_t>(n)), s(static_cast<std::size_t>(n));
  const double h = (b - a) / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double x = a + i * h;
    v[static_cast<std::size_t>(i)] = f(x);
    s[static_cast<std::size_t>(i)] = df(x);
  }
  return CubicTable(a, b, std::move(v), std::move(s));
}

CubicTable CubicTable::accumulate(double a, double b, int n, const std::function<double(double)>& g,
                                  const std::vector<double>& breaks) {
  if (n < 2) throw std::invalid_argument("CubicTable::accumulate: need n >= 2");
  std::vector<double> v(static_cast<std::size_t>(n)), s(static_cast<std::size_t>(n));
  const double h = (b - a) / (n - 1);
  double acc = 0.0;
  v[0] = 0.0;
  s[0] = g(a);
  for (int i = 1; i < n; ++i) {
    const double lo = a + (i - 1) * h, hi = a + i * h;
    bool split = false;
    for (double c : breaks)
      if (c > lo + 1e-15 && c < hi - 1e-15) {
        acc += gauss_panel(g, lo, c, 8) + gauss_panel(g, c, hi, 8);
        split = true;
        break;
      }
    if (!split) acc += gauss_panel(g, lo, hi, 8);
    v[static_cast<std::size_t>(i)] = acc;
    s[static_cast<std::size_t>(i)] = g(a + i * h);
  }
  return CubicTable(a, b, std::move(v), std::move(s));
}

}  // namespace wavetrap
