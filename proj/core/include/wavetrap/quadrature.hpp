#pragma once

#include <functional>
#include <vector>

#include "wavetrap/math.hpp"

namespace wavetrap {

/// Gauss-Legendre nodes/weights on [-1,1].
struct GaussRule {
  std::vector<double> x, w;
  explicit GaussRule(int n);
};

const GaussRule& gauss_rule(int n);  // cached by order

/// Integrate f over [a,b] with one Gauss panel of order n.
double gauss_panel(const std::function<double(double)>& f, double a, double b, int n);

/// Composite Gauss: `panels` equal panels of order n.
double gauss_composite(const std::function<double(double)>& f, double a, double b,
                       int panels, int n);

/// Composite Gauss with panel edges pinned at the listed breakpoints, for
/// integrands that are only piecewise smooth.
double gauss_composite_split(const std::function<double(double)>& f, double a, double b,
                             int panels, int n, const std::vector<double>& breaks);

/// Quadrature orders for 3D ball integrals (radial x polar x azimuthal) and
/// unit-sphere integrals (polar x azimuthal).
struct QuadOrders {
  int ball_r = 16;
  int ball_mu = 16;
  int ball_phi = 32;
  int sphere_mu = 24;
  int sphere_phi = 48;
};

/// Product rule over a solid ball centered at `center` with radius `radius`.
/// Polar axis is z so that nodes come in exact +/-z pairs: integrands odd in
/// (x3 - center3) cancel to the last bit, which keeps planar scenarios planar.
struct BallRule {
  struct Node { Vec3 x; double w; };
  std::vector<Node> nodes;
  BallRule(const Vec3& center, double radius, int nr, int nmu, int nphi);
};

/// Product rule over the unit sphere S^2 (returns direction nodes and weights
/// summing to 4*pi). Same +/-z pairing as BallRule.
struct SphereRule {
  struct Node { Vec3 dir; double w; };
  std::vector<Node> nodes;
  SphereRule(int nmu, int nphi);
};

}  // namespace wavetrap
