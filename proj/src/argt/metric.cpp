#include "argt/metric.hpp"

#include <cmath>

#include "argt/geodesic.hpp"

namespace argt {

namespace {
void check_domain(double x, double y) {
  if (x * x + y * y > 1.0 + 1e-9)
    throw std::domain_error("metric: point outside the closed unit disk");
}
}  // namespace

ConformalMetric ConformalMetric::euclidean() {
  ConformalMetric m;
  m.fam_ = Family::Euclidean;
  m.finalize();
  return m;
}

ConformalMetric ConformalMetric::cap(double kappa, double disk_radius) {
  if (kappa <= 0 || disk_radius <= 0)
    throw std::invalid_argument("cap metric: kappa and disk_radius must be positive");
  ConformalMetric m;
  m.fam_ = Family::Cap;
  m.kap_ = kappa * disk_radius * disk_radius;
  m.amp_ = 2.0 * std::sqrt(kappa) * disk_radius;
  m.finalize();
  return m;
}

ConformalMetric ConformalMetric::hyperbolic(double kappa, double disk_radius) {
  if (kappa <= 0 || disk_radius <= 0)
    throw std::invalid_argument("hyperbolic metric: kappa and disk_radius must be positive");
  if (kappa * disk_radius * disk_radius >= 1.0)
    throw std::invalid_argument("hyperbolic metric: need kappa * disk_radius^2 < 1");
  ConformalMetric m;
  m.fam_ = Family::Hyperbolic;
  m.kap_ = kappa * disk_radius * disk_radius;
  m.amp_ = 2.0 * std::sqrt(kappa) * disk_radius;
  m.finalize();
  return m;
}

ConformalMetric ConformalMetric::from_grid(const PolarGrid& grid, const RField& lam) {
  ConformalMetric m;
  m.fam_ = Family::Grid;
  m.lgrid_ = grid;
  m.lam_ = lam.cast<cd>();
  m.lam_x_ = d_x(grid, m.lam_);
  m.lam_y_ = d_y(grid, m.lam_);
  m.lam_lap_ = laplacian(grid, m.lam_);
  m.finalize();
  return m;
}

double ConformalMetric::lambda(double x, double y) const {
  double r2 = x * x + y * y;
  switch (fam_) {
    case Family::Euclidean:
      return 0.0;
    case Family::Cap:
      return std::log(amp_ / (1.0 + kap_ * r2));
    case Family::Hyperbolic:
      return std::log(amp_ / (1.0 - kap_ * r2));
    case Family::Grid: {
      double rr = std::sqrt(r2);
      if (rr > 1.0) {  // C^0 clamp just outside (integrator stage points)
        x /= rr;
        y /= rr;
      }
      return interp(*lgrid_, lam_, x, y).real();
    }
  }
  return 0.0;
}

Vec2 ConformalMetric::grad_lambda(double x, double y) const {
  double r2 = x * x + y * y;
  switch (fam_) {
    case Family::Euclidean:
      return {0.0, 0.0};
    case Family::Cap: {
      double f = -2.0 * kap_ / (1.0 + kap_ * r2);
      return {f * x, f * y};
    }
    case Family::Hyperbolic: {
      double f = 2.0 * kap_ / (1.0 - kap_ * r2);
      return {f * x, f * y};
    }
    case Family::Grid: {
      double rr = std::sqrt(r2);
      if (rr > 1.0) {
        x /= rr;
        y /= rr;
      }
      return {interp(*lgrid_, lam_x_, x, y).real(), interp(*lgrid_, lam_y_, x, y).real()};
    }
  }
  return {0.0, 0.0};
}

double ConformalMetric::lap_lambda(double x, double y) const {
  double r2 = x * x + y * y;
  switch (fam_) {
    case Family::Euclidean:
      return 0.0;
    case Family::Cap: {
      double d = 1.0 + kap_ * r2;
      return -4.0 * kap_ / (d * d);
    }
    case Family::Hyperbolic: {
      double d = 1.0 - kap_ * r2;
      return 4.0 * kap_ / (d * d);
    }
    case Family::Grid: {
      double rr = std::sqrt(r2);
      if (rr > 1.0) {
        x /= rr;
        y /= rr;
      }
      return interp(*lgrid_, lam_lap_, x, y).real();
    }
  }
  return 0.0;
}

double ConformalMetric::gauss_curvature(double x, double y) const {
  check_domain(x, y);
  return curvature_raw(x, y);
}

double ConformalMetric::curvature_raw(double x, double y) const {
  switch (fam_) {
    case Family::Euclidean:
      return 0.0;
    case Family::Cap:
      return 1.0;
    case Family::Hyperbolic:
      return -1.0;
    case Family::Grid: {
      double e2l = std::exp(2.0 * lambda(x, y));
      return -lap_lambda(x, y) / e2l;
    }
  }
  return 0.0;
}

void ConformalMetric::finalize() {
  // Center chord length and boundary length by composite Simpson.
  const int n = 512;
  double h = 2.0 / n, acc = 0;
  for (int i = 0; i <= n; ++i) {
    double t = -1.0 + i * h;
    double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    acc += w * conf(t, 0.0);
  }
  diameter_hint_ = acc * h / 3.0;

  double bl = 0;
  const int nb = 512;
  for (int j = 0; j < nb; ++j) bl += conf(std::cos(kTwoPi * j / nb), std::sin(kTwoPi * j / nb));
  boundary_length_ = bl * kTwoPi / nb;

  double kb = 0, cs = 0;
  for (int i = 0; i < 24; ++i)
    for (int j = 0; j < 48; ++j) {
      double rr = (i + 0.5) / 24;
      double ph = kTwoPi * j / 48;
      double cx = rr * std::cos(ph), cy = rr * std::sin(ph);
      kb = std::max(kb, std::abs(gauss_curvature(cx, cy)));
      cs = std::max(cs, conf(cx, cy));
    }
  for (int j = 0; j < 128; ++j)
    cs = std::max(cs, conf(std::cos(kTwoPi * j / 128), std::sin(kTwoPi * j / 128)));
  curvature_bound_ = kb;
  conf_sup_ = cs;
}

SimplicityReport simplicity_check(const ConformalMetric& m, int n_boundary, int fan_phi,
                                  int fan_a, double h_frac) {
  SimplicityReport rep;

  // Strict convexity of the boundary circle: k_g = e^{-lambda} (1 + dlambda/dr).
  double min_conv = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n_boundary; ++j) {
    double ph = kTwoPi * j / n_boundary;
    double cx = std::cos(ph), cy = std::sin(ph);
    Vec2 gl = m.grad_lambda(cx, cy);
    min_conv = std::min(min_conv, 1.0 + gl.x() * cx + gl.y() * cy);
  }
  rep.min_boundary_convexity = min_conv;
  rep.convex_boundary = min_conv > 0;

  // Jacobi fields J'' + K J = 0, J(0) = 0, J'(0) = 1 along a coarse fan;
  // a conjugate point shows up as a zero of J in (0, tau].
  GeodesicIntegrator integ(m, h_frac);
  double min_j = std::numeric_limits<double>::infinity();
  bool conjugate = false;
  for (int l = 0; l < fan_phi && !conjugate; ++l)
    for (int k = 0; k < fan_a; ++k) {
      BoundaryFan f;
      f.phi = kTwoPi * l / fan_phi;
      f.a = -kPi / 2 + (k + 0.5) * kPi / fan_a;
      JacobiResult jr = integ.jacobi_along(f);
      min_j = std::min(min_j, jr.min_scaled);
      if (jr.vanished) {
        conjugate = true;
        break;
      }
    }
  rep.min_jacobi = min_j;
  rep.no_conjugate_points = !conjugate;
  rep.pass = rep.convex_boundary && rep.no_conjugate_points;
  rep.message = rep.pass                ? "simple"
                : !rep.convex_boundary  ? "boundary not strictly convex"
                                        : "conjugate point on a fan geodesic";
  return rep;
}

}  // namespace argt
