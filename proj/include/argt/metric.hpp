// Simple disk metrics g = e^{2 lambda} (dx1^2 + dx2^2) on the closed unit disk.
#pragma once

#include <optional>
#include <string>

#include "argt/grid.hpp"

namespace argt {

class ConformalMetric {
 public:
  enum class Family { Euclidean, Cap, Hyperbolic, Grid };

  static ConformalMetric euclidean();
  // Pullback to the unit disk of the curvature +1 (cap) / -1 (hyperbolic)
  // factor 2 sqrt(kappa)/(1 +- kappa |y|^2) on the sub-disk |y| <= R, y = R x.
  static ConformalMetric cap(double kappa, double disk_radius);
  static ConformalMetric hyperbolic(double kappa, double disk_radius);
  static ConformalMetric from_grid(const PolarGrid& grid, const RField& lambda_samples);

  Family family() const { return fam_; }

  double lambda(double x, double y) const;
  Vec2 grad_lambda(double x, double y) const;
  double lap_lambda(double x, double y) const;
  double conf(double x, double y) const { return std::exp(lambda(x, y)); }

  // K = -e^{-2 lambda} lap(lambda); throws outside the closed disk.
  double gauss_curvature(double x, double y) const;
  // Same value without the domain check (integrator stage points).
  double curvature_raw(double x, double y) const;
  double curvature_bound() const { return curvature_bound_; }

  // Length of the center chord; integration bound scale for exit times.
  double diameter_hint() const { return diameter_hint_; }
  double boundary_length() const { return boundary_length_; }
  // Rigorous exit-time bound: g-length of any chord is at most 2 sup e^lambda.
  double tau_bound() const { return 2.0 * conf_sup_; }

 private:
  ConformalMetric() = default;
  void finalize();

  Family fam_ = Family::Euclidean;
  double kap_ = 0;   // effective kappa * R^2 in the pulled-back factor
  double amp_ = 1;   // 2 sqrt(kappa) R
  double curvature_bound_ = 0;
  double diameter_hint_ = 2.0;
  double boundary_length_ = kTwoPi;
  double conf_sup_ = 1.0;

  // Grid family: sampled lambda and its finite-difference derivatives.
  std::optional<PolarGrid> lgrid_;
  CField lam_, lam_x_, lam_y_, lam_lap_;
};

struct SimplicityReport {
  bool pass = false;
  bool convex_boundary = false;
  bool no_conjugate_points = false;
  double min_boundary_convexity = 0;  // min over samples of 1 + d lambda/dr at r=1
  double min_jacobi = 0;              // min over fan of min_t J(t)/max(t, h)
  std::string message;
};

SimplicityReport simplicity_check(const ConformalMetric& m, int n_boundary = 128,
                                  int fan_phi = 48, int fan_a = 24,
                                  double h_frac = 1.0 / 512);

}  // namespace argt
