// Geodesic flow on SM for conformal disk metrics: unit-speed integration in
// (x, theta), exit-time refinement, scattering relation, fan parametrization
// of the influx boundary, and the boundary measure.
#pragma once

#include <vector>

#include "argt/metric.hpp"

namespace argt {

// Phase point: position in the closed disk plus direction angle theta of the
// g-unit vector v = e^{-lambda} (cos theta, sin theta).
struct PhasePoint {
  Vec2 x{0, 0};
  double theta = 0;
};

// Fan coordinates on the influx boundary: boundary angle phi (base point
// (cos phi, sin phi)), incidence a in (-pi/2, pi/2) measured so that
// theta = phi + pi - a; s is the g-arclength of the base point.
struct BoundaryFan {
  double phi = 0;
  double a = 0;
  double s = 0;
  double theta() const { return wrap_2pi(phi + kPi - a); }
};

struct GeodesicTrace {
  std::vector<double> t;
  std::vector<Vec2> x;
  std::vector<double> theta;
  double tau = 0;
  // All but the final interval have the integrator's uniform step.
  double h = 0;
};

struct ExitPoint {
  Vec2 x{0, 0};
  double theta = 0;  // direction at exit
  double phi = 0;    // boundary angle of the exit base point
  double a_out = 0;  // wrap_pi(theta - phi), efflux incidence from the outer normal
  double tau = 0;
};

struct JacobiResult {
  bool vanished = false;   // J hit zero on (0, tau]
  double min_scaled = 0;   // min over t of J(t)/max(t, h)
  double tau = 0;
};

class GeodesicIntegrator {
 public:
  // h = h_frac * diameter_hint (classical fixed-step RK4).
  GeodesicIntegrator(const ConformalMetric& m, double h_frac = 1.0 / 2048);

  double step() const { return h_; }
  const ConformalMetric& metric() const { return *m_; }

  // Forward trace from an influx boundary point until the first exit.
  GeodesicTrace trace_from_boundary(const BoundaryFan& f) const;
  // Trace through an interior phase point, backward in time to the entry
  // point (returned trace is parametrized forward from the entry, ending at
  // the given point; trace.tau is the backward exit time tau(x, -v)).
  GeodesicTrace trace_to_entry(const PhasePoint& p) const;
  // Forward trace from an interior phase point to the exit.
  GeodesicTrace trace_to_exit(const PhasePoint& p) const;

  ExitPoint exit_of(const GeodesicTrace& tr) const;
  JacobiResult jacobi_along(const BoundaryFan& f) const;

  // Short local flow step (both signs of dt); used by flow-derivative oracles.
  PhasePoint advance(const PhasePoint& p, double dt, int substeps = 2) const;

 private:
  struct State {
    double x1, x2, th, J = 0, dJ = 1;
  };
  State rhs(const State& s, bool with_jacobi) const;
  State rk4(const State& s, double dt, bool with_jacobi) const;
  GeodesicTrace run(State s, bool reversed) const;

  const ConformalMetric* m_;
  double h_;
  int max_steps_;
};

ExitPoint scattering_relation(const GeodesicIntegrator& integ, const BoundaryFan& f);

// Entry fan coordinates of the time-reversed ray from an efflux point
// (boundary angle phi, efflux incidence a_out).
BoundaryFan reverse_of_exit(const ExitPoint& e);

// d mu = |<v, nu>| dSigma^2 density on the influx fan: cos(a) e^{lambda}.
double mu_density(const ConformalMetric& m, const BoundaryFan& f);

// Uniform fan grid: boundary angles phi_l, incidence cell midpoints a_k over
// the full range (-pi/2, pi/2); delta is the glancing margin used by
// margin-supported test functions.
struct FanGrid {
  int nphi = 0, na = 0;
  double delta = 0.05;
  std::vector<double> phis, as;
  double dphi = 0, da = 0;

  FanGrid() = default;
  FanGrid(int nphi_, int na_, double delta_ = 0.05);
  BoundaryFan point(int l, int k) const;
  int index(int l, int k) const { return l * na + k; }
  int size() const { return nphi * na; }
  // |<v,nu>| dSigma^2 quadrature weight of cell (l,k).
  double mu_weight(const ConformalMetric& m, int l, int k) const;
};

}  // namespace argt
