// Attenuated transport along geodesics: the unitary propagator U_A, scattering
// data (alpha, C_A, D_A), the attenuated ray transform I_A, transport solves,
// the invariant extension w#, and the boundary operators Q and B.
#pragma once

#include "argt/fiber.hpp"
#include "argt/geodesic.hpp"

namespace argt {

// C^n-valued function on the influx fan; optional closed form for exact
// evaluation at scattered entry points.
struct BoundaryFn {
  int n = 0;
  FanGrid fan;
  std::vector<Eigen::ArrayXXcd> vals;  // per component, (nphi, na)
  std::function<CVec(const BoundaryFan&)> analytic;

  BoundaryFn() = default;
  BoundaryFn(int n_, const FanGrid& f)
      : n(n_), fan(f), vals(n_, Eigen::ArrayXXcd::Zero(f.nphi, f.na)) {}
  static BoundaryFn from_analytic(int n, const FanGrid& f,
                                  std::function<CVec(const BoundaryFan&)> fn);

  // Closed form if present, else periodic-cubic x cubic interpolation of the
  // samples (zero beyond the sampled incidence range).
  CVec eval(const BoundaryFan& p) const;
  CVec node(int l, int k) const;
  void set_node(int l, int k, const CVec& v);
  void materialize();  // fill vals from analytic

  double sup() const;
  // Largest magnitude within the glancing margin |a| > pi/2 - delta.
  double glancing_sup(double delta) const;
};

cd inner_mu(const ConformalMetric& m, const BoundaryFn& u, const BoundaryFn& w);
double norm_mu(const ConformalMetric& m, const BoundaryFn& u);

// Joint geodesic + propagator integration result.
struct PropagatedTrace {
  GeodesicTrace trace;
  std::vector<CMat> U;  // U(t) at trace samples, U(0) = Id, re-unitarized
  CMat exitU;           // U(tau)
};

struct TransportOptions {
  double h_frac = 1.0 / 2048;   // fan / boundary integrations
  double h_frac_int = 1.0 / 512;  // interior table integrations
};

PropagatedTrace propagate(const GeodesicIntegrator& integ, const Connection& A,
                          const BoundaryFan& start);
PropagatedTrace propagate_phase(const GeodesicIntegrator& integ, const Connection& A,
                                const PhasePoint& start);

// Scattering data on the fan grids. Efflux nodes use the same (phi, a) grid
// shape, with a read as the efflux incidence from the outer normal.
struct ScatteringData {
  int n = 0;
  FanGrid fan;
  // Forward sweep over influx nodes:
  std::vector<ExitPoint> alpha;  // exit of the node's geodesic
  std::vector<CMat> C_exit;      // C_A at alpha(node)
  std::vector<CMat> D;           // D_A at the node (independent reversed solve)
  // Backward sweep over efflux nodes:
  std::vector<BoundaryFan> entry;  // influx coordinates of the ray through the node
  std::vector<CMat> C_at;          // C_A at the efflux node
  std::vector<double> tau_b;       // exit time of the reversed ray

  double max_unitarity_defect = 0;
};

ScatteringData scattering_data(const GeodesicIntegrator& integ, const Connection& A,
                               const FanGrid& fan);

// Ray transform of a phase-space integrand f(x, y, theta) -> C^n.
using SmFunction = std::function<CVec(double, double, double)>;

BoundaryFn ray_transform(const GeodesicIntegrator& integ, const Connection& A,
                         const FanGrid& fan, const SmFunction& f);
// Single-ray version (also the transport solve u^f at a phase point).
CVec ray_transform_one(const GeodesicIntegrator& integ, const Connection& A,
                       const BoundaryFan& start, const SmFunction& f);
CVec transport_solve_at(const GeodesicIntegrator& integ, const Connection& A,
                        const PhasePoint& p, const SmFunction& f);

// Per-(node, direction) backward table: entry coordinates and U_A(x, v),
// enough to apply w -> w#(x, v) = U_A(x,v) w(entry) for any w.
class InteriorTable {
 public:
  InteriorTable() = default;
  InteriorTable(const DiskContext& ctx, const Connection& A, int ntheta,
                double h_frac = 1.0 / 512);

  int ntheta() const { return ntheta_; }
  int n() const { return n_; }
  double theta(int s) const { return kTwoPi * s / ntheta_; }

  BoundaryFan entry(int i, int j, int s) const;
  CMat U(int i, int j, int s) const;
  double tau_back(int i, int j, int s) const;
  // Forward exit time tau(x, v) = backward time of the opposite direction.
  double tau_fwd(int i, int j, int s) const { return tau_back(i, j, (s + ntheta_ / 2) % ntheta_); }

  CVec sharp_at(const BoundaryFn& w, int i, int j, int s) const;
  // Selected fibre modes of w#: for each requested k, the field
  // (1/ntheta) sum_s w#(x, theta_s) e^{-i k theta_s}.
  std::vector<VField> sharp_modes(const DiskContext& ctx, const BoundaryFn& w,
                                  const std::vector<int>& ks) const;
  FiberFn sharp_full(const DiskContext& ctx, const BoundaryFn& w, int kmax) const;

 private:
  int nr_ = 0, nphi_ = 0, ntheta_ = 0, n_ = 0;
  std::vector<double> phi_e_, a_e_, tau_b_;
  std::vector<cd> U_;  // (cell, n^2) row-major
  int cell(int i, int j, int s) const { return (i * nphi_ + j) * ntheta_ + s; }
};

// Values of a function on the full boundary circle bundle, sampled on the
// glued influx+efflux ring (uniform in theta at every boundary node).
struct BoundaryRing {
  int n = 0;
  FanGrid fan;
  // ring index m in [0, 2 na): theta = phi_l + pi/2 + da/2 + m da.
  std::vector<Eigen::ArrayXXcd> vals;   // per component (nphi, 2na)
  std::vector<Eigen::ArrayXXcd> coefs;  // per component (nphi, 2na), mode index k + na

  BoundaryRing() = default;
  BoundaryRing(int n_, const FanGrid& f)
      : n(n_), fan(f), vals(n_, Eigen::ArrayXXcd::Zero(f.nphi, 2 * f.na)) {}

  double theta_of(int l, int m) const {
    return wrap_2pi(fan.phis[l] + kPi / 2 + fan.da / 2 + m * fan.da);
  }
  // Ring index of the influx direction of fan cell (l, k): a = as[k].
  int m_influx(int k) const { return fan.na - 1 - k; }
  int m_efflux(int k) const { return fan.na + k; }

  void compute_coefficients();
  // Fibrewise synthesis at boundary angle phi (periodic cubic across nodes).
  CVec eval(double phi, double theta) const;
  CVec eval_node(int l, double theta) const;
};

// Q: extend an influx function to the whole boundary by the attenuated flow.
BoundaryRing operator_Q(const ScatteringData& sd, const BoundaryFn& w);
// B g = [(C_A^{-1} g) o alpha - g]|influx.
BoundaryFn operator_B(const ScatteringData& sd, const BoundaryRing& g);
// Fibrewise Hilbert transform on the ring, restricted to even/odd degrees
// (parity +1 = even, -1 = odd, 0 = all).
BoundaryRing ring_hilbert(const BoundaryRing& g, int parity);

}  // namespace argt
