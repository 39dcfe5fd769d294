#include "argt/geodesic.hpp"

#include <cmath>

namespace argt {

GeodesicIntegrator::GeodesicIntegrator(const ConformalMetric& m, double h_frac) : m_(&m) {
  h_ = h_frac * m.tau_bound();
  max_steps_ = static_cast<int>(std::ceil(2.0 * m.tau_bound() / h_)) + 16;
}

GeodesicIntegrator::State GeodesicIntegrator::rhs(const State& s, bool with_jacobi) const {
  double el = std::exp(-m_->lambda(s.x1, s.x2));
  double c = std::cos(s.th), sn = std::sin(s.th);
  Vec2 gl = m_->grad_lambda(s.x1, s.x2);
  State d;
  d.x1 = el * c;
  d.x2 = el * sn;
  d.th = el * (-gl.x() * sn + gl.y() * c);
  if (with_jacobi) {
    d.J = s.dJ;
    d.dJ = -m_->curvature_raw(s.x1, s.x2) * s.J;
  } else {
    d.J = d.dJ = 0;
  }
  return d;
}

GeodesicIntegrator::State GeodesicIntegrator::rk4(const State& s, double dt,
                                                  bool with_jacobi) const {
  auto axpy = [](const State& a, double c, const State& b) {
    return State{a.x1 + c * b.x1, a.x2 + c * b.x2, a.th + c * b.th, a.J + c * b.J,
                 a.dJ + c * b.dJ};
  };
  State k1 = rhs(s, with_jacobi);
  State k2 = rhs(axpy(s, dt / 2, k1), with_jacobi);
  State k3 = rhs(axpy(s, dt / 2, k2), with_jacobi);
  State k4 = rhs(axpy(s, dt, k3), with_jacobi);
  State out = s;
  out.x1 += dt / 6 * (k1.x1 + 2 * k2.x1 + 2 * k3.x1 + k4.x1);
  out.x2 += dt / 6 * (k1.x2 + 2 * k2.x2 + 2 * k3.x2 + k4.x2);
  out.th += dt / 6 * (k1.th + 2 * k2.th + 2 * k3.th + k4.th);
  out.J += dt / 6 * (k1.J + 2 * k2.J + 2 * k3.J + k4.J);
  out.dJ += dt / 6 * (k1.dJ + 2 * k2.dJ + 2 * k3.dJ + k4.dJ);
  return out;
}

GeodesicTrace GeodesicIntegrator::run(State s, bool reversed) const {
  GeodesicTrace tr;
  tr.h = h_;
  tr.t.push_back(0);
  tr.x.push_back({s.x1, s.x2});
  tr.theta.push_back(s.th);

  auto r2 = [](const State& q) { return q.x1 * q.x1 + q.x2 * q.x2; };
  double t = 0;
  for (int step = 0;; ++step) {
    if (step > max_steps_)
      throw std::runtime_error(
          "geodesic integration did not terminate (non-simple metric or step too large)");
    State nxt = rk4(s, h_, false);
    if (r2(nxt) >= 1.0) {
      // Bisect the crossing time within (0, h]; the trace starts strictly
      // inside except at t = 0, where the ray points inward.
      double lo = (step == 0) ? 1e-9 * h_ : 0.0;
      double hi = h_;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if (r2(rk4(s, mid, false)) >= 1.0)
          hi = mid;
        else
          lo = mid;
        if (hi - lo < 1e-14 * h_) break;
      }
      State fin = rk4(s, hi, false);
      double rn = std::sqrt(r2(fin));
      fin.x1 /= rn;  // place the endpoint on the boundary exactly
      fin.x2 /= rn;
      tr.t.push_back(t + hi);
      tr.x.push_back({fin.x1, fin.x2});
      tr.theta.push_back(fin.th);
      tr.tau = t + hi;
      break;
    }
    s = nxt;
    t += h_;
    tr.t.push_back(t);
    tr.x.push_back({s.x1, s.x2});
    tr.theta.push_back(s.th);
  }

  if (reversed) {
    GeodesicTrace rev;
    rev.h = tr.h;
    rev.tau = tr.tau;
    const int n = static_cast<int>(tr.t.size());
    rev.t.resize(n);
    rev.x.resize(n);
    rev.theta.resize(n);
    for (int i = 0; i < n; ++i) {
      rev.t[i] = tr.tau - tr.t[n - 1 - i];
      rev.x[i] = tr.x[n - 1 - i];
      rev.theta[i] = wrap_2pi(tr.theta[n - 1 - i] + kPi);
    }
    return rev;
  }
  return tr;
}

GeodesicTrace GeodesicIntegrator::trace_from_boundary(const BoundaryFan& f) const {
  State s{std::cos(f.phi), std::sin(f.phi), f.theta(), 0, 0};
  return run(s, false);
}

GeodesicTrace GeodesicIntegrator::trace_to_exit(const PhasePoint& p) const {
  State s{p.x.x(), p.x.y(), p.theta, 0, 0};
  return run(s, false);
}

GeodesicTrace GeodesicIntegrator::trace_to_entry(const PhasePoint& p) const {
  State s{p.x.x(), p.x.y(), wrap_2pi(p.theta + kPi), 0, 0};
  // The reversed run flips directions back, so the result is parametrized
  // forward from the entry point and ends at p.
  return run(s, true);
}

PhasePoint GeodesicIntegrator::advance(const PhasePoint& p, double dt, int substeps) const {
  State s{p.x.x(), p.x.y(), p.theta, 0, 0};
  double sub = dt / substeps;
  for (int i = 0; i < substeps; ++i) s = rk4(s, sub, false);
  return PhasePoint{{s.x1, s.x2}, s.th};
}

ExitPoint GeodesicIntegrator::exit_of(const GeodesicTrace& tr) const {
  ExitPoint e;
  e.x = tr.x.back();
  e.theta = wrap_2pi(tr.theta.back());
  e.phi = wrap_2pi(std::atan2(e.x.y(), e.x.x()));
  e.a_out = wrap_pi(e.theta - e.phi);
  e.tau = tr.tau;
  return e;
}

JacobiResult GeodesicIntegrator::jacobi_along(const BoundaryFan& f) const {
  State s{std::cos(f.phi), std::sin(f.phi), f.theta(), 0, 1};
  JacobiResult out;
  auto r2 = [](const State& q) { return q.x1 * q.x1 + q.x2 * q.x2; };
  double t = 0;
  double min_scaled = std::numeric_limits<double>::infinity();
  for (int step = 0;; ++step) {
    if (step > max_steps_)
      throw std::runtime_error("jacobi integration did not terminate");
    State nxt = rk4(s, h_, true);
    bool exits = r2(nxt) >= 1.0 && step > 0;
    double tn = t + h_;
    if (tn > h_) {
      min_scaled = std::min(min_scaled, nxt.J / std::max(tn, h_));
      if (nxt.J <= 0) {
        out.vanished = true;
        out.min_scaled = min_scaled;
        out.tau = tn;
        return out;
      }
    }
    if (exits) {
      out.tau = tn;
      break;
    }
    s = nxt;
    t = tn;
  }
  out.min_scaled = min_scaled;
  return out;
}

ExitPoint scattering_relation(const GeodesicIntegrator& integ, const BoundaryFan& f) {
  return integ.exit_of(integ.trace_from_boundary(f));
}

BoundaryFan reverse_of_exit(const ExitPoint& e) {
  BoundaryFan f;
  f.phi = e.phi;
  f.a = -e.a_out;
  f.s = 0;
  return f;
}

double mu_density(const ConformalMetric& m, const BoundaryFan& f) {
  return std::cos(f.a) * m.conf(std::cos(f.phi), std::sin(f.phi));
}

FanGrid::FanGrid(int nphi_, int na_, double delta_) : nphi(nphi_), na(na_), delta(delta_) {
  if (nphi < 4 || na < 4) throw std::invalid_argument("FanGrid: too coarse");
  dphi = kTwoPi / nphi;
  da = kPi / na;
  phis.resize(nphi);
  as.resize(na);
  for (int l = 0; l < nphi; ++l) phis[l] = l * dphi;
  for (int k = 0; k < na; ++k) as[k] = -kPi / 2 + (k + 0.5) * da;
}

BoundaryFan FanGrid::point(int l, int k) const {
  BoundaryFan f;
  f.phi = phis[l];
  f.a = as[k];
  f.s = f.phi;  // overwritten by callers that track metric arclength
  return f;
}

double FanGrid::mu_weight(const ConformalMetric& m, int l, int k) const {
  return mu_density(m, point(l, k)) * dphi * da;
}

}  // namespace argt
