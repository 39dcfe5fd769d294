#include "argt/transport.hpp"

#include <cmath>

namespace argt {

namespace {

CMat reunitarize(const CMat& U) {
  if (U.rows() == 1) {
    CMat out(1, 1);
    double m = std::abs(U(0, 0));
    out(0, 0) = (m > 0) ? U(0, 0) / m : cd(1, 0);
    return out;
  }
  // Newton iteration for the polar factor; two steps suffice near U(n).
  CMat V = U;
  for (int it = 0; it < 2; ++it) V = 0.5 * (V + V.adjoint().inverse());
  return V;
}

double unitarity_defect(const CMat& U) {
  CMat D = U.adjoint() * U - CMat::Identity(U.rows(), U.cols());
  return D.norm();
}

// 4th-order-ish composite rule on samples at uniform step h plus a final
// partial interval of length tail (trapezoid there). Weights sum to the
// interval length exactly, so constants integrate exactly.
std::vector<double> quad_weights(int nsamples, double h, double tail) {
  const int M = nsamples - 1;  // index of the last (boundary) sample
  int rem = M - 1;             // uniform intervals before the partial one
  std::vector<double> w(nsamples, 0.0);
  int i = 0;
  if (rem % 2 == 1) {
    if (rem >= 3) {  // 3/8 rule on the first three intervals
      w[0] += 3.0 * h / 8;
      w[1] += 9.0 * h / 8;
      w[2] += 9.0 * h / 8;
      w[3] += 3.0 * h / 8;
      i = 3;
      rem -= 3;
    } else {
      w[0] += h / 2;
      w[1] += h / 2;
      i = 1;
      rem = 0;
    }
  }
  for (; rem >= 2; i += 2, rem -= 2) {
    w[i] += h / 3;
    w[i + 1] += 4.0 * h / 3;
    w[i + 2] += h / 3;
  }
  if (M >= 1) {  // trapezoid on the refined final interval
    w[M - 1] += tail / 2;
    w[M] += tail / 2;
  }
  return w;
}

struct JState {
  double x1, x2, th;
  CMat U;
};

}  // namespace

BoundaryFn BoundaryFn::from_analytic(int n_, const FanGrid& f,
                                     std::function<CVec(const BoundaryFan&)> fn) {
  BoundaryFn out(n_, f);
  out.analytic = std::move(fn);
  out.materialize();
  return out;
}

void BoundaryFn::materialize() {
  if (!analytic) return;
  for (int l = 0; l < fan.nphi; ++l)
    for (int k = 0; k < fan.na; ++k) {
      CVec v = analytic(fan.point(l, k));
      for (int a = 0; a < n; ++a) vals[a](l, k) = v[a];
    }
}

CVec BoundaryFn::node(int l, int k) const {
  CVec v(n);
  for (int a = 0; a < n; ++a) v[a] = vals[a](l, k);
  return v;
}

void BoundaryFn::set_node(int l, int k, const CVec& v) {
  for (int a = 0; a < n; ++a) vals[a](l, k) = v[a];
}

CVec BoundaryFn::eval(const BoundaryFan& p) const {
  if (analytic) return analytic(p);
  CVec out = CVec::Zero(n);
  // Incidence coordinate on midpoint cells, zero outside the sampled range.
  double u = (p.a + kPi / 2) / fan.da - 0.5;
  int k0 = static_cast<int>(std::floor(u)) - 1;
  double v = p.phi / fan.dphi;
  int l0 = static_cast<int>(std::floor(v)) - 1;
  double wl[4], wk[4];
  for (int t = 0; t < 4; ++t) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != t) w *= (v - (l0 + b)) / double(t - b);
    wl[t] = w;
    w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != t) w *= (u - (k0 + b)) / double(t - b);
    wk[t] = w;
  }
  for (int a = 0; a < n; ++a) {
    cd acc = 0;
    for (int tk = 0; tk < 4; ++tk) {
      int kk = k0 + tk;
      if (kk < 0 || kk >= fan.na) continue;  // margin-supported extension
      cd line = 0;
      for (int tl = 0; tl < 4; ++tl) {
        int ll = ((l0 + tl) % fan.nphi + fan.nphi) % fan.nphi;
        line += wl[tl] * vals[a](ll, kk);
      }
      acc += wk[tk] * line;
    }
    out[a] = acc;
  }
  return out;
}

double BoundaryFn::sup() const {
  double m = 0;
  for (const auto& v : vals) m = std::max(m, v.abs().maxCoeff());
  return m;
}

double BoundaryFn::glancing_sup(double delta) const {
  double m = 0;
  for (int l = 0; l < fan.nphi; ++l)
    for (int k = 0; k < fan.na; ++k) {
      if (std::abs(fan.as[k]) < kPi / 2 - delta) continue;
      for (int a = 0; a < n; ++a) m = std::max(m, std::abs(vals[a](l, k)));
    }
  return m;
}

cd inner_mu(const ConformalMetric& m, const BoundaryFn& u, const BoundaryFn& w) {
  cd acc = 0;
  for (int l = 0; l < u.fan.nphi; ++l)
    for (int k = 0; k < u.fan.na; ++k) {
      double wt = u.fan.mu_weight(m, l, k);
      for (int a = 0; a < u.n; ++a) acc += u.vals[a](l, k) * std::conj(w.vals[a](l, k)) * wt;
    }
  return acc;
}

double norm_mu(const ConformalMetric& m, const BoundaryFn& u) {
  return std::sqrt(std::abs(inner_mu(m, u, u)));
}

namespace {

struct ExitResult {
  ExitPoint exit;
  CMat U;       // exit propagator
  double tau = 0;
};

// Core stepping shared by the storing and exit-only paths.
ExitResult propagate_core(const GeodesicIntegrator& integ, const Connection& A, JState s,
                          PropagatedTrace* store) {
  const ConformalMetric& m = integ.metric();
  const double h = integ.step();
  const int max_steps = static_cast<int>(std::ceil(2.0 * m.tau_bound() / h)) + 16;

  auto rhs = [&](const JState& q, JState& d) {
    double el = std::exp(-m.lambda(q.x1, q.x2));
    double c = std::cos(q.th), sn = std::sin(q.th);
    Vec2 gl = m.grad_lambda(q.x1, q.x2);
    d.x1 = el * c;
    d.x2 = el * sn;
    d.th = el * (-gl.x() * sn + gl.y() * c);
    CMat A1, A2;
    A.components(q.x1, q.x2, A1, A2);
    d.U = -el * (c * A1 + sn * A2) * q.U;
  };
  auto rk4 = [&](const JState& q, double dt) {
    JState k1, k2, k3, k4, tmp;
    rhs(q, k1);
    tmp = {q.x1 + dt / 2 * k1.x1, q.x2 + dt / 2 * k1.x2, q.th + dt / 2 * k1.th,
           q.U + dt / 2 * k1.U};
    rhs(tmp, k2);
    tmp = {q.x1 + dt / 2 * k2.x1, q.x2 + dt / 2 * k2.x2, q.th + dt / 2 * k2.th,
           q.U + dt / 2 * k2.U};
    rhs(tmp, k3);
    tmp = {q.x1 + dt * k3.x1, q.x2 + dt * k3.x2, q.th + dt * k3.th, q.U + dt * k3.U};
    rhs(tmp, k4);
    JState out = q;
    out.x1 += dt / 6 * (k1.x1 + 2 * k2.x1 + 2 * k3.x1 + k4.x1);
    out.x2 += dt / 6 * (k1.x2 + 2 * k2.x2 + 2 * k3.x2 + k4.x2);
    out.th += dt / 6 * (k1.th + 2 * k2.th + 2 * k3.th + k4.th);
    out.U += dt / 6 * (k1.U + 2 * k2.U + 2 * k3.U + k4.U);
    return out;
  };
  auto r2 = [](const JState& q) { return q.x1 * q.x1 + q.x2 * q.x2; };

  if (store) {
    store->trace.h = h;
    store->trace.t.reserve(max_steps + 2);
    store->trace.x.reserve(max_steps + 2);
    store->trace.theta.reserve(max_steps + 2);
    store->U.reserve(max_steps + 2);
    store->trace.t.push_back(0);
    store->trace.x.push_back({s.x1, s.x2});
    store->trace.theta.push_back(s.th);
    store->U.push_back(s.U);
  }

  ExitResult out;
  double t = 0;
  for (int step = 0;; ++step) {
    if (step > max_steps)
      throw std::runtime_error("transport integration did not terminate");
    JState nxt = rk4(s, h);
    nxt.U = reunitarize(nxt.U);
    if (r2(nxt) >= 1.0) {
      double lo = (step == 0) ? 1e-9 * h : 0.0, hi = h;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        JState probe = rk4(s, mid);
        if (r2(probe) >= 1.0)
          hi = mid;
        else
          lo = mid;
        if (hi - lo < 1e-14 * h) break;
      }
      JState fin = rk4(s, hi);
      fin.U = reunitarize(fin.U);
      double rn = std::sqrt(r2(fin));
      fin.x1 /= rn;
      fin.x2 /= rn;
      out.tau = t + hi;
      out.U = fin.U;
      out.exit.x = {fin.x1, fin.x2};
      out.exit.theta = wrap_2pi(fin.th);
      out.exit.phi = wrap_2pi(std::atan2(fin.x2, fin.x1));
      out.exit.a_out = wrap_pi(out.exit.theta - out.exit.phi);
      out.exit.tau = out.tau;
      if (store) {
        store->trace.t.push_back(out.tau);
        store->trace.x.push_back({fin.x1, fin.x2});
        store->trace.theta.push_back(fin.th);
        store->U.push_back(fin.U);
        store->trace.tau = out.tau;
        store->exitU = fin.U;
      }
      break;
    }
    s = nxt;
    t += h;
    if (store) {
      store->trace.t.push_back(t);
      store->trace.x.push_back({s.x1, s.x2});
      store->trace.theta.push_back(s.th);
      store->U.push_back(s.U);
    }
  }
  return out;
}

}  // namespace

PropagatedTrace propagate(const GeodesicIntegrator& integ, const Connection& A,
                          const BoundaryFan& start) {
  JState s{std::cos(start.phi), std::sin(start.phi), start.theta(),
           CMat::Identity(A.n(), A.n())};
  PropagatedTrace out;
  propagate_core(integ, A, s, &out);
  return out;
}

PropagatedTrace propagate_phase(const GeodesicIntegrator& integ, const Connection& A,
                                const PhasePoint& start) {
  JState s{start.x.x(), start.x.y(), start.theta, CMat::Identity(A.n(), A.n())};
  PropagatedTrace out;
  propagate_core(integ, A, s, &out);
  return out;
}

ScatteringData scattering_data(const GeodesicIntegrator& integ, const Connection& A,
                               const FanGrid& fan) {
  ScatteringData sd;
  sd.n = A.n();
  sd.fan = fan;
  const int N = fan.size();
  sd.alpha.resize(N);
  sd.C_exit.resize(N);
  sd.D.resize(N);
  sd.entry.resize(N);
  sd.C_at.resize(N);
  sd.tau_b.resize(N);
  std::vector<double> defects(N, 0.0);

  parallel_for(N, [&](int idx) {
    int l = idx / fan.na, k = idx % fan.na;
    PropagatedTrace pt = propagate(integ, A, fan.point(l, k));
    sd.alpha[idx] = integ.exit_of(pt.trace);
    sd.C_exit[idx] = pt.exitU;
    double d = 0;
    for (const auto& U : pt.U) d = std::max(d, unitarity_defect(U));

    // Independent reversed-boundary-condition solve for D_A: integrate along
    // the time-reversed ray from the exit; its exit value is U(tau)^{-1}.
    BoundaryFan rev = reverse_of_exit(sd.alpha[idx]);
    JState bs{std::cos(rev.phi), std::sin(rev.phi), rev.theta(),
              CMat::Identity(sd.n, sd.n)};
    ExitResult back = propagate_core(integ, A, bs, nullptr);
    sd.D[idx] = back.U;
    d = std::max(d, unitarity_defect(back.U));
    defects[idx] = d;
  });

  parallel_for(N, [&](int idx) {
    int l = idx / fan.na, k = idx % fan.na;
    // Efflux node: boundary angle phi_l, outgoing direction phi_l + a_k.
    double phi = fan.phis[l], a_out = fan.as[k];
    JState bs{std::cos(phi), std::sin(phi), wrap_2pi(phi + a_out + kPi),
              CMat::Identity(sd.n, sd.n)};
    ExitResult back = propagate_core(integ, A, bs, nullptr);
    sd.entry[idx] = reverse_of_exit(back.exit);
    sd.C_at[idx] = back.U.adjoint();  // U_A at the efflux node
    sd.tau_b[idx] = back.tau;
  });

  double worst = 0;
  for (double d : defects) worst = std::max(worst, d);
  sd.max_unitarity_defect = worst;
  return sd;
}

namespace {

CVec integrate_ray(const PropagatedTrace& pt, const SmFunction& f) {
  const int M = static_cast<int>(pt.trace.t.size());
  const int n = static_cast<int>(pt.U[0].rows());
  double tail = pt.trace.t[M - 1] - pt.trace.t[M - 2];
  std::vector<double> w = quad_weights(M, pt.trace.h, tail);
  CVec acc = CVec::Zero(n);
  for (int i = 0; i < M; ++i) {
    if (w[i] == 0.0) continue;
    CVec fv = f(pt.trace.x[i].x(), pt.trace.x[i].y(), pt.trace.theta[i]);
    acc += w[i] * (pt.U[i].adjoint() * fv);  // U unitary: inverse = adjoint
  }
  return acc;
}

}  // namespace

CVec ray_transform_one(const GeodesicIntegrator& integ, const Connection& A,
                       const BoundaryFan& start, const SmFunction& f) {
  PropagatedTrace pt = propagate(integ, A, start);
  return integrate_ray(pt, f);
}

CVec transport_solve_at(const GeodesicIntegrator& integ, const Connection& A,
                        const PhasePoint& p, const SmFunction& f) {
  PropagatedTrace pt = propagate_phase(integ, A, p);
  return integrate_ray(pt, f);
}

BoundaryFn ray_transform(const GeodesicIntegrator& integ, const Connection& A,
                         const FanGrid& fan, const SmFunction& f) {
  BoundaryFn out(A.n(), fan);
  const int N = fan.size();
  std::vector<CVec> slots(N);
  parallel_for(N, [&](int idx) {
    int l = idx / fan.na, k = idx % fan.na;
    slots[idx] = ray_transform_one(integ, A, fan.point(l, k), f);
  });
  for (int idx = 0; idx < N; ++idx) out.set_node(idx / fan.na, idx % fan.na, slots[idx]);
  return out;
}

InteriorTable::InteriorTable(const DiskContext& ctx, const Connection& A, int ntheta,
                             double h_frac) {
  nr_ = ctx.grid.nr;
  nphi_ = ctx.grid.nphi;
  ntheta_ = ntheta;
  n_ = A.n();
  if (ntheta % 2 != 0) throw std::invalid_argument("InteriorTable: ntheta must be even");
  const int cells = nr_ * nphi_ * ntheta_;
  phi_e_.resize(cells);
  a_e_.resize(cells);
  tau_b_.resize(cells);
  U_.resize(static_cast<size_t>(cells) * n_ * n_);

  GeodesicIntegrator integ(*ctx.metric, h_frac);
  parallel_for(nr_ * nphi_, [&](int node) {
    int i = node / nphi_, j = node % nphi_;
    Vec2 p = ctx.grid.node(i, j);
    for (int s = 0; s < ntheta_; ++s) {
      double th = kTwoPi * s / ntheta_;
      JState bs{p.x(), p.y(), wrap_2pi(th + kPi), CMat::Identity(n_, n_)};
      ExitResult back = propagate_core(integ, A, bs, nullptr);
      BoundaryFan ent = reverse_of_exit(back.exit);
      int c = cell(i, j, s);
      phi_e_[c] = ent.phi;
      a_e_[c] = ent.a;
      tau_b_[c] = back.tau;
      CMat U = back.U.adjoint();  // U_A(x, v)
      for (int r = 0; r < n_; ++r)
        for (int q = 0; q < n_; ++q) U_[static_cast<size_t>(c) * n_ * n_ + r * n_ + q] = U(r, q);
    }
  });
}

BoundaryFan InteriorTable::entry(int i, int j, int s) const {
  int c = cell(i, j, s);
  BoundaryFan f;
  f.phi = phi_e_[c];
  f.a = a_e_[c];
  return f;
}

CMat InteriorTable::U(int i, int j, int s) const {
  int c = cell(i, j, s);
  CMat out(n_, n_);
  for (int r = 0; r < n_; ++r)
    for (int q = 0; q < n_; ++q) out(r, q) = U_[static_cast<size_t>(c) * n_ * n_ + r * n_ + q];
  return out;
}

double InteriorTable::tau_back(int i, int j, int s) const { return tau_b_[cell(i, j, s)]; }

CVec InteriorTable::sharp_at(const BoundaryFn& w, int i, int j, int s) const {
  return U(i, j, s) * w.eval(entry(i, j, s));
}

std::vector<VField> InteriorTable::sharp_modes(const DiskContext& ctx, const BoundaryFn& w,
                                               const std::vector<int>& ks) const {
  std::vector<VField> out(ks.size(), VField(n_, ctx.grid));
  parallel_for(nr_ * nphi_, [&](int node) {
    int i = node / nphi_, j = node % nphi_;
    std::vector<CVec> acc(ks.size(), CVec::Zero(n_));
    for (int s = 0; s < ntheta_; ++s) {
      CVec v = sharp_at(w, i, j, s);
      double th = kTwoPi * s / ntheta_;
      for (size_t q = 0; q < ks.size(); ++q) acc[q] += v * std::polar(1.0, -ks[q] * th);
    }
    for (size_t q = 0; q < ks.size(); ++q)
      for (int a = 0; a < n_; ++a) out[q].c[a](i, j) = acc[q][a] / double(ntheta_);
  });
  return out;
}

FiberFn InteriorTable::sharp_full(const DiskContext& ctx, const BoundaryFn& w, int kmax) const {
  if (kmax > ntheta_ / 2 - 1)
    throw std::invalid_argument("sharp_full: kmax exceeds the table's theta resolution");
  FiberFn out(n_, kmax, ctx.grid);
  parallel_for(nr_ * nphi_, [&](int node) {
    int i = node / nphi_, j = node % nphi_;
    std::vector<std::vector<cd>> ring(n_, std::vector<cd>(ntheta_));
    for (int s = 0; s < ntheta_; ++s) {
      CVec v = sharp_at(w, i, j, s);
      for (int a = 0; a < n_; ++a) ring[a][s] = v[a];
    }
    for (int a = 0; a < n_; ++a) {
      auto cf = circle_analyze(ring[a]);
      for (int k = -kmax; k <= kmax; ++k) out.at(k).c[a](i, j) = cf[k + ntheta_ / 2];
    }
  });
  return out;
}

void BoundaryRing::compute_coefficients() {
  const int M = 2 * fan.na;
  coefs.assign(n, Eigen::ArrayXXcd::Zero(fan.nphi, M));
  for (int l = 0; l < fan.nphi; ++l) {
    double th0 = fan.phis[l] + kPi / 2 + fan.da / 2;
    for (int a = 0; a < n; ++a) {
      std::vector<cd> ring(M);
      for (int m = 0; m < M; ++m) ring[m] = vals[a](l, m);
      auto cf = circle_analyze(ring);
      for (int k = -M / 2; k < M - M / 2; ++k)
        coefs[a](l, k + M / 2) = cf[k + M / 2] * std::polar(1.0, -k * th0);
    }
  }
}

CVec BoundaryRing::eval_node(int l, double theta) const {
  const int M = 2 * fan.na;
  CVec out = CVec::Zero(n);
  for (int a = 0; a < n; ++a) {
    cd acc = 0;
    for (int k = -M / 2; k < M - M / 2; ++k)
      acc += coefs[a](l, k + M / 2) * std::polar(1.0, k * theta);
    out[a] = acc;
  }
  return out;
}

CVec BoundaryRing::eval(double phi, double theta) const {
  const int M = 2 * fan.na;
  double v = wrap_2pi(phi) / fan.dphi;
  int l0 = static_cast<int>(std::floor(v)) - 1;
  double wl[4];
  for (int t = 0; t < 4; ++t) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != t) w *= (v - (l0 + b)) / double(t - b);
    wl[t] = w;
  }
  CVec out = CVec::Zero(n);
  for (int a = 0; a < n; ++a) {
    cd acc = 0;
    for (int k = -M / 2; k < M - M / 2; ++k) {
      cd ck = 0;
      for (int t = 0; t < 4; ++t) {
        int ll = ((l0 + t) % fan.nphi + fan.nphi) % fan.nphi;
        ck += wl[t] * coefs[a](ll, k + M / 2);
      }
      acc += ck * std::polar(1.0, k * theta);
    }
    out[a] = acc;
  }
  return out;
}

BoundaryRing operator_Q(const ScatteringData& sd, const BoundaryFn& w) {
  BoundaryRing g(sd.n, sd.fan);
  const FanGrid& fan = sd.fan;
  for (int l = 0; l < fan.nphi; ++l) {
    for (int k = 0; k < fan.na; ++k) {
      // Influx half: Qw = w.
      CVec wi = w.eval(fan.point(l, k));
      int m = g.m_influx(k);
      for (int a = 0; a < sd.n; ++a) g.vals[a](l, m) = wi[a];
      // Efflux half: Qw = C_A (w o alpha).
      int idx = l * fan.na + k;
      CVec we = sd.C_at[idx] * w.eval(sd.entry[idx]);
      int me = g.m_efflux(k);
      for (int a = 0; a < sd.n; ++a) g.vals[a](l, me) = we[a];
    }
  }
  g.compute_coefficients();
  return g;
}

BoundaryRing ring_hilbert(const BoundaryRing& g, int parity) {
  BoundaryRing out = g;
  const int M = 2 * g.fan.na;
  for (int a = 0; a < g.n; ++a)
    for (int l = 0; l < g.fan.nphi; ++l)
      for (int k = -M / 2; k < M - M / 2; ++k) {
        cd f = 0;
        bool keep = (parity == 0) || (parity > 0 && std::abs(k) % 2 == 0) ||
                    (parity < 0 && std::abs(k) % 2 == 1);
        if (keep && k != 0) f = (k > 0) ? cd(0, -1) : cd(0, 1);
        out.coefs[a](l, k + M / 2) = f * g.coefs[a](l, k + M / 2);
      }
  // Refresh sample values from the filtered coefficients.
  for (int l = 0; l < g.fan.nphi; ++l)
    for (int m = 0; m < M; ++m) {
      CVec v = out.eval_node(l, out.theta_of(l, m));
      for (int a = 0; a < g.n; ++a) out.vals[a](l, m) = v[a];
    }
  return out;
}

BoundaryFn operator_B(const ScatteringData& sd, const BoundaryRing& g) {
  BoundaryFn out(sd.n, sd.fan);
  const FanGrid& fan = sd.fan;
  for (int l = 0; l < fan.nphi; ++l)
    for (int k = 0; k < fan.na; ++k) {
      int idx = l * fan.na + k;
      const ExitPoint& e = sd.alpha[idx];
      CVec at_exit = g.eval(e.phi, e.theta);
      CVec here = g.eval_node(l, fan.point(l, k).theta());
      CVec v = sd.C_exit[idx].adjoint() * at_exit - here;  // C unitary
      out.set_node(l, k, v);
    }
  return out;
}

}  // namespace argt
