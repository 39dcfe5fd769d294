#include "argt/grid.hpp"

#include <cmath>

#include "argt/fornberg.hpp"

namespace argt {

PolarGrid::PolarGrid(int nr_, int nphi_) : nr(nr_), nphi(nphi_) {
  if (nr < 8 || nphi < 8 || nphi % 2 != 0)
    throw std::invalid_argument("PolarGrid: need nr >= 8, nphi >= 8 and even");
  hr = 1.0 / (nr - 0.5);
  hphi = kTwoPi / nphi;
  r.resize(nr);
  phi.resize(nphi);
  wr.resize(nr);
  for (int i = 0; i < nr; ++i) r[i] = (i + 0.5) * hr;
  for (int j = 0; j < nphi; ++j) phi[j] = j * hphi;
  for (int i = 0; i < nr - 1; ++i) wr[i] = hr * r[i];
  wr[nr - 1] = 0.5 * hr * (1.0 - 0.25 * hr);  // outer half-cell, node on r = 1
}

double PolarGrid::integrate(const RField& f) const {
  double s = 0;
  for (int i = 0; i < nr; ++i) s += wr[i] * f.row(i).sum();
  return s * hphi;
}

cd PolarGrid::integrate(const CField& f) const {
  cd s = 0;
  for (int i = 0; i < nr; ++i) s += wr[i] * f.row(i).sum();
  return s * hphi;
}

namespace {

// Value at signed radial node k (t_k = (k+1/2) hr); k < 0 crosses the pole.
inline cd at_signed(const CField& f, int nphi, int k, int j) {
  if (k >= 0) return f(k, j);
  return f(-1 - k, (j + nphi / 2) % nphi);
}

int stencil_size(int order) { return order <= 2 ? 5 : 7; }

}  // namespace

CField d_r(const PolarGrid& g, const CField& f, int order) {
  const int ns = stencil_size(order);
  CField out(g.nr, g.nphi);
  for (int i = 0; i < g.nr; ++i) {
    int k0 = i - (ns - 1) / 2;
    if (k0 + ns - 1 > g.nr - 1) k0 = g.nr - ns;
    std::vector<double> nodes(ns);
    for (int a = 0; a < ns; ++a) nodes[a] = (k0 + a + 0.5) * g.hr;
    std::vector<double> w = fd_weights(g.r[i], nodes, order);
    for (int j = 0; j < g.nphi; ++j) {
      cd acc = 0;
      for (int a = 0; a < ns; ++a) acc += w[a] * at_signed(f, g.nphi, k0 + a, j);
      out(i, j) = acc;
    }
  }
  return out;
}

CField d_phi(const PolarGrid& g, const CField& f, int order) {
  const int ns = stencil_size(order);
  const int half = (ns - 1) / 2;
  std::vector<double> nodes(ns);
  for (int a = 0; a < ns; ++a) nodes[a] = (a - half) * g.hphi;
  std::vector<double> w = fd_weights(0.0, nodes, order);
  CField out(g.nr, g.nphi);
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nphi; ++j) {
      cd acc = 0;
      for (int a = 0; a < ns; ++a) {
        int jj = (j + a - half + 2 * g.nphi) % g.nphi;
        acc += w[a] * f(i, jj);
      }
      out(i, j) = acc;
    }
  return out;
}

CField d_x(const PolarGrid& g, const CField& f) {
  CField fr = d_r(g, f), fp = d_phi(g, f);
  CField out(g.nr, g.nphi);
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nphi; ++j)
      out(i, j) = std::cos(g.phi[j]) * fr(i, j) - std::sin(g.phi[j]) / g.r[i] * fp(i, j);
  return out;
}

CField d_y(const PolarGrid& g, const CField& f) {
  CField fr = d_r(g, f), fp = d_phi(g, f);
  CField out(g.nr, g.nphi);
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nphi; ++j)
      out(i, j) = std::sin(g.phi[j]) * fr(i, j) + std::cos(g.phi[j]) / g.r[i] * fp(i, j);
  return out;
}

CField laplacian(const PolarGrid& g, const CField& f) {
  CField frr = d_r(g, f, 2), fr = d_r(g, f, 1), fpp = d_phi(g, f, 2);
  CField out(g.nr, g.nphi);
  for (int i = 0; i < g.nr; ++i) {
    double ri = g.r[i];
    for (int j = 0; j < g.nphi; ++j)
      out(i, j) = frr(i, j) + fr(i, j) / ri + fpp(i, j) / (ri * ri);
  }
  return out;
}

CField d_z(const PolarGrid& g, const CField& f) {
  return 0.5 * (d_x(g, f) - cd(0, 1) * d_y(g, f));
}

CField d_zbar(const PolarGrid& g, const CField& f) {
  return 0.5 * (d_x(g, f) + cd(0, 1) * d_y(g, f));
}

InterpStencil make_stencil(const PolarGrid& g, double x, double y) {
  double rr = std::hypot(x, y);
  if (rr > 1.0) {
    if (rr > 1.0 + 1e-9 * std::max(1.0, rr))
      throw std::domain_error("interp: point outside the closed unit disk");
    rr = 1.0;
  }
  double ph = wrap_2pi(std::atan2(y, x));

  InterpStencil s{};
  double u = rr / g.hr - 0.5;  // signed node coordinate
  int k0 = static_cast<int>(std::floor(u)) - 1;
  if (k0 + 3 > g.nr - 1) k0 = g.nr - 4;
  for (int a = 0; a < 4; ++a) s.ir[a] = k0 + a;
  // Lagrange weights on nodes k0..k0+3 at u.
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (u - (k0 + b)) / double(a - b);
    s.wr_[a] = w;
  }

  double v = ph / g.hphi;
  int j0 = static_cast<int>(std::floor(v)) - 1;
  for (int a = 0; a < 4; ++a) {
    int jj = ((j0 + a) % g.nphi + g.nphi) % g.nphi;
    s.jp[a] = jj;
    s.jp_op[a] = (jj + g.nphi / 2) % g.nphi;
    double w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (v - (j0 + b)) / double(a - b);
    s.wp[a] = w;
  }
  return s;
}

cd apply_stencil(const PolarGrid& g, const InterpStencil& s, const CField& f) {
  cd acc = 0;
  for (int a = 0; a < 4; ++a) {
    int k = s.ir[a];
    int row = k >= 0 ? k : -1 - k;
    const int* cols = k >= 0 ? s.jp : s.jp_op;
    cd line = 0;
    for (int b = 0; b < 4; ++b) line += s.wp[b] * f(row, cols[b]);
    acc += s.wr_[a] * line;
  }
  (void)g;
  return acc;
}

cd interp(const PolarGrid& g, const CField& f, double x, double y) {
  return apply_stencil(g, make_stencil(g, x, y), f);
}

}  // namespace argt
