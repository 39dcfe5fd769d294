#include "argt/context.hpp"

namespace argt {

DiskContext::DiskContext(const PolarGrid& g, const ConformalMetric& m) : grid(g), metric(&m) {
  elam.resize(g.nr, g.nphi);
  elam_inv.resize(g.nr, g.nphi);
  e2lam.resize(g.nr, g.nphi);
  e2lam_inv.resize(g.nr, g.nphi);
  lam_x.resize(g.nr, g.nphi);
  lam_y.resize(g.nr, g.nphi);
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nphi; ++j) {
      Vec2 p = g.node(i, j);
      double l = m.lambda(p.x(), p.y());
      elam(i, j) = std::exp(l);
      elam_inv(i, j) = std::exp(-l);
      e2lam(i, j) = std::exp(2 * l);
      e2lam_inv(i, j) = std::exp(-2 * l);
      Vec2 gl = m.grad_lambda(p.x(), p.y());
      lam_x(i, j) = gl.x();
      lam_y(i, j) = gl.y();
    }
}

double l2_norm_section(const DiskContext& ctx, const VField& s) {
  RField acc = RField::Zero(ctx.grid.nr, ctx.grid.nphi);
  for (int a = 0; a < s.n; ++a) acc += s.c[a].abs2();
  return std::sqrt(ctx.grid.integrate(RField(acc * ctx.e2lam)));
}

double l2_norm_oneform(const DiskContext& ctx, const OneFormField& b) {
  // Conformal invariance in 2D: e^{-2 lambda} pairing times e^{2 lambda} area.
  RField acc = RField::Zero(ctx.grid.nr, ctx.grid.nphi);
  for (int a = 0; a < b.n; ++a) acc += b.b1[a].abs2() + b.b2[a].abs2();
  return std::sqrt(ctx.grid.integrate(acc));
}

double sup_norm(const VField& s) {
  double m = 0;
  for (int a = 0; a < s.n; ++a) m = std::max(m, s.c[a].abs().maxCoeff());
  return m;
}

}  // namespace argt
