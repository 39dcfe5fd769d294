#include <random>

#include "argt/connection.hpp"
#include "doctest.h"

using namespace argt;

namespace {

DiskContext make_ctx(const ConformalMetric& m, int nr = 48, int nphi = 96) {
  return DiskContext(PolarGrid(nr, nphi), m);
}

double sup_field(const CField& f) { return f.abs().maxCoeff(); }

// Sup over nodes away from the boundary ring (one-sided stencils there are
// still consistent but the tolerance checks target interior accuracy).
double sup_interior(const PolarGrid& g, const CField& f, double r_cap = 0.95) {
  double m = 0;
  for (int i = 0; i < g.nr; ++i) {
    if (g.r[i] > r_cap) continue;
    for (int j = 0; j < g.nphi; ++j) m = std::max(m, std::abs(f(i, j)));
  }
  return m;
}

}  // namespace

TEST_CASE("eval on the sphere bundle is linear in v") {
  auto m = ConformalMetric::euclidean();
  auto zero = Connection::zero(2);
  CHECK(zero.eval_sm(m, 0.2, 0.1, 1.0).norm() == 0.0);

  // n = 1, A = i dx1: A(x, v) = i cos t.
  auto A = Connection::abelian(PolyZ::constant(1.0), PolyZ());
  for (double t : {0.0, 0.7, kPi / 2, 2.5}) {
    cd v = A.eval_sm(m, 0.1, -0.3, t)(0, 0);
    CHECK(std::abs(v - cd(0, std::cos(t))) <= 1e-14);
  }
}

TEST_CASE("covariant derivative on sections and the unitarity pairing") {
  auto m = ConformalMetric::cap(1.0, 0.6);
  auto ctx = make_ctx(m);
  std::mt19937_64 rng(7);
  auto A = Connection::seeded(2, rng, 1.0);
  CHECK(A.skew_defect(ctx) <= 1e-12);

  // A = 0, constant section: d_A s = 0.
  VField cst(2, ctx.grid);
  cst.c[0].setConstant(cd(0.3, -1.1));
  cst.c[1].setConstant(cd(0.0, 0.4));
  auto d0 = covariant_d_section(ctx, Connection::zero(2), cst);
  for (int a = 0; a < 2; ++a) {
    CHECK(sup_field(d0.b1[a]) <= 1e-12);
    CHECK(sup_field(d0.b2[a]) <= 1e-12);
  }

  // n = 1, A = i dx1, s = 1: d_A s = i dx1.
  auto Ab = Connection::abelian(PolyZ::constant(1.0), PolyZ());
  VField one(1, ctx.grid);
  one.c[0].setConstant(1.0);
  auto d1 = covariant_d_section(ctx, Ab, one);
  CHECK(sup_field(CField(d1.b1[0] - cd(0, 1))) <= 1e-12);
  CHECK(sup_field(d1.b2[0]) <= 1e-12);

  // d(s1, s2) = (d_A s1, s2) + (s1, d_A s2) nodewise (unitary pairing).
  VField s1(2, ctx.grid), s2(2, ctx.grid);
  std::mt19937_64 rng2(11);
  std::vector<PolyZ> p1 = {PolyZ::seeded(rng2, 3, 3, 1.0, false), PolyZ::seeded(rng2, 3, 3, 1.0, false)};
  std::vector<PolyZ> p2 = {PolyZ::seeded(rng2, 3, 3, 1.0, false), PolyZ::seeded(rng2, 3, 3, 1.0, false)};
  for (int a = 0; a < 2; ++a) {
    s1.c[a] = sample(ctx.grid, [&](double x, double y) { return p1[a].eval(x, y); });
    s2.c[a] = sample(ctx.grid, [&](double x, double y) { return p2[a].eval(x, y); });
  }
  auto ds1 = covariant_d_section(ctx, A, s1);
  auto ds2 = covariant_d_section(ctx, A, s2);
  CField pair(ctx.grid.nr, ctx.grid.nphi);
  pair.setZero();
  for (int a = 0; a < 2; ++a) pair += s1.c[a] * s2.c[a].conjugate();
  CField lhs1 = d_x(ctx.grid, pair), lhs2 = d_y(ctx.grid, pair);
  CField rhs1(ctx.grid.nr, ctx.grid.nphi), rhs2(ctx.grid.nr, ctx.grid.nphi);
  rhs1.setZero();
  rhs2.setZero();
  for (int a = 0; a < 2; ++a) {
    rhs1 += ds1.b1[a] * s2.c[a].conjugate() + s1.c[a] * ds2.b1[a].conjugate();
    rhs2 += ds1.b2[a] * s2.c[a].conjugate() + s1.c[a] * ds2.b2[a].conjugate();
  }
  CHECK(sup_interior(ctx.grid, CField(lhs1 - rhs1)) <= 2e-5);
  CHECK(sup_interior(ctx.grid, CField(lhs2 - rhs2)) <= 2e-5);
}

TEST_CASE("d_A on 1-forms, d_A d_A = F_A, and explicit curvature") {
  auto m = ConformalMetric::euclidean();
  auto ctx = make_ctx(m);

  // A = 0, beta = df: d beta = 0 to FD tolerance.
  std::mt19937_64 rng(3);
  PolyZ f = PolyZ::seeded(rng, 3, 3, 1.0, false);
  OneFormField df(1, ctx.grid);
  df.b1[0] = sample(ctx.grid, [&](double x, double y) { return f.dx().eval(x, y); });
  df.b2[0] = sample(ctx.grid, [&](double x, double y) { return f.dy().eval(x, y); });
  auto dd = covariant_d_oneform(ctx, Connection::zero(1), df);
  CHECK(sup_interior(ctx.grid, dd.c[0]) <= 1e-4);

  // A = 0, beta = x1 dx2 -> coefficient 1.
  OneFormField b(1, ctx.grid);
  b.b2[0] = sample(ctx.grid, [](double x, double) { return cd(x, 0); });
  auto db = covariant_d_oneform(ctx, Connection::zero(1), b);
  CHECK(sup_field(CField(db.c[0] - 1.0)) <= 5e-6);

  // n = 1, A = i x2 dx1: F_A = -i (abelian, A ^ A = 0).
  auto Ax = Connection::abelian(PolyZ(), PolyZ());
  auto Ay = Connection::abelian(PolyZ::zbar() * 0.5 + PolyZ::z() * 0.5, PolyZ());
  // g1(x,y) = x2 needs the imaginary part: i x2 dx1 means g1 = x2.
  PolyZ x2 = (PolyZ::z() - PolyZ::zbar()) * cd(0, -0.5);  // y as a real polynomial
  auto Ai = Connection::abelian(x2, PolyZ());
  auto F = curvature(ctx, Ai);
  CHECK(sup_interior(ctx.grid, CField(F.at(0, 0) + cd(0, 1))) <= 5e-6);
  (void)Ax;
  (void)Ay;

  // d_A d_A p = F_A p for a non-abelian seeded connection.
  auto mc = ConformalMetric::cap(1.0, 0.5);
  auto ctx2 = make_ctx(mc);
  std::mt19937_64 rng2(5);
  auto A2 = Connection::seeded(2, rng2, 0.8);
  VField p(2, ctx2.grid);
  for (int a = 0; a < 2; ++a) {
    PolyZ pa = PolyZ::seeded(rng2, 3, 3, 1.0, false);
    p.c[a] = sample(ctx2.grid, [&](double x, double y) { return pa.eval(x, y); });
  }
  auto dp = covariant_d_section(ctx2, A2, p);
  auto ddp = covariant_d_oneform(ctx2, A2, dp);
  auto F2 = curvature(ctx2, A2);
  CField r0 = ddp.c[0] - F2.at(0, 0) * p.c[0] - F2.at(0, 1) * p.c[1];
  CField r1 = ddp.c[1] - F2.at(1, 0) * p.c[0] - F2.at(1, 1) * p.c[1];
  CHECK(sup_interior(ctx2.grid, r0, 0.9) <= 5e-5);
  CHECK(sup_interior(ctx2.grid, r1, 0.9) <= 5e-5);
}

TEST_CASE("hodge star conventions and codifferential") {
  auto m = ConformalMetric::cap(1.0, 0.7);
  auto ctx = make_ctx(m);
  OneFormField b(1, ctx.grid);
  b.b1[0].setConstant(1.0);  // dx1
  auto sb = hodge_star(b);
  CHECK(sup_field(sb.b1[0]) == 0.0);           // star dx1 = dx2
  CHECK(sup_field(CField(sb.b2[0] - 1.0)) == 0.0);
  auto ssb = hodge_star(sb);
  CHECK(sup_field(CField(ssb.b1[0] + 1.0)) == 0.0);  // star star = -1

  // Euclidean, A = 0: d* (x1 dx1) = -div = -1.
  auto eu = ConformalMetric::euclidean();
  auto ctxe = make_ctx(eu);
  OneFormField xb(1, ctxe.grid);
  xb.b1[0] = sample(ctxe.grid, [](double x, double) { return cd(x, 0); });
  auto cod = codifferential_oneform(ctxe, Connection::zero(1), xb);
  CHECK(sup_field(CField(cod.c[0] + 1.0)) <= 5e-6);
}

TEST_CASE("gauge transforms: identity, abelian exact form, curvature covariance") {
  auto m = ConformalMetric::cap(1.0, 0.5);
  auto ctx = make_ctx(m);
  std::mt19937_64 rng(17);
  auto A = Connection::seeded(2, rng, 0.9);

  Gauge id;
  id.n = 2;
  id.G = [](double, double) { return CMat(CMat::Identity(2, 2)); };
  id.dG = [](double, double, CMat& gx, CMat& gy) {
    gx = CMat::Zero(2, 2);
    gy = CMat::Zero(2, 2);
  };
  auto Aid = gauge_transform(A, id);
  CMat A1, A2, B1, B2;
  A.components(0.3, -0.2, A1, A2);
  Aid.components(0.3, -0.2, B1, B2);
  CHECK((A1 - B1).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((A2 - B2).cwiseAbs().maxCoeff() <= 1e-14);

  // Abelian formula: A = 0, G = e^{i rho} with rho|dM = 0 gives i d rho.
  std::mt19937_64 rng1(23);
  Gauge g1 = Gauge::seeded(1, rng1, 1.0);
  auto Ag = gauge_transform(Connection::zero(1), g1);
  CHECK(Ag.skew_defect(ctx) <= 1e-12);
  // Boundary identity: G = Id at |x| = 1.
  for (double ph : {0.0, 1.1, 3.9}) {
    CMat G = g1.G(std::cos(ph), std::sin(ph));
    CHECK(std::abs(G(0, 0) - 1.0) <= 1e-13);
  }

  // Gauge covariance of curvature: F_{A^G} = G^{-1} F_A G.
  std::mt19937_64 rng2(29);
  Gauge g2 = Gauge::seeded(2, rng2, 0.7);
  auto AG = gauge_transform(A, g2);
  CHECK(AG.skew_defect(ctx) <= 1e-11);
  auto F = curvature(ctx, A);
  auto FG = curvature(ctx, AG);
  double worst = 0;
  for (int i = 0; i < ctx.grid.nr; i += 5)
    for (int j = 0; j < ctx.grid.nphi; j += 7) {
      if (ctx.grid.r[i] > 0.9) continue;
      Vec2 p = ctx.grid.node(i, j);
      CMat G = g2.G(p.x(), p.y());
      CMat want = G.inverse() * F.value(i, j) * G;
      worst = std::max(worst, (FG.value(i, j) - want).cwiseAbs().maxCoeff());
    }
  CHECK(worst <= 2e-4);
}

TEST_CASE("fourier parts of 1-forms and the star identity on SM") {
  auto m = ConformalMetric::cap(1.0, 0.4);
  auto ctx = make_ctx(m);
  std::mt19937_64 rng(31);
  OneFormField beta(2, ctx.grid);
  for (int a = 0; a < 2; ++a) {
    PolyZ pb1 = PolyZ::seeded(rng, 3, 3, 1.0, false);
    PolyZ pb2 = PolyZ::seeded(rng, 3, 3, 1.0, false);
    beta.b1[a] = sample(ctx.grid, [&](double x, double y) { return pb1.eval(x, y); });
    beta.b2[a] = sample(ctx.grid, [&](double x, double y) { return pb2.eval(x, y); });
  }
  VField cp, cm;
  fourier_parts(ctx, beta, cp, cm);
  auto back = from_fourier_parts(ctx, cp, cm);
  for (int a = 0; a < 2; ++a) {
    CHECK(sup_field(CField(back.b1[a] - beta.b1[a])) <= 1e-12);
    CHECK(sup_field(CField(back.b2[a] - beta.b2[a])) <= 1e-12);
  }

  // beta = dx1: parts (dx1 -+ i dx2)/2 restricted to SM.
  OneFormField dx1(1, ctx.grid);
  dx1.b1[0].setConstant(1.0);
  fourier_parts(ctx, dx1, cp, cm);
  // On SM the degree +1 part is e^{-lambda}/2 e^{i theta}; check the coefficient.
  CField expect = (0.5 * ctx.elam_inv).cast<cd>();
  CHECK(sup_field(CField(cp.c[0] - expect)) <= 1e-13);

  // star(A1 + A-1) = i(A-1 - A1) as functions on SM: check via coefficients of
  // star beta versus i(cm e^{-i th} - cp e^{i th}).
  auto sb = hodge_star(beta);
  VField sp, sm;
  fourier_parts(ctx, beta, cp, cm);  // recompute for the n = 2 form
  fourier_parts(ctx, sb, sp, sm);
  for (int a = 0; a < 2; ++a) {
    CHECK(sup_field(CField(sp.c[a] + cd(0, 1) * cp.c[a])) <= 1e-12);
    CHECK(sup_field(CField(sm.c[a] - cd(0, 1) * cm.c[a])) <= 1e-12);
  }
}
