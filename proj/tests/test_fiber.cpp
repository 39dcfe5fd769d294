#include <random>

#include "argt/fiber.hpp"
#include "doctest.h"

using namespace argt;

namespace {

DiskContext make_ctx(const ConformalMetric& m, int nr = 48, int nphi = 96) {
  return DiskContext(PolarGrid(nr, nphi), m);
}

double sup_interior(const PolarGrid& g, const CField& f, double r_cap = 0.9) {
  double m = 0;
  for (int i = 0; i < g.nr; ++i) {
    if (g.r[i] > r_cap) continue;
    for (int j = 0; j < g.nphi; ++j) m = std::max(m, std::abs(f(i, j)));
  }
  return m;
}

double sup_interior(const PolarGrid& g, const VField& f, double r_cap = 0.9) {
  double m = 0;
  for (int a = 0; a < f.n; ++a) m = std::max(m, sup_interior(g, f.c[a], r_cap));
  return m;
}

double sup_interior_fn(const PolarGrid& g, const FiberFn& u, double r_cap = 0.9) {
  double m = 0;
  for (const auto& v : u.coef) m = std::max(m, sup_interior(g, v, r_cap));
  return m;
}

FiberFn diff(const FiberFn& a, const FiberFn& b) {
  FiberFn out = a;
  for (int k = -b.kmax; k <= b.kmax; ++k) {
    if (!out.has(k)) continue;
    for (int c = 0; c < b.n; ++c) out.at(k).c[c] -= b.at(k).c[c];
  }
  return out;
}

}  // namespace

TEST_CASE("vertical operator and Hilbert transform are exact mode maps") {
  auto m = ConformalMetric::euclidean();
  auto ctx = make_ctx(m, 16, 32);
  FiberFn u(1, 3, ctx.grid);
  u.at(0).c[0].setConstant(2.0);
  u.at(1).c[0].setConstant(cd(0, 1));
  u.at(-1).c[0].setConstant(1.0);
  u.at(3).c[0].setConstant(0.5);

  auto vu = apply_V(u);
  CHECK(sup_norm(vu.at(0)) == 0.0);
  CHECK(sup_norm(VField(vu.at(3))) == doctest::Approx(1.5));
  // V(e^{ik th} f) = ik e^{ik th} f exactly.
  CHECK(std::abs(vu.at(1).c[0](3, 5) - cd(0, 1) * cd(0, 1)) == 0.0);

  auto hu = hilbert(u);
  CHECK(sup_norm(hu.at(0)) == 0.0);  // sgn(0) = 0
  CHECK(std::abs(hu.at(1).c[0](0, 0) - cd(0, -1) * cd(0, 1)) == 0.0);
  CHECK(std::abs(hu.at(-1).c[0](0, 0) - cd(0, 1) * 1.0) == 0.0);

  // (Id + iH)u = u_0 + 2 sum_{k>=1} u_k.
  FiberFn idih = u;
  for (int k = -u.kmax; k <= u.kmax; ++k)
    idih.at(k).c[0] = u.at(k).c[0] + cd(0, 1) * hu.at(k).c[0];
  CHECK(sup_norm(idih.at(-1)) == 0.0);
  CHECK(std::abs(idih.at(0).c[0](0, 0) - 2.0) == 0.0);
  CHECK(std::abs(idih.at(1).c[0](0, 0) - 2.0 * cd(0, 1)) == 0.0);
  CHECK(std::abs(idih.at(3).c[0](0, 0) - 1.0) == 0.0);

  // H^2 = -Id away from degree zero; H annihilates degree zero.
  auto hhu = hilbert(hu);
  CHECK(std::abs(hhu.at(1).c[0](0, 0) + u.at(1).c[0](0, 0)) == 0.0);
  CHECK(std::abs(hhu.at(3).c[0](0, 0) + u.at(3).c[0](0, 0)) == 0.0);

  // Even/odd variants act on the matching parity only.
  auto he = hilbert_even(u);
  CHECK(sup_norm(he.at(1)) == 0.0);
  CHECK(sup_norm(he.at(3)) == 0.0);
  auto ho = hilbert_odd(u);
  CHECK(sup_norm(ho.at(0)) == 0.0);
  CHECK(std::abs(ho.at(3).c[0](0, 0) - cd(0, -1) * 0.5) == 0.0);
}

TEST_CASE("eta operators shift fibre degree by exactly one") {
  auto m = ConformalMetric::cap(1.0, 0.5);
  auto ctx = make_ctx(m);
  std::mt19937_64 rng(5);
  PolyZ f = PolyZ::seeded(rng, 3, 3, 1.0, false);
  FiberFn u(1, 4, ctx.grid);
  u.at(3).c[0] = sample(ctx.grid, [&](double x, double y) { return f.eval(x, y); });

  auto up = eta_plus(ctx, u);
  for (int k = -up.kmax; k <= up.kmax; ++k)
    if (k != 4) CHECK(sup_norm(up.at(k)) <= 1e-10);
  CHECK(sup_norm(up.at(4)) > 1e-3);

  auto um = eta_minus(ctx, u);
  for (int k = -um.kmax; k <= um.kmax; ++k)
    if (k != 2) CHECK(sup_norm(um.at(k)) <= 1e-10);

  // X = eta_+ + eta_-; parity: even input degrees produce odd output degrees.
  auto xu = apply_X(ctx, u);
  CHECK(degree_leakage(xu, {2, 4}) <= 1e-10);

  // mu_pm reduce to eta_pm when A = 0.
  auto smz = SmConnection::make(ctx, Connection::zero(1));
  auto mp = mu_plus(ctx, smz, u);
  CHECK(sup_interior_fn(ctx.grid, diff(mp, up), 1.0) <= 1e-14);
}

TEST_CASE("X on x1 equals cos(theta) on the Euclidean disk") {
  auto m = ConformalMetric::euclidean();
  auto ctx = make_ctx(m);
  FiberFn u(1, 1, ctx.grid);
  u.at(0).c[0] = sample(ctx.grid, [](double x, double) { return cd(x, 0); });
  auto xu = apply_X(ctx, u);
  // cos(theta) has coefficients 1/2 at degrees +-1.
  CHECK(sup_interior(ctx.grid, CField(xu.at(1).c[0] - 0.5)) <= 5e-6);
  CHECK(sup_interior(ctx.grid, CField(xu.at(-1).c[0] - 0.5)) <= 5e-6);
  CHECK(sup_interior(ctx.grid, xu.at(0).c[0]) <= 1e-12);
}

TEST_CASE("structure equation [X, Xperp] = -K V via grid stencils") {
  for (auto fam : {0, 1, 2}) {
    ConformalMetric m = fam == 0   ? ConformalMetric::euclidean()
                        : fam == 1 ? ConformalMetric::cap(1.0, 0.6)
                                   : ConformalMetric::hyperbolic(1.0, 0.75);
    auto ctx = make_ctx(m, 64, 128);
    std::mt19937_64 rng(41 + fam);
    auto ua = AnalyticFiberFn::seeded(1, rng, 2, 1.0);
    FiberFn u = ua.sample(ctx, 3);

    FiberFn lhs = diff(apply_X(ctx, apply_Xperp(ctx, u)), apply_Xperp(ctx, apply_X(ctx, u)));
    // -K V u sampled nodewise.
    FiberFn rhs = apply_V(u);
    for (int k = -rhs.kmax; k <= rhs.kmax; ++k)
      for (int a = 0; a < rhs.n; ++a)
        rhs.at(k).c[a] = -sample(ctx.grid, [&](double x, double y) {
          return cd(m.curvature_raw(x, y), 0);
        }) * rhs.at(k).c[a];
    CHECK(sup_interior_fn(ctx.grid, diff(lhs, rhs), 0.85) <= 2e-4);
  }
}

TEST_CASE("flow-derivative oracle matches the coefficient route for X") {
  auto m = ConformalMetric::cap(1.0, 0.55);
  auto ctx = make_ctx(m, 64, 128);
  std::mt19937_64 rng(19);
  auto ua = AnalyticFiberFn::seeded(1, rng, 2, 1.0);
  FiberFn u = ua.sample(ctx, 3);
  FiberFn xu = apply_X(ctx, u);

  GeodesicIntegrator integ(m, 1.0 / 512);
  const double dt = 1.0 / ctx.grid.nr;
  double worst = 0;
  for (int i = 4; i < ctx.grid.nr; i += 7) {
    if (ctx.grid.r[i] > 0.88) continue;
    for (int j = 0; j < ctx.grid.nphi; j += 11)
      for (double th : {0.3, 2.1, 4.9}) {
        Vec2 p = ctx.grid.node(i, j);
        PhasePoint pp{p, th};
        auto at = [&](double s) {
          PhasePoint q = integ.advance(pp, s, 2);
          return ua.eval(q.x.x(), q.x.y(), q.theta)[0];
        };
        cd flow = (-at(2 * dt) + 8.0 * at(dt) - 8.0 * at(-dt) + at(-2 * dt)) / (12.0 * dt);
        cd coefr = xu.eval_node(i, j, th)[0];
        worst = std::max(worst, std::abs(flow - coefr));
      }
  }
  CHECK(worst <= 2e-5);
}

TEST_CASE("bracket identity residual (flow route vs stencil route)") {
  // Degree-zero u with A = 0: [H, X]u = Xperp u_0 + {Xperp u}_0.
  auto m = ConformalMetric::euclidean();
  auto ctx = make_ctx(m, 48, 96);
  std::mt19937_64 rng(7);
  AnalyticFiberFn u0;
  u0.n = 1;
  u0.modes[0] = {PolyZ::seeded(rng, 3, 3, 1.0, false)};
  double r0 = bracket_residual(ctx, Connection::zero(1), u0);
  CHECK(r0 <= 2e-4);

  // Random truncated u with a random n = 2 connection, and grid convergence.
  std::mt19937_64 rng2(23);
  auto A = Connection::seeded(2, rng2, 0.8);
  auto u = AnalyticFiberFn::seeded(2, rng2, 3, 1.0);
  auto coarse_ctx = make_ctx(m, 32, 64);
  auto mid_ctx = make_ctx(m, 64, 128);
  double rc = bracket_residual(coarse_ctx, A, u);
  double rm = bracket_residual(mid_ctx, A, u);
  CHECK(rm <= 5e-4);
  CHECK(rc / rm >= 4.0);  // at least second order

  // A = 0 specialization agrees with the unattenuated bracket.
  double rz = bracket_residual(mid_ctx, Connection::zero(2), u);
  CHECK(rz <= 5e-4);
}

TEST_CASE("star d_A via mu matches the exterior route") {
  auto m = ConformalMetric::cap(1.0, 0.5);
  auto ctx = make_ctx(m, 64, 128);
  std::mt19937_64 rng(11);
  auto A = Connection::seeded(2, rng, 0.8);
  auto smA = SmConnection::make(ctx, A);

  OneFormField beta(2, ctx.grid);
  for (int a = 0; a < 2; ++a) {
    PolyZ b1 = PolyZ::seeded(rng, 3, 3, 1.0, false), b2 = PolyZ::seeded(rng, 3, 3, 1.0, false);
    beta.b1[a] = sample(ctx.grid, [&](double x, double y) { return b1.eval(x, y); });
    beta.b2[a] = sample(ctx.grid, [&](double x, double y) { return b2.eval(x, y); });
  }
  VField cp, cm;
  fourier_parts(ctx, beta, cp, cm);
  VField via_mu = star_dA_via_mu(ctx, smA, cp, cm);
  VField via_ext = star_d_oneform(ctx, A, beta);
  double worst = 0;
  for (int a = 0; a < 2; ++a)
    worst = std::max(worst, sup_interior(ctx.grid, CField(via_mu.c[a] - via_ext.c[a])));
  CHECK(worst <= 1e-4);

  // A = 0, beta = df: both routes vanish.
  PolyZ f = PolyZ::seeded(rng, 3, 3, 1.0, false);
  OneFormField df(1, ctx.grid);
  df.b1[0] = sample(ctx.grid, [&](double x, double y) { return f.dx().eval(x, y); });
  df.b2[0] = sample(ctx.grid, [&](double x, double y) { return f.dy().eval(x, y); });
  auto smz = SmConnection::make(ctx, Connection::zero(1));
  VField zp, zm;
  fourier_parts(ctx, df, zp, zm);
  CHECK(sup_interior(ctx.grid, star_dA_via_mu(ctx, smz, zp, zm)) <= 1e-4);
  CHECK(sup_interior(ctx.grid, star_d_oneform(ctx, Connection::zero(1), df)) <= 1e-4);

  // Divergence pairing: mu_+(beta_-1) + mu_-(beta_1) = -d_A^* beta / 2.
  FiberFn bp(2, 1, ctx.grid), bm(2, 1, ctx.grid);
  bp.at(1) = cp;
  bm.at(-1) = cm;
  FiberFn t = mu_plus(ctx, smA, bm);
  FiberFn t2 = mu_minus(ctx, smA, bp);
  VField sum(2, ctx.grid);
  for (int a = 0; a < 2; ++a) sum.c[a] = t.at(0).c[a] + t2.at(0).c[a];
  VField cod = codifferential_oneform(ctx, A, beta);
  double w2 = 0;
  for (int a = 0; a < 2; ++a)
    w2 = std::max(w2, sup_interior(ctx.grid, CField(sum.c[a] + 0.5 * cod.c[a])));
  CHECK(w2 <= 1e-4);
}

TEST_CASE("adjointness of V in coefficient space") {
  auto m = ConformalMetric::cap(1.0, 0.5);
  auto ctx = make_ctx(m, 24, 48);
  std::mt19937_64 rng(3);
  FiberFn u = AnalyticFiberFn::seeded(1, rng, 2, 1.0).sample(ctx, 2);
  FiberFn w = AnalyticFiberFn::seeded(1, rng, 2, 1.0).sample(ctx, 2);
  auto vu = apply_V(u), vw = apply_V(w);
  cd lhs = 0, rhs = 0;
  for (int k = -2; k <= 2; ++k) {
    lhs += ctx.grid.integrate(CField(vu.at(k).c[0] * w.at(k).c[0].conjugate() * ctx.e2lam));
    rhs -= ctx.grid.integrate(CField(u.at(k).c[0] * vw.at(k).c[0].conjugate() * ctx.e2lam));
  }
  CHECK(std::abs(lhs - rhs) <= 1e-12);
}
