#include <random>

#include "argt/transport.hpp"
#include "doctest.h"

using namespace argt;

namespace {

SmFunction constant_one() {
  return [](double, double, double) {
    CVec v(1);
    v[0] = 1.0;
    return v;
  };
}

// (X + A)p for a section p given in closed form.
SmFunction xap(const ConformalMetric& m, const Connection& A, const std::vector<PolyZ>& p) {
  const int n = static_cast<int>(p.size());
  std::vector<PolyZ> px(n), py(n);
  for (int a = 0; a < n; ++a) {
    px[a] = p[a].dx();
    py[a] = p[a].dy();
  }
  return [&m, A, p, px, py, n](double x, double y, double th) {
    double el = std::exp(-m.lambda(x, y));
    CVec v(n);
    for (int a = 0; a < n; ++a)
      v[a] = el * (std::cos(th) * px[a].eval(x, y) + std::sin(th) * py[a].eval(x, y));
    CMat Asm = A.eval_sm(m, x, y, th);
    CVec pv(n);
    for (int a = 0; a < n; ++a) pv[a] = p[a].eval(x, y);
    return CVec(v + Asm * pv);
  };
}

}  // namespace

TEST_CASE("propagator: zero connection, exact abelian form, unitarity") {
  auto m = ConformalMetric::cap(1.0, 0.5);
  GeodesicIntegrator integ(m, 1.0 / 1024);

  // A = 0: U stays the identity.
  auto pt0 = propagate(integ, Connection::zero(2), BoundaryFan{0.4, 0.3, 0});
  double worst = 0;
  for (const auto& U : pt0.U)
    worst = std::max(worst, (U - CMat::Identity(2, 2)).cwiseAbs().maxCoeff());
  CHECK(worst <= 1e-12);

  // n = 1, A = i c dx1 exact: U(t) = exp(-i c (x1(t) - x1(0))).
  const double c = 0.8;
  auto A = Connection::abelian(PolyZ::constant(c), PolyZ());
  auto pt = propagate(integ, A, BoundaryFan{1.1, -0.5, 0});
  for (size_t i = 0; i < pt.U.size(); i += 101) {
    cd expect = std::exp(cd(0, -c * (pt.trace.x[i].x() - pt.trace.x[0].x())));
    CHECK(std::abs(pt.U[i](0, 0) - expect) <= 1e-8);
  }

  // n = 2 random connection: unitarity at every sample.
  std::mt19937_64 rng(13);
  auto A2 = Connection::seeded(2, rng, 1.0);
  auto pt2 = propagate(integ, A2, BoundaryFan{2.0, 0.7, 0});
  double defect = 0;
  for (const auto& U : pt2.U)
    defect = std::max(defect, (U.adjoint() * U - CMat::Identity(2, 2)).norm());
  CHECK(defect <= 1e-8);
}

TEST_CASE("propagator cocycle under trace splitting") {
  auto m = ConformalMetric::hyperbolic(1.0, 0.6);
  GeodesicIntegrator integ(m, 1.0 / 2048);
  std::mt19937_64 rng(5);
  auto A = Connection::seeded(2, rng, 0.9);
  auto pt = propagate(integ, A, BoundaryFan{0.9, 0.4, 0});
  size_t mid = pt.U.size() / 2;
  PhasePoint pm{pt.trace.x[mid], pt.trace.theta[mid]};
  auto pt2 = propagate_phase(integ, A, pm);
  CMat expect = pt2.exitU * pt.U[mid];
  CHECK((expect - pt.exitU).cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("scattering data: trivial case, gauge invariance, D identity") {
  auto m = ConformalMetric::cap(1.0, 0.45);
  GeodesicIntegrator integ(m, 1.0 / 1024);
  FanGrid fan(32, 16);

  auto sd0 = scattering_data(integ, Connection::zero(1), fan);
  double c0 = 0;
  for (const auto& C : sd0.C_exit) c0 = std::max(c0, std::abs(C(0, 0) - 1.0));
  CHECK(c0 <= 1e-12);

  for (int n : {1, 2}) {
    std::mt19937_64 rng(100 + n);
    auto A = Connection::seeded(n, rng, 0.8);
    auto G = Gauge::seeded(n, rng, 0.8);
    auto AG = gauge_transform(A, G);
    auto sd = scattering_data(integ, A, fan);
    auto sdg = scattering_data(integ, AG, fan);
    CHECK(sd.max_unitarity_defect <= 1e-8);
    double dC = 0, dD = 0;
    for (int i = 0; i < fan.size(); ++i) {
      dC = std::max(dC, (sd.C_exit[i] - sdg.C_exit[i]).cwiseAbs().maxCoeff());
      // Independent reversed solve agrees with C_A^{-1} o alpha.
      dD = std::max(dD, (sd.D[i] - CMat(sd.C_exit[i].adjoint())).cwiseAbs().maxCoeff());
    }
    CHECK(dC <= 1e-6);
    CHECK(dD <= 1e-8);
  }
}

TEST_CASE("ray transform anchors and kernel containment") {
  auto eu = ConformalMetric::euclidean();
  GeodesicIntegrator integ(eu, 1.0 / 2048);
  FanGrid fan(32, 16);

  // I(1) = tau = 2 cos a on the Euclidean disk.
  auto I1 = ray_transform(integ, Connection::zero(1), fan, constant_one());
  double worst = 0;
  for (int l = 0; l < fan.nphi; ++l)
    for (int k = 0; k < fan.na; ++k) {
      double expect = 2.0 * std::cos(fan.as[k]);
      worst = std::max(worst, std::abs(I1.vals[0](l, k) - expect) / expect);
    }
  CHECK(worst <= 1e-8);

  // I_A((X + A)p) = 0 for p vanishing on the boundary (cap metric, n = 2).
  auto m = ConformalMetric::cap(1.0, 0.5);
  GeodesicIntegrator integ2(m, 1.0 / 1024);
  std::mt19937_64 rng(17);
  auto A = Connection::seeded(2, rng, 0.9);
  std::vector<PolyZ> p = {PolyZ::seeded(rng, 3, 3, 1.0, false).vanish_boundary(1),
                          PolyZ::seeded(rng, 3, 3, 1.0, false).vanish_boundary(1)};
  auto If = ray_transform(integ2, A, fan, xap(m, A, p));
  double pc1 = 0;
  for (const auto& q : p) {
    pc1 = std::max(pc1, q.sup_disk());
    pc1 = std::max(pc1, q.dx().sup_disk());
    pc1 = std::max(pc1, q.dy().sup_disk());
  }
  CHECK(If.sup() <= 1e-3 * pc1);
  CHECK(If.sup() <= 1e-6 * pc1);  // quadrature-level in practice
}

TEST_CASE("fundamental identity with boundary term: I_A((X+A)g) = B g0") {
  auto m = ConformalMetric::cap(1.0, 0.5);
  GeodesicIntegrator integ(m, 1.0 / 512);
  FanGrid fan(48, 24);
  std::mt19937_64 rng(29);
  auto A = Connection::seeded(2, rng, 0.8);
  std::vector<PolyZ> g = {PolyZ::seeded(rng, 3, 3, 1.0, false),
                          PolyZ::seeded(rng, 3, 3, 1.0, false)};

  auto sd = scattering_data(integ, A, fan);
  auto lhs = ray_transform(integ, A, fan, xap(m, A, g));

  // g0 = g|boundary is theta-independent on each boundary circle.
  BoundaryRing ring(2, fan);
  for (int l = 0; l < fan.nphi; ++l) {
    double bx = std::cos(fan.phis[l]), by = std::sin(fan.phis[l]);
    for (int a = 0; a < 2; ++a) {
      cd v = g[a].eval(bx, by);
      for (int mm = 0; mm < 2 * fan.na; ++mm) ring.vals[a](l, mm) = v;
    }
  }
  ring.compute_coefficients();
  auto rhs = operator_B(sd, ring);

  double worst = 0, scale = std::max(lhs.sup(), 1e-12);
  for (int a = 0; a < 2; ++a)
    worst = std::max(worst, (lhs.vals[a] - rhs.vals[a]).abs().maxCoeff());
  CHECK(worst / scale <= 2e-4);
}

TEST_CASE("transport solve: closed form and defining residual") {
  auto eu = ConformalMetric::euclidean();
  GeodesicIntegrator integ(eu, 1.0 / 1024);
  // A = 0, f = 1 along a chord: u(phi_t) = tau - t.
  PhasePoint p{{0.2, -0.1}, 0.9};
  CVec u = transport_solve_at(integ, Connection::zero(1), p, constant_one());
  auto fwd = integ.trace_to_exit(p);
  CHECK(std::abs(u[0] - fwd.tau) <= 1e-10);

  // Residual X u^f + A u^f + f = 0 at interior samples (cap metric, n = 1).
  auto m = ConformalMetric::cap(1.0, 0.5);
  GeodesicIntegrator integ2(m, 1.0 / 1024);
  std::mt19937_64 rng(31);
  auto A = Connection::seeded(1, rng, 0.8);
  PolyZ f0 = PolyZ::seeded(rng, 3, 3, 1.0, false);
  SmFunction f = [&](double x, double y, double) {
    CVec v(1);
    v[0] = f0.eval(x, y);
    return v;
  };
  auto usolve = [&](const PhasePoint& q) {
    return transport_solve_at(integ2, A, q, f);
  };
  double worst = 0;
  const double dt = 0.01;
  for (auto& q : {PhasePoint{{0.3, 0.2}, 1.2}, PhasePoint{{-0.4, 0.1}, 4.0},
                  PhasePoint{{0.0, -0.5}, 2.2}}) {
    auto at = [&](double s) { return usolve(PhasePoint{integ2.advance(q, s, 2)})[0]; };
    cd xu = (-at(2 * dt) + 8.0 * at(dt) - 8.0 * at(-dt) + at(-2 * dt)) / (12.0 * dt);
    CMat Asm = A.eval_sm(m, q.x.x(), q.x.y(), q.theta);
    cd resid = xu + Asm(0, 0) * usolve(q)[0] + f0.eval(q.x.x(), q.x.y());
    worst = std::max(worst, std::abs(resid));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("invariant extension via the interior table") {
  auto m = ConformalMetric::cap(1.0, 0.5);
  PolarGrid grid(24, 48);
  DiskContext ctx(grid, m);
  std::mt19937_64 rng(37);
  auto A = Connection::seeded(1, rng, 0.7);
  FanGrid fan(48, 24);
  InteriorTable table(ctx, A, 16, 1.0 / 512);

  // Margin-supported smooth w.
  const double amax = kPi / 2 - 0.15;
  auto wfn = [amax](const BoundaryFan& f) {
    CVec v(1);
    double t = f.a / amax;
    double win = (std::abs(t) < 1.0) ? std::pow(1.0 - t * t, 4) : 0.0;
    v[0] = win * std::exp(cd(0, 2.0 * f.phi)) * (1.0 + 0.3 * std::sin(f.a));
    return v;
  };
  BoundaryFn w = BoundaryFn::from_analytic(1, fan, wfn);
  CHECK(w.glancing_sup(0.05) == 0.0);

  // w#|influx boundary = w: nodes on the outer ring with influx directions.
  GeodesicIntegrator integ(m, 1.0 / 512);
  double worst = 0;
  int i = grid.nr - 1;
  for (int j = 0; j < grid.nphi; j += 5)
    for (int s = 0; s < table.ntheta(); ++s) {
      double th = table.theta(s);
      double aa = wrap_pi(grid.phi[j] + kPi - th);
      if (std::abs(aa) > kPi / 2 - 0.2) continue;  // keep clear of glancing
      CVec shp = table.sharp_at(w, i, j, s);
      CVec expect = wfn(BoundaryFan{grid.phi[j], aa, 0});
      worst = std::max(worst, (shp - expect).cwiseAbs().maxCoeff());
    }
  CHECK(worst <= 1e-6);

  // Flow-invariance residual (X + A)w# = 0 at interior samples.
  auto sharp_eval = [&](const PhasePoint& q) {
    PropagatedTrace back =
        propagate_phase(integ, A, PhasePoint{q.x, wrap_2pi(q.theta + kPi)});
    ExitPoint e = integ.exit_of(back.trace);
    CMat U = back.exitU.adjoint();
    return CVec(U * w.eval(reverse_of_exit(e)));
  };
  const double dt = 0.01;
  double resid = 0;
  for (auto& q : {PhasePoint{{0.1, 0.3}, 0.7}, PhasePoint{{-0.2, -0.4}, 2.9},
                  PhasePoint{{0.5, 0.0}, 5.5}}) {
    auto at = [&](double s) { return sharp_eval(PhasePoint{integ.advance(q, s, 2)})[0]; };
    cd xw = (-at(2 * dt) + 8.0 * at(dt) - 8.0 * at(-dt) + at(-2 * dt)) / (12.0 * dt);
    CMat Asm = A.eval_sm(m, q.x.x(), q.x.y(), q.theta);
    resid = std::max(resid, std::abs(xw + Asm(0, 0) * sharp_eval(q)[0]));
  }
  CHECK(resid <= 1e-5);

  // Constant w times cutoff, A = 0: w# equals the constant wherever the
  // entry point lies inside the flat part of the window.
  auto A0 = Connection::zero(1);
  InteriorTable t0(ctx, A0, 16, 1.0 / 512);
  BoundaryFn wc = BoundaryFn::from_analytic(1, fan, [amax](const BoundaryFan& f) {
    CVec v(1);
    double t = f.a / amax;
    v[0] = (std::abs(t) < 1.0) ? std::pow(1.0 - t * t, 4) : 0.0;
    return v;
  });
  int ii = 5, jj = 7, ss = 3;
  BoundaryFan ent = t0.entry(ii, jj, ss);
  double tt = ent.a / amax;
  cd expect = (std::abs(tt) < 1.0) ? std::pow(1.0 - tt * tt, 4) : 0.0;
  CHECK(std::abs(t0.sharp_at(wc, ii, jj, ss)[0] - expect) <= 1e-9);
}

TEST_CASE("Q and B: trivial connection and the closed-loop identity") {
  auto m = ConformalMetric::cap(1.0, 0.4);
  GeodesicIntegrator integ(m, 1.0 / 512);
  FanGrid fan(48, 24);
  std::mt19937_64 rng(43);
  auto A = Connection::seeded(2, rng, 0.8);
  auto sd = scattering_data(integ, A, fan);

  const double amax = kPi / 2 - 0.2;
  auto wfn = [amax](const BoundaryFan& f) {
    CVec v(2);
    double t = f.a / amax;
    double win = (std::abs(t) < 1.0) ? std::pow(1.0 - t * t, 4) : 0.0;
    v[0] = win * std::exp(cd(0, f.phi));
    v[1] = win * cd(0.4, -0.2) * std::cos(f.a);
    return v;
  };
  BoundaryFn w = BoundaryFn::from_analytic(2, fan, wfn);

  // Q with A = 0 gives (w, w o alpha); check the efflux half through entry data.
  auto sd0 = scattering_data(integ, Connection::zero(2), fan);
  auto q0 = operator_Q(sd0, w);
  int l = 10, k = 12;
  CVec direct = w.eval(sd0.entry[l * fan.na + k]);
  int me = q0.m_efflux(k);
  CHECK(std::abs(q0.vals[0](l, me) - direct[0]) <= 1e-12);

  // B(Qw) = I_A((X+A) w#) = 0 for flow-invariant extensions.
  auto qw = operator_Q(sd, w);
  auto bqw = operator_B(sd, qw);
  CHECK(bqw.sup() <= 5e-4 * std::max(1.0, w.sup()));
}
