#include "argt/connection.hpp"

#include <cmath>
#include <memory>

namespace argt {

namespace {

// exp(i(a I + b.sigma)) for real a, b: e^{ia}(cos|b| I + i sinc|b| (b.sigma)).
CMat su2_exp(double a, const double b[3]) {
  double u = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
  double nb = std::sqrt(u);
  double c0 = std::cos(nb);
  double s1 = (u < 1e-12) ? 1.0 - u / 6.0 : std::sin(nb) / nb;
  CMat bs(2, 2);
  bs << b[2], cd(b[0], -b[1]), cd(b[0], b[1]), -b[2];
  CMat out = c0 * CMat::Identity(2, 2) + cd(0, 1) * s1 * bs;
  return std::polar(1.0, a) * out;
}

// Directional derivative of su2_exp along (da, db).
CMat su2_exp_d(double a, const double b[3], double da, const double db[3]) {
  double u = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
  double nb = std::sqrt(u);
  double c0 = std::cos(nb);
  double s1 = (u < 1e-12) ? 1.0 - u / 6.0 : std::sin(nb) / nb;
  // (cos t - sinc t)/t^2, smooth through t = 0.
  double q = (u < 1e-12) ? -1.0 / 3.0 + u / 30.0 : (c0 - s1) / u;
  double bdb = b[0] * db[0] + b[1] * db[1] + b[2] * db[2];
  CMat bs(2, 2), dbs(2, 2);
  bs << b[2], cd(b[0], -b[1]), cd(b[0], b[1]), -b[2];
  dbs << db[2], cd(db[0], -db[1]), cd(db[0], db[1]), -db[2];
  CMat M = c0 * CMat::Identity(2, 2) + cd(0, 1) * s1 * bs;
  CMat dM = -s1 * bdb * CMat::Identity(2, 2) + cd(0, 1) * (q * bdb) * bs + cd(0, 1) * s1 * dbs;
  return std::polar(1.0, a) * (cd(0, 1) * da * M + dM);
}

}  // namespace

Connection Connection::zero(int n) {
  return Connection(n, [n](double, double, CMat& A1, CMat& A2) {
    A1 = CMat::Zero(n, n);
    A2 = CMat::Zero(n, n);
  });
}

Connection Connection::abelian(const PolyZ& g1, const PolyZ& g2) {
  return Connection(1, [g1, g2](double x, double y, CMat& A1, CMat& A2) {
    A1.resize(1, 1);
    A2.resize(1, 1);
    A1(0, 0) = cd(0, 1) * g1.eval(x, y).real();
    A2(0, 0) = cd(0, 1) * g2.eval(x, y).real();
  });
}

Connection Connection::seeded(int n, std::mt19937_64& rng, double scale) {
  if (n == 1) {
    PolyZ g1 = PolyZ::seeded(rng, 3, 3, scale, true);
    PolyZ g2 = PolyZ::seeded(rng, 3, 3, scale, true);
    return abelian(g1, g2);
  }
  if (n != 2) throw std::invalid_argument("seeded connection: n must be 1 or 2");
  // A_j = i H_j with H_j Hermitian built from smooth polynomial entries.
  auto herm = [&rng, scale] {
    PolyZ al = PolyZ::seeded(rng, 3, 3, scale, true);
    PolyZ ga = PolyZ::seeded(rng, 3, 3, scale, true);
    PolyZ be = PolyZ::seeded(rng, 3, 3, scale, false);
    return std::array<PolyZ, 3>{al, be, ga};
  };
  auto h1 = herm(), h2 = herm();
  auto make = [](const std::array<PolyZ, 3>& h, double x, double y, CMat& A) {
    A.resize(2, 2);
    cd al = h[0].eval(x, y).real();
    cd ga = h[2].eval(x, y).real();
    cd be = h[1].eval(x, y);
    A(0, 0) = cd(0, 1) * al;
    A(0, 1) = cd(0, 1) * be;
    A(1, 0) = cd(0, 1) * std::conj(be);
    A(1, 1) = cd(0, 1) * ga;
  };
  return Connection(2, [h1, h2, make](double x, double y, CMat& A1, CMat& A2) {
    make(h1, x, y, A1);
    make(h2, x, y, A2);
  });
}

Connection Connection::from_grid(int n, const PolarGrid& g, MatField A1, MatField A2) {
  auto a1 = std::make_shared<MatField>(std::move(A1));
  auto a2 = std::make_shared<MatField>(std::move(A2));
  auto grid = std::make_shared<PolarGrid>(g);
  return Connection(n, [n, grid, a1, a2](double x, double y, CMat& M1, CMat& M2) {
    double rr = std::hypot(x, y);
    if (rr > 1.0) {
      x /= rr;
      y /= rr;
    }
    InterpStencil st = make_stencil(*grid, x, y);
    M1.resize(n, n);
    M2.resize(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        M1(r, c) = apply_stencil(*grid, st, a1->at(r, c));
        M2(r, c) = apply_stencil(*grid, st, a2->at(r, c));
      }
  });
}

CMat Connection::eval_sm(const ConformalMetric& m, double x, double y, double theta) const {
  CMat A1, A2;
  eval_(x, y, A1, A2);
  double el = std::exp(-m.lambda(x, y));
  return el * (std::cos(theta) * A1 + std::sin(theta) * A2);
}

double Connection::skew_defect(const DiskContext& ctx) const {
  double worst = 0;
  CMat A1, A2;
  for (int i = 0; i < ctx.grid.nr; i += 3)
    for (int j = 0; j < ctx.grid.nphi; j += 3) {
      Vec2 p = ctx.grid.node(i, j);
      eval_(p.x(), p.y(), A1, A2);
      worst = std::max(worst, (A1 + A1.adjoint()).cwiseAbs().maxCoeff());
      worst = std::max(worst, (A2 + A2.adjoint()).cwiseAbs().maxCoeff());
    }
  return worst;
}

void Connection::sample(const DiskContext& ctx, MatField& A1, MatField& A2) const {
  A1 = MatField(n_, ctx.grid);
  A2 = MatField(n_, ctx.grid);
  CMat M1, M2;
  for (int i = 0; i < ctx.grid.nr; ++i)
    for (int j = 0; j < ctx.grid.nphi; ++j) {
      Vec2 p = ctx.grid.node(i, j);
      eval_(p.x(), p.y(), M1, M2);
      A1.set(i, j, M1);
      A2.set(i, j, M2);
    }
}

void Connection::sample_pm(const DiskContext& ctx, MatField& Ap, MatField& Am) const {
  MatField A1, A2;
  sample(ctx, A1, A2);
  Ap = MatField(n_, ctx.grid);
  Am = MatField(n_, ctx.grid);
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) {
      Ap.at(r, c) = 0.5 * ctx.elam_inv * (A1.at(r, c) - cd(0, 1) * A2.at(r, c));
      Am.at(r, c) = 0.5 * ctx.elam_inv * (A1.at(r, c) + cd(0, 1) * A2.at(r, c));
    }
}

Gauge Gauge::seeded(int n, std::mt19937_64& rng, double scale) {
  Gauge g;
  g.n = n;
  if (n == 1) {
    PolyZ rho = PolyZ::seeded(rng, 3, 3, scale, true).vanish_boundary(1);
    PolyZ rx = rho.dx(), ry = rho.dy();
    g.G = [rho](double x, double y) {
      CMat G(1, 1);
      G(0, 0) = std::polar(1.0, rho.eval(x, y).real());
      return G;
    };
    g.dG = [rho, rx, ry](double x, double y, CMat& Gx, CMat& Gy) {
      cd e = std::polar(1.0, rho.eval(x, y).real());
      Gx.resize(1, 1);
      Gy.resize(1, 1);
      Gx(0, 0) = cd(0, 1) * rx.eval(x, y).real() * e;
      Gy(0, 0) = cd(0, 1) * ry.eval(x, y).real() * e;
    };
    return g;
  }
  if (n != 2) throw std::invalid_argument("seeded gauge: n must be 1 or 2");
  std::array<PolyZ, 4> p;  // a, b1, b2, b3
  std::array<PolyZ, 4> px, py;
  for (int i = 0; i < 4; ++i) {
    p[i] = PolyZ::seeded(rng, 2, 2, scale, true).vanish_boundary(1);
    px[i] = p[i].dx();
    py[i] = p[i].dy();
  }
  auto vals = [p](double x, double y, double& a, double b[3]) {
    a = p[0].eval(x, y).real();
    for (int i = 0; i < 3; ++i) b[i] = p[i + 1].eval(x, y).real();
  };
  g.G = [vals](double x, double y) {
    double a, b[3];
    vals(x, y, a, b);
    return su2_exp(a, b);
  };
  g.dG = [vals, px, py](double x, double y, CMat& Gx, CMat& Gy) {
    double a, b[3];
    vals(x, y, a, b);
    double dax = px[0].eval(x, y).real(), day = py[0].eval(x, y).real();
    double dbx[3], dby[3];
    for (int i = 0; i < 3; ++i) {
      dbx[i] = px[i + 1].eval(x, y).real();
      dby[i] = py[i + 1].eval(x, y).real();
    }
    Gx = su2_exp_d(a, b, dax, dbx);
    Gy = su2_exp_d(a, b, day, dby);
  };
  return g;
}

Connection gauge_transform(const Connection& A, const Gauge& g) {
  if (A.n() != g.n) throw std::invalid_argument("gauge_transform: dimension mismatch");
  Connection base = A;
  Gauge gg = g;
  return Connection(A.n(), [base, gg](double x, double y, CMat& B1, CMat& B2) {
    CMat A1, A2, Gx, Gy;
    base.components(x, y, A1, A2);
    CMat G = gg.G(x, y);
    gg.dG(x, y, Gx, Gy);
    CMat Gi = G.inverse();
    B1 = Gi * (Gx + A1 * G);
    B2 = Gi * (Gy + A2 * G);
  });
}

OneFormField covariant_d_section(const DiskContext& ctx, const Connection& A, const VField& s) {
  MatField A1, A2;
  A.sample(ctx, A1, A2);
  OneFormField out(s.n, ctx.grid);
  for (int r = 0; r < s.n; ++r) {
    out.b1[r] = d_x(ctx.grid, s.c[r]);
    out.b2[r] = d_y(ctx.grid, s.c[r]);
    for (int c = 0; c < s.n; ++c) {
      out.b1[r] += A1.at(r, c) * s.c[c];
      out.b2[r] += A2.at(r, c) * s.c[c];
    }
  }
  return out;
}

TwoFormField covariant_d_oneform(const DiskContext& ctx, const Connection& A,
                                 const OneFormField& beta) {
  MatField A1, A2;
  A.sample(ctx, A1, A2);
  TwoFormField out(beta.n, ctx.grid);
  for (int r = 0; r < beta.n; ++r) {
    out.c[r] = d_x(ctx.grid, beta.b2[r]) - d_y(ctx.grid, beta.b1[r]);
    for (int c = 0; c < beta.n; ++c)
      out.c[r] += A1.at(r, c) * beta.b2[c] - A2.at(r, c) * beta.b1[c];
  }
  return out;
}

OneFormField hodge_star(const OneFormField& beta) {
  OneFormField out = beta;
  for (int r = 0; r < beta.n; ++r) {
    out.b1[r] = -beta.b2[r];
    out.b2[r] = beta.b1[r];
  }
  return out;
}

TwoFormField hodge_star0(const DiskContext& ctx, const VField& s) {
  TwoFormField out(s.n, ctx.grid);
  for (int r = 0; r < s.n; ++r) out.c[r] = s.c[r] * ctx.e2lam;
  return out;
}

VField hodge_star2(const DiskContext& ctx, const TwoFormField& w) {
  VField out(w.n, ctx.grid);
  for (int r = 0; r < w.n; ++r) out.c[r] = w.c[r] * ctx.e2lam_inv;
  return out;
}

VField codifferential_oneform(const DiskContext& ctx, const Connection& A,
                              const OneFormField& beta) {
  MatField A1, A2;
  A.sample(ctx, A1, A2);
  VField out(beta.n, ctx.grid);
  for (int r = 0; r < beta.n; ++r) {
    CField div = d_x(ctx.grid, beta.b1[r]) + d_y(ctx.grid, beta.b2[r]);
    for (int c = 0; c < beta.n; ++c)
      div += A1.at(r, c) * beta.b1[c] + A2.at(r, c) * beta.b2[c];
    out.c[r] = -ctx.e2lam_inv * div;
  }
  return out;
}

OneFormField codifferential_twoform(const DiskContext& ctx, const Connection& A,
                                    const TwoFormField& w) {
  MatField A1, A2;
  A.sample(ctx, A1, A2);
  OneFormField out(w.n, ctx.grid);
  std::vector<CField> m(w.n);
  for (int r = 0; r < w.n; ++r) m[r] = w.c[r] * ctx.e2lam_inv;
  for (int r = 0; r < w.n; ++r) {
    CField m1 = d_x(ctx.grid, m[r]), m2 = d_y(ctx.grid, m[r]);
    for (int c = 0; c < w.n; ++c) {
      m1 += A1.at(r, c) * m[c];
      m2 += A2.at(r, c) * m[c];
    }
    out.b1[r] = m2;
    out.b2[r] = -m1;
  }
  return out;
}

VField star_d_oneform(const DiskContext& ctx, const Connection& A, const OneFormField& beta) {
  TwoFormField d = covariant_d_oneform(ctx, A, beta);
  return hodge_star2(ctx, d);
}

MatField curvature(const DiskContext& ctx, const Connection& A) {
  MatField A1, A2;
  A.sample(ctx, A1, A2);
  const int n = A.n();
  MatField F(n, ctx.grid);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      F.at(r, c) = d_x(ctx.grid, A2.at(r, c)) - d_y(ctx.grid, A1.at(r, c));
      for (int k = 0; k < n; ++k)
        F.at(r, c) += A1.at(r, k) * A2.at(k, c) - A2.at(r, k) * A1.at(k, c);
    }
  return F;
}

void fourier_parts(const DiskContext& ctx, const OneFormField& beta, VField& c_plus,
                   VField& c_minus) {
  c_plus = VField(beta.n, ctx.grid);
  c_minus = VField(beta.n, ctx.grid);
  for (int r = 0; r < beta.n; ++r) {
    c_plus.c[r] = 0.5 * ctx.elam_inv * (beta.b1[r] - cd(0, 1) * beta.b2[r]);
    c_minus.c[r] = 0.5 * ctx.elam_inv * (beta.b1[r] + cd(0, 1) * beta.b2[r]);
  }
}

OneFormField from_fourier_parts(const DiskContext& ctx, const VField& c_plus,
                                const VField& c_minus) {
  OneFormField out(c_plus.n, ctx.grid);
  for (int r = 0; r < c_plus.n; ++r) {
    out.b1[r] = ctx.elam * (c_plus.c[r] + c_minus.c[r]);
    out.b2[r] = cd(0, 1) * ctx.elam * (c_plus.c[r] - c_minus.c[r]);
  }
  return out;
}

}  // namespace argt
