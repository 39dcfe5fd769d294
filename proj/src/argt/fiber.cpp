#include "argt/fiber.hpp"

#include <cmath>

namespace argt {

CVec FiberFn::eval(const PolarGrid& g, double x, double y, double theta) const {
  InterpStencil st = make_stencil(g, x, y);
  CVec out = CVec::Zero(n);
  for (int k = -kmax; k <= kmax; ++k) {
    cd ph = std::polar(1.0, k * theta);
    const VField& f = at(k);
    for (int a = 0; a < n; ++a) out[a] += ph * apply_stencil(g, st, f.c[a]);
  }
  return out;
}

CVec FiberFn::eval_node(int i, int j, double theta) const {
  CVec out = CVec::Zero(n);
  for (int k = -kmax; k <= kmax; ++k) {
    cd ph = std::polar(1.0, k * theta);
    const VField& f = at(k);
    for (int a = 0; a < n; ++a) out[a] += ph * f.c[a](i, j);
  }
  return out;
}

double FiberFn::sup_all() const {
  double m = 0;
  for (const auto& f : coef) m = std::max(m, sup_norm(f));
  return m;
}

double FiberFn::l2_norm(const DiskContext& ctx) const {
  double acc = 0;
  for (const auto& f : coef) {
    double nk = l2_norm_section(ctx, f);
    acc += nk * nk;
  }
  return std::sqrt(kTwoPi * acc);
}

CVec AnalyticFiberFn::eval(double x, double y, double theta) const {
  CVec out = CVec::Zero(n);
  for (const auto& [k, comps] : modes) {
    cd ph = std::polar(1.0, k * theta);
    for (int a = 0; a < n; ++a) out[a] += ph * comps[a].eval(x, y);
  }
  return out;
}

FiberFn AnalyticFiberFn::sample(const DiskContext& ctx, int kmax) const {
  FiberFn out(n, kmax, ctx.grid);
  for (const auto& [k, comps] : modes) {
    if (!out.has(k)) throw std::invalid_argument("AnalyticFiberFn::sample: kmax too small");
    for (int a = 0; a < n; ++a) out.at(k).c[a] = argt::sample(ctx.grid, [&](double x, double y) {
      return comps[a].eval(x, y);
    });
  }
  return out;
}

AnalyticFiberFn AnalyticFiberFn::hilbert() const {
  AnalyticFiberFn out = *this;
  for (auto& [k, comps] : out.modes) {
    if (k == 0) {
      for (auto& p : comps) p = p * cd(0, 0);
      continue;
    }
    cd f = (k > 0) ? cd(0, -1) : cd(0, 1);
    for (auto& p : comps) p = p * f;
  }
  return out;
}

AnalyticFiberFn AnalyticFiberFn::vertical() const {
  AnalyticFiberFn out = *this;
  for (auto& [k, comps] : out.modes)
    for (auto& p : comps) p = p * cd(0, double(k));
  return out;
}

AnalyticFiberFn AnalyticFiberFn::seeded(int n, std::mt19937_64& rng, int kmax, double scale) {
  AnalyticFiberFn out;
  out.n = n;
  for (int k = -kmax; k <= kmax; ++k) {
    std::vector<PolyZ> comps;
    for (int a = 0; a < n; ++a)
      comps.push_back(PolyZ::seeded(rng, 3, 3, scale / (1.0 + k * k), false));
    out.modes[k] = std::move(comps);
  }
  return out;
}

SmConnection SmConnection::make(const DiskContext& ctx, const Connection& A) {
  SmConnection s;
  s.n = A.n();
  A.sample_pm(ctx, s.Ap, s.Am);
  return s;
}

namespace {

// Shared banded application: out[k+1] += e^{-lambda}(dz u_k - k dz(lambda) u_k),
// out[k-1] += e^{-lambda}(dzbar u_k + k dzbar(lambda) u_k).
FiberFn eta_apply(const DiskContext& ctx, const FiberFn& u, bool plus) {
  FiberFn out(u.n, u.kmax + 1, ctx.grid);
  CField dlz = 0.5 * (ctx.lam_x.cast<cd>() - cd(0, 1) * ctx.lam_y.cast<cd>());
  CField dlzb = 0.5 * (ctx.lam_x.cast<cd>() + cd(0, 1) * ctx.lam_y.cast<cd>());
  CField el = ctx.elam_inv.cast<cd>();
  for (int k = -u.kmax; k <= u.kmax; ++k) {
    for (int a = 0; a < u.n; ++a) {
      const CField& f = u.at(k).c[a];
      if (plus)
        out.at(k + 1).c[a] += el * (d_z(ctx.grid, f) - double(k) * dlz * f);
      else
        out.at(k - 1).c[a] += el * (d_zbar(ctx.grid, f) + double(k) * dlzb * f);
    }
  }
  return out;
}

FiberFn shift_mult(const MatField& M, const FiberFn& u, int shift) {
  FiberFn out;
  out.n = u.n;
  out.kmax = u.kmax + 1;
  const auto rows = u.at(0).c[0].rows(), cols = u.at(0).c[0].cols();
  for (int k = 0; k < 2 * out.kmax + 1; ++k) {
    VField v;
    v.n = u.n;
    v.c.assign(u.n, CField::Zero(rows, cols));
    out.coef.push_back(std::move(v));
  }
  for (int k = -u.kmax; k <= u.kmax; ++k)
    for (int r = 0; r < u.n; ++r)
      for (int c = 0; c < u.n; ++c)
        out.at(k + shift).c[r] += M.at(r, c) * u.at(k).c[c];
  return out;
}

FiberFn add(const FiberFn& a, const FiberFn& b) {
  const FiberFn& big = (a.kmax >= b.kmax) ? a : b;
  const FiberFn& small = (a.kmax >= b.kmax) ? b : a;
  FiberFn out = big;
  for (int k = -small.kmax; k <= small.kmax; ++k)
    for (int c = 0; c < small.n; ++c) out.at(k).c[c] += small.at(k).c[c];
  return out;
}

}  // namespace

FiberFn eta_plus(const DiskContext& ctx, const FiberFn& u) { return eta_apply(ctx, u, true); }
FiberFn eta_minus(const DiskContext& ctx, const FiberFn& u) { return eta_apply(ctx, u, false); }

FiberFn apply_X(const DiskContext& ctx, const FiberFn& u) {
  return add(eta_plus(ctx, u), eta_minus(ctx, u));
}

FiberFn apply_Xperp(const DiskContext& ctx, const FiberFn& u) {
  FiberFn p = eta_plus(ctx, u), m = eta_minus(ctx, u);
  FiberFn out = p;
  for (int k = -out.kmax; k <= out.kmax; ++k)
    for (int c = 0; c < out.n; ++c)
      out.at(k).c[c] = cd(0, 1) * (m.at(k).c[c] - p.at(k).c[c]);
  return out;
}

FiberFn apply_V(const FiberFn& u) {
  FiberFn out = u;
  for (int k = -u.kmax; k <= u.kmax; ++k)
    for (int c = 0; c < u.n; ++c) out.at(k).c[c] = cd(0, double(k)) * u.at(k).c[c];
  return out;
}

FiberFn mult_sm(const SmConnection& A, const FiberFn& u) {
  return add(shift_mult(A.Ap, u, +1), shift_mult(A.Am, u, -1));
}

FiberFn mult_star_sm(const SmConnection& A, const FiberFn& u) {
  FiberFn up = shift_mult(A.Ap, u, +1), um = shift_mult(A.Am, u, -1);
  FiberFn out = up;
  for (int k = -out.kmax; k <= out.kmax; ++k)
    for (int c = 0; c < out.n; ++c)
      out.at(k).c[c] = cd(0, 1) * (um.at(k).c[c] - up.at(k).c[c]);
  return out;
}

FiberFn mu_plus(const DiskContext& ctx, const SmConnection& A, const FiberFn& u) {
  return add(eta_plus(ctx, u), shift_mult(A.Ap, u, +1));
}

FiberFn mu_minus(const DiskContext& ctx, const SmConnection& A, const FiberFn& u) {
  return add(eta_minus(ctx, u), shift_mult(A.Am, u, -1));
}

FiberFn hilbert(const FiberFn& u) {
  FiberFn out = u;
  for (int k = -u.kmax; k <= u.kmax; ++k) {
    cd f = (k == 0) ? cd(0, 0) : (k > 0 ? cd(0, -1) : cd(0, 1));
    for (int c = 0; c < u.n; ++c) out.at(k).c[c] = f * u.at(k).c[c];
  }
  return out;
}

namespace {
FiberFn hilbert_parity(const FiberFn& u, int parity) {
  FiberFn out = u;
  for (int k = -u.kmax; k <= u.kmax; ++k) {
    cd f = 0;
    if (std::abs(k) % 2 == parity && k != 0) f = (k > 0) ? cd(0, -1) : cd(0, 1);
    for (int c = 0; c < u.n; ++c) out.at(k).c[c] = f * u.at(k).c[c];
  }
  return out;
}
}  // namespace

FiberFn hilbert_even(const FiberFn& u) { return hilbert_parity(u, 0); }
FiberFn hilbert_odd(const FiberFn& u) { return hilbert_parity(u, 1); }

double degree_leakage(const FiberFn& u, const std::vector<int>& allowed) {
  double m = 0;
  for (int k = -u.kmax; k <= u.kmax; ++k) {
    bool ok = false;
    for (int a : allowed)
      if (a == k) ok = true;
    if (!ok) m = std::max(m, u.sup_coef(k));
  }
  return m;
}

VField star_dA_via_mu(const DiskContext& ctx, const SmConnection& A, const VField& cp,
                      const VField& cm) {
  const int n = cp.n;
  VField out(n, ctx.grid);
  CField dlz = 0.5 * (ctx.lam_x.cast<cd>() - cd(0, 1) * ctx.lam_y.cast<cd>());
  CField dlzb = 0.5 * (ctx.lam_x.cast<cd>() + cd(0, 1) * ctx.lam_y.cast<cd>());
  CField el = ctx.elam_inv.cast<cd>();
  for (int r = 0; r < n; ++r) {
    // mu_-(cp e^{i th}) at degree 0 and mu_+(cm e^{-i th}) at degree 0.
    CField mm = el * (d_zbar(ctx.grid, cp.c[r]) + dlzb * cp.c[r]);
    CField mp = el * (d_z(ctx.grid, cm.c[r]) + dlz * cm.c[r]);
    for (int c = 0; c < n; ++c) {
      mm += A.Am.at(r, c) * cp.c[c];
      mp += A.Ap.at(r, c) * cm.c[c];
    }
    out.c[r] = 2.0 * cd(0, 1) * (mm - mp);
  }
  return out;
}

double bracket_residual(const DiskContext& ctx, const Connection& A,
                        const AnalyticFiberFn& u, const BracketOptions& opt) {
  const int n = u.n;
  const int nt = opt.ntheta;
  GeodesicIntegrator integ(*ctx.metric, 1.0 / 512);
  const double dt = opt.dt_scale / ctx.grid.nr;

  int kact = 0;
  for (const auto& [k, comps] : u.modes) kact = std::max(kact, std::abs(k));
  AnalyticFiberFn hu = u.hilbert();

  // Right side on grid: (Xperp + star A)(u_0) + zero-degree part of (Xperp + star A)u.
  SmConnection smA = SmConnection::make(ctx, A);
  FiberFn us = u.sample(ctx, kact + 1);
  FiberFn u0(n, 1, ctx.grid);
  u0.at(0) = us.at(0);
  FiberFn t1 = apply_Xperp(ctx, u0);
  FiberFn t1b = mult_star_sm(smA, u0);
  FiberFn full = apply_Xperp(ctx, us);
  FiberFn fullb = mult_star_sm(smA, us);

  auto flow_x = [&](const AnalyticFiberFn& f, const PhasePoint& p) {
    // 5-point central derivative along the geodesic flow.
    auto at = [&](double s) {
      PhasePoint q = integ.advance(p, s, 2);
      return f.eval(q.x.x(), q.x.y(), q.theta);
    };
    CVec v = (-at(2 * dt) + 8.0 * at(dt) - 8.0 * at(-dt) + at(-2 * dt)) / (12.0 * dt);
    return v;
  };

  double worst = 0;
  for (int i = 0; i < ctx.grid.nr; i += opt.stride) {
    if (ctx.grid.r[i] > opt.r_cap) continue;
    for (int j = 0; j < ctx.grid.nphi; j += opt.stride) {
      Vec2 p = ctx.grid.node(i, j);
      std::vector<std::vector<cd>> samples(n, std::vector<cd>(nt));
      for (int s = 0; s < nt; ++s) {
        double th = kTwoPi * s / nt;
        PhasePoint pp{p, th};
        CMat Asm = A.eval_sm(*ctx.metric, p.x(), p.y(), th);
        CVec xa = flow_x(u, pp) + Asm * u.eval(p.x(), p.y(), th);
        for (int a = 0; a < n; ++a) samples[a][s] = xa[a];
      }
      // H applied fibrewise to (X + A)u.
      std::vector<std::vector<cd>> hxa(n);
      for (int a = 0; a < n; ++a) {
        auto cf = circle_analyze(samples[a]);
        for (int k = -nt / 2; k < nt - nt / 2; ++k) {
          cd f = (k == 0) ? cd(0, 0) : (k > 0 ? cd(0, -1) : cd(0, 1));
          cf[k + nt / 2] *= f;
        }
        hxa[a] = circle_synthesize(cf);
      }
      for (int s = 0; s < nt; ++s) {
        double th = kTwoPi * s / nt;
        PhasePoint pp{p, th};
        CMat Asm = A.eval_sm(*ctx.metric, p.x(), p.y(), th);
        CVec lhs(n);
        CVec xahu = flow_x(hu, pp) + Asm * hu.eval(p.x(), p.y(), th);
        for (int a = 0; a < n; ++a) lhs[a] = hxa[a][s] - xahu[a];

        CVec rhs = CVec::Zero(n);
        cd ep = std::polar(1.0, th), em = std::conj(ep);
        for (int a = 0; a < n; ++a) {
          rhs[a] += (t1.at(1).c[a](i, j) + t1b.at(1).c[a](i, j)) * ep;
          rhs[a] += (t1.at(-1).c[a](i, j) + t1b.at(-1).c[a](i, j)) * em;
          rhs[a] += full.at(0).c[a](i, j) + fullb.at(0).c[a](i, j);
        }
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    }
  }
  return worst;
}

}  // namespace argt
