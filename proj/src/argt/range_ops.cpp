#include "argt/range_ops.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace argt {

namespace {

double cheb(int q, double t) {
  if (q == 0) return 1.0;
  if (q == 1) return t;
  double a = 1.0, b = t;
  for (int i = 2; i <= q; ++i) {
    double c = 2.0 * t * b - a;
    a = b;
    b = c;
  }
  return b;
}

}  // namespace

CVec WitnessBasis::eval(int idx, const BoundaryFan& p) const {
  const int nm = 2 * pmax + 1;
  int comp = idx / (nm * qmax);
  int rest = idx % (nm * qmax);
  int pi_ = rest / qmax - pmax;
  int q = rest % qmax;
  CVec v = CVec::Zero(n);
  double t = p.a / amax;
  if (std::abs(t) >= 1.0) return v;
  double win = std::pow(1.0 - t * t, 4);
  v[comp] = win * cheb(q, t) * std::polar(1.0, pi_ * p.phi);
  return v;
}

BoundaryFn WitnessBasis::element(int idx) const {
  WitnessBasis self = *this;
  return BoundaryFn::from_analytic(n, fan,
                                   [self, idx](const BoundaryFan& p) { return self.eval(idx, p); });
}

BoundaryFn WitnessBasis::combine(const Eigen::VectorXcd& coef) const {
  WitnessBasis self = *this;
  Eigen::VectorXcd c = coef;
  return BoundaryFn::from_analytic(n, fan, [self, c](const BoundaryFan& p) {
    CVec acc = CVec::Zero(self.n);
    for (int j = 0; j < c.size(); ++j) acc += c[j] * self.eval(j, p);
    return acc;
  });
}

BoundaryFn P_minus(const ScatteringData& sd, const BoundaryFn& w) {
  return operator_B(sd, ring_hilbert(operator_Q(sd, w), -1));
}

BoundaryFn P_plus(const ScatteringData& sd, const BoundaryFn& w) {
  return operator_B(sd, ring_hilbert(operator_Q(sd, w), +1));
}

VField adjoint_I0(const DiskContext& ctx, const InteriorTable& table, const BoundaryFn& w) {
  auto modes = table.sharp_modes(ctx, w, {0});
  VField out = modes[0];
  for (auto& c : out.c) c *= kTwoPi;
  return out;
}

OneFormField adjoint_I1(const DiskContext& ctx, const InteriorTable& table,
                        const BoundaryFn& w) {
  auto modes = table.sharp_modes(ctx, w, {+1, -1});
  OneFormField out = from_fourier_parts(ctx, modes[0], modes[1]);
  for (int a = 0; a < out.n; ++a) {
    out.b1[a] *= kPi;
    out.b2[a] *= kPi;
  }
  return out;
}

FiberFn normal_field(const DiskContext& ctx, const InteriorTable& table,
                     const BoundaryFn& If, int kmax) {
  return table.sharp_full(ctx, If, kmax);
}

VField normal0(const DiskContext& ctx, const InteriorTable& table, const BoundaryFn& If) {
  return table.sharp_modes(ctx, If, {0})[0];
}

SmFunction sm_from_section(const DiskContext& ctx, const VField& b) {
  const PolarGrid* g = &ctx.grid;
  VField bb = b;
  return [g, bb](double x, double y, double) {
    InterpStencil st = make_stencil(*g, x, y);
    CVec v(bb.n);
    for (int a = 0; a < bb.n; ++a) v[a] = apply_stencil(*g, st, bb.c[a]);
    return v;
  };
}

SmFunction sm_from_oneform(const DiskContext& ctx, const OneFormField& beta) {
  const PolarGrid* g = &ctx.grid;
  const ConformalMetric* m = ctx.metric;
  OneFormField bb = beta;
  return [g, m, bb](double x, double y, double th) {
    InterpStencil st = make_stencil(*g, x, y);
    double el = std::exp(-m->lambda(x, y));
    double c = std::cos(th), s = std::sin(th);
    CVec v(bb.n);
    for (int a = 0; a < bb.n; ++a)
      v[a] = el * (c * apply_stencil(*g, st, bb.b1[a]) + s * apply_stencil(*g, st, bb.b2[a]));
    return v;
  };
}

SmFunction sm_from_fiber(const DiskContext& ctx, const FiberFn& u) {
  const PolarGrid* g = &ctx.grid;
  FiberFn uu = u;
  return [g, uu](double x, double y, double th) { return uu.eval(*g, x, y, th); };
}

FactorizationReport factorization_check(const DiskContext& ctx, const Connection& A,
                                        const GeodesicIntegrator& integ,
                                        const ScatteringData& sd, const InteriorTable& table,
                                        const BoundaryFn& w) {
  FactorizationReport rep;
  const FanGrid& fan = sd.fan;

  // Identity 1: -2 pi P_- w = I_A^0( star d_A (I_A^1)^* w ).
  OneFormField beta = adjoint_I1(ctx, table, w);
  VField b = star_d_oneform(ctx, A, beta);
  BoundaryFn rhs0 = ray_transform(integ, A, fan, sm_from_section(ctx, b));
  BoundaryFn lhs0 = P_minus(sd, w);

  // Identity 2: -2 pi P_+ w = I_A^1( star d_A (I_A^0)^* w ).
  VField a0 = adjoint_I0(ctx, table, w);
  OneFormField beta2 = hodge_star(covariant_d_section(ctx, A, a0));
  BoundaryFn rhs1 = ray_transform(integ, A, fan, sm_from_oneform(ctx, beta2));
  BoundaryFn lhs1 = P_plus(sd, w);

  auto compare = [&](const BoundaryFn& lhs, const BoundaryFn& rhs, double& rel, double& abs) {
    double worst = 0, scale = 0;
    for (int l = 0; l < fan.nphi; ++l)
      for (int k = 0; k < fan.na; ++k) {
        if (std::abs(fan.as[k]) > kPi / 2 - fan.delta) continue;
        for (int a = 0; a < lhs.n; ++a) {
          cd dv = -kTwoPi * lhs.vals[a](l, k) - rhs.vals[a](l, k);
          worst = std::max(worst, std::abs(dv));
          scale = std::max(scale, std::abs(rhs.vals[a](l, k)));
        }
      }
    abs = worst;
    rel = worst / std::max(scale, 1e-300);
  };
  compare(lhs0, rhs0, rep.rel_minus, rep.abs_minus);
  compare(lhs1, rhs1, rep.rel_plus, rep.abs_plus);
  return rep;
}

TsvdResult tsvd_solve(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& rhs, double rtol) {
  TsvdResult out;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  out.smax = sv.size() ? sv[0] : 0.0;
  double thresh = out.smax * rtol;
  Eigen::VectorXcd y = svd.matrixU().adjoint() * rhs;
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(sv.size());
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] > thresh) {
      z[i] = y[i] / sv[i];
      ++rank;
    }
  }
  out.rank = rank;
  out.coef = svd.matrixV() * z;
  double rn = (M * out.coef - rhs).norm();
  out.rel_residual = rn / std::max(rhs.norm(), 1e-300);
  out.converged = rank > 0;
  return out;
}

Eigen::VectorXcd boundary_to_vec(const ConformalMetric& m, const BoundaryFn& u) {
  const FanGrid& fan = u.fan;
  Eigen::VectorXcd v(fan.size() * u.n);
  int idx = 0;
  for (int l = 0; l < fan.nphi; ++l)
    for (int k = 0; k < fan.na; ++k) {
      double w = std::sqrt(fan.mu_weight(m, l, k));
      for (int a = 0; a < u.n; ++a) v[idx++] = u.vals[a](l, k) * w;
    }
  return v;
}

Eigen::VectorXcd section_to_vec(const DiskContext& ctx, const VField& s) {
  const PolarGrid& g = ctx.grid;
  Eigen::VectorXcd v(g.size() * s.n);
  int idx = 0;
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nphi; ++j) {
      double w = std::sqrt(g.wr[i] * g.hphi * ctx.e2lam(i, j));
      for (int a = 0; a < s.n; ++a) v[idx++] = s.c[a](i, j) * w;
    }
  return v;
}

Eigen::VectorXcd oneform_to_vec(const DiskContext& ctx, const OneFormField& b) {
  const PolarGrid& g = ctx.grid;
  Eigen::VectorXcd v(2 * g.size() * b.n);
  int idx = 0;
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nphi; ++j) {
      double w = std::sqrt(g.wr[i] * g.hphi);  // conformal invariance on 1-forms
      for (int a = 0; a < b.n; ++a) {
        v[idx++] = b.b1[a](i, j) * w;
        v[idx++] = b.b2[a](i, j) * w;
      }
    }
  return v;
}

Eigen::MatrixXcd assemble_P_matrix(const ConformalMetric& m, const ScatteringData& sd,
                                   const WitnessBasis& basis, int parity) {
  const int cols = basis.dim();
  Eigen::MatrixXcd M(sd.fan.size() * sd.n, cols);
  parallel_for(cols, [&](int j) {
    BoundaryFn wj = basis.element(j);
    BoundaryFn pj = operator_B(sd, ring_hilbert(operator_Q(sd, wj), parity));
    M.col(j) = boundary_to_vec(m, pj);
  });
  return M;
}

namespace {

// One pass over the table accumulating all witness columns of the requested
// fibre mode k of (w_j)#.
void accumulate_sharp(const DiskContext& ctx, const InteriorTable& table,
                      const WitnessBasis& basis, int kmode, int row0_stride,
                      Eigen::MatrixXcd& M, int row_block, double weight_factor) {
  const PolarGrid& g = ctx.grid;
  const int n = table.n();
  const int nm = 2 * basis.pmax + 1;
  parallel_for(g.nr * g.nphi, [&](int node) {
    int i = node / g.nphi, j = node % g.nphi;
    double wgt = std::sqrt(g.wr[i] * g.hphi * weight_factor * ctx.e2lam(i, j));
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, basis.dim());
    std::vector<cd> ep(nm);
    std::vector<double> tq(basis.qmax);
    for (int s = 0; s < table.ntheta(); ++s) {
      BoundaryFan e = table.entry(i, j, s);
      double t = e.a / basis.amax;
      if (std::abs(t) >= 1.0) continue;
      double win = std::pow(1.0 - t * t, 4);
      for (int p = -basis.pmax; p <= basis.pmax; ++p)
        ep[p + basis.pmax] = std::polar(1.0, p * e.phi);
      for (int q = 0; q < basis.qmax; ++q) tq[q] = cheb(q, t);
      CMat U = table.U(i, j, s);
      cd tw = std::polar(1.0, -kmode * table.theta(s)) / double(table.ntheta());
      for (int comp = 0; comp < n; ++comp) {
        // witness = win * tq * ep in component `comp`; sharp adds U * e_comp.
        for (int p = 0; p < nm; ++p)
          for (int q = 0; q < basis.qmax; ++q) {
            cd bval = win * tq[q] * ep[p] * tw;
            int col = comp * nm * basis.qmax + p * basis.qmax + q;
            for (int r = 0; r < n; ++r) acc(r, col) += U(r, comp) * bval;
          }
      }
    }
    for (int r = 0; r < n; ++r)
      M.row((node * n + r) * row0_stride + row_block) += (wgt * acc.row(r)).matrix();
  });
}

}  // namespace

Eigen::MatrixXcd assemble_sharp0_matrix(const DiskContext& ctx, const InteriorTable& table,
                                        const WitnessBasis& basis) {
  Eigen::MatrixXcd M =
      Eigen::MatrixXcd::Zero(ctx.grid.size() * table.n(), basis.dim());
  accumulate_sharp(ctx, table, basis, 0, 1, M, 0, 1.0);
  return M;
}

Eigen::MatrixXcd assemble_sharp1_matrix(const DiskContext& ctx, const InteriorTable& table,
                                        const WitnessBasis& basis) {
  // Rows: for each node and component, the (+1) mode then the (-1) mode,
  // weighted like the 1-form inner product (factor 2 e^{2 lambda}).
  Eigen::MatrixXcd M =
      Eigen::MatrixXcd::Zero(2 * ctx.grid.size() * table.n(), basis.dim());
  accumulate_sharp(ctx, table, basis, +1, 2, M, 0, 2.0);
  accumulate_sharp(ctx, table, basis, -1, 2, M, 1, 2.0);
  return M;
}

RangeTestReport range_test_0form_blind(const DiskContext& ctx, const ScatteringData& sd,
                                       const WitnessBasis& basis, const BoundaryFn& u,
                                       double rtol) {
  RangeTestReport rep;
  rep.method = "least-squares";
  Eigen::MatrixXcd M = assemble_P_matrix(*ctx.metric, sd, basis, -1);
  Eigen::VectorXcd rhs = boundary_to_vec(*ctx.metric, u);
  TsvdResult r = tsvd_solve(M, rhs, rtol);
  rep.witness = r.coef;
  rep.residual_rel = r.rel_residual;
  rep.residual_abs = r.rel_residual * rhs.norm();
  rep.ls_converged = r.converged;
  return rep;
}

RangeTestReport range_test_0form_witness(const DiskContext& ctx, const ScatteringData& sd,
                                         const InteriorTable& table, const WitnessBasis& basis,
                                         const BoundaryFn& u, const OneFormField& beta,
                                         double rtol) {
  RangeTestReport rep;
  rep.method = "forward-identity";
  RangeTestReport fit = solve_adjoint1(ctx, table, basis, beta, rtol);
  rep.witness = fit.witness;
  BoundaryFn w = basis.combine(fit.witness);
  BoundaryFn pm = P_minus(sd, w);
  // u = I_A^0(b) should equal -2 pi P_- w.
  double num = 0, den = 0;
  for (int l = 0; l < sd.fan.nphi; ++l)
    for (int k = 0; k < sd.fan.na; ++k) {
      double wt = sd.fan.mu_weight(*ctx.metric, l, k);
      for (int a = 0; a < u.n; ++a) {
        cd dv = u.vals[a](l, k) + kTwoPi * pm.vals[a](l, k);
        num += std::norm(dv) * wt;
        den += std::norm(u.vals[a](l, k)) * wt;
      }
    }
  rep.residual_abs = std::sqrt(num);
  rep.residual_rel = std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
  rep.ls_converged = fit.ls_converged;
  return rep;
}

RangeTestReport range_test_1form(const DiskContext& ctx, const ScatteringData& sd,
                                 const WitnessBasis& basis,
                                 const std::vector<BoundaryFn>& harmonic_data,
                                 const BoundaryFn& u, double rtol) {
  RangeTestReport rep;
  rep.method = "least-squares";
  Eigen::MatrixXcd M = assemble_P_matrix(*ctx.metric, sd, basis, +1);
  const int d = static_cast<int>(harmonic_data.size());
  Eigen::MatrixXcd Mfull(M.rows(), M.cols() + d);
  Mfull.leftCols(M.cols()) = M;
  for (int j = 0; j < d; ++j)
    Mfull.col(M.cols() + j) = boundary_to_vec(*ctx.metric, harmonic_data[j]);
  Eigen::VectorXcd rhs = boundary_to_vec(*ctx.metric, u);
  TsvdResult r = tsvd_solve(Mfull, rhs, rtol);
  rep.witness = r.coef.head(M.cols());
  for (int j = 0; j < d; ++j) rep.harmonic_coeffs.push_back(r.coef[M.cols() + j]);
  rep.residual_rel = r.rel_residual;
  rep.residual_abs = r.rel_residual * rhs.norm();
  rep.ls_converged = r.converged;
  return rep;
}

RangeTestReport solve_adjoint0(const DiskContext& ctx, const InteriorTable& table,
                               const WitnessBasis& basis, const VField& b, double rtol) {
  RangeTestReport rep;
  rep.method = "least-squares";
  Eigen::MatrixXcd M = assemble_sharp0_matrix(ctx, table, basis);
  Eigen::VectorXcd rhs = section_to_vec(ctx, b);
  TsvdResult r = tsvd_solve(M, rhs, rtol);
  rep.witness = r.coef;
  rep.residual_rel = r.rel_residual;
  rep.residual_abs = r.rel_residual * rhs.norm();
  rep.ls_converged = r.converged;
  return rep;
}

RangeTestReport solve_adjoint1(const DiskContext& ctx, const InteriorTable& table,
                               const WitnessBasis& basis, const OneFormField& beta,
                               double rtol) {
  RangeTestReport rep;
  rep.method = "least-squares";
  Eigen::MatrixXcd M = assemble_sharp1_matrix(ctx, table, basis);
  // Right-hand side: fibre parts of beta / pi, stacked (+1, -1) like the matrix.
  VField cp, cm;
  fourier_parts(ctx, beta, cp, cm);
  const PolarGrid& g = ctx.grid;
  const int n = beta.n;
  Eigen::VectorXcd rhs(2 * g.size() * n);
  for (int node = 0; node < g.size(); ++node) {
    int i = node / g.nphi, j = node % g.nphi;
    double w = std::sqrt(g.wr[i] * g.hphi * 2.0 * ctx.e2lam(i, j));
    for (int a = 0; a < n; ++a) {
      rhs[(node * n + a) * 2 + 0] = cp.c[a](i, j) / kPi * w;
      rhs[(node * n + a) * 2 + 1] = cm.c[a](i, j) / kPi * w;
    }
  }
  TsvdResult r = tsvd_solve(M, rhs, rtol);
  rep.witness = r.coef;
  rep.residual_rel = r.rel_residual;
  rep.residual_abs = r.rel_residual * rhs.norm();
  rep.ls_converged = r.converged;
  return rep;
}

BoundaryFn odd_noise(const ConformalMetric& m, const ScatteringData& sd, std::mt19937_64& rng,
                     const BoundaryFn& u, double rel_amplitude) {
  // Smooth seeded profile antisymmetrized under geodesic reversal.
  const FanGrid& fan = sd.fan;
  const int n = u.n;
  std::vector<std::vector<cd>> cf(n);
  const int P = 4, Q = 4;
  for (int a = 0; a < n; ++a)
    for (int p = -P; p <= P; ++p)
      for (int q = 0; q < Q; ++q)
        cf[a].push_back(cd(unit_draw(rng), unit_draw(rng)) / (1.0 + p * p + q * q));
  auto smooth = [&](int a, const BoundaryFan& f) {
    cd acc = 0;
    int idx = 0;
    for (int p = -P; p <= P; ++p)
      for (int q = 0; q < Q; ++q)
        acc += cf[a][idx++] * std::polar(1.0, p * f.phi) * std::cos((2 * q + 1) * f.a / 2.0);
    return acc;
  };
  BoundaryFn noise(n, fan);
  for (int l = 0; l < fan.nphi; ++l)
    for (int k = 0; k < fan.na; ++k) {
      int idx = l * fan.na + k;
      BoundaryFan here = fan.point(l, k);
      BoundaryFan rev = reverse_of_exit(sd.alpha[idx]);
      for (int a = 0; a < n; ++a)
        noise.vals[a](l, k) = smooth(a, here) - smooth(a, rev);
    }
  double nn = norm_mu(m, noise);
  double un = norm_mu(m, u);
  double scale = (nn > 0) ? rel_amplitude * un / nn : 0.0;
  for (int a = 0; a < n; ++a) noise.vals[a] *= scale;
  return noise;
}

}  // namespace argt
