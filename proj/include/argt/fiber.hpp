// Vertical Fourier analysis on SM: functions stored as fibre coefficients
// u_k(x), the frame operators X, X_perp, V via eta_{+-}, the attenuated
// mu_{+-}, the fibrewise Hilbert transform, and the bracket identity residual.
#pragma once

#include <map>

#include "argt/connection.hpp"
#include "argt/fft.hpp"

namespace argt {

struct FiberFn {
  int n = 0, kmax = 0;
  std::vector<VField> coef;  // index k + kmax, degrees k in [-kmax, kmax]

  FiberFn() = default;
  FiberFn(int n_, int kmax_, const PolarGrid& g)
      : n(n_), kmax(kmax_), coef(2 * kmax_ + 1, VField(n_, g)) {}

  VField& at(int k) { return coef[k + kmax]; }
  const VField& at(int k) const { return coef[k + kmax]; }
  bool has(int k) const { return k >= -kmax && k <= kmax; }

  // Synthesis at a phase point; spatial part by grid interpolation.
  CVec eval(const PolarGrid& g, double x, double y, double theta) const;
  CVec eval_node(int i, int j, double theta) const;

  double sup_coef(int k) const { return has(k) ? sup_norm(at(k)) : 0.0; }
  double sup_all() const;
  // L^2(SM) norm: 2 pi sum_k ||u_k||^2 with the metric area weight.
  double l2_norm(const DiskContext& ctx) const;
};

// Closed-form fibre function: finitely many modes with polynomial coefficients.
struct AnalyticFiberFn {
  int n = 0;
  std::map<int, std::vector<PolyZ>> modes;  // degree k -> n components

  CVec eval(double x, double y, double theta) const;
  FiberFn sample(const DiskContext& ctx, int kmax) const;
  AnalyticFiberFn hilbert() const;
  AnalyticFiberFn vertical() const;  // V = d/dtheta

  static AnalyticFiberFn seeded(int n, std::mt19937_64& rng, int kmax, double scale);
};

// Connection restricted to SM in fibre-degree form: A|SM = Ap e^{i th} + Am e^{-i th}.
struct SmConnection {
  int n = 0;
  MatField Ap, Am;
  static SmConnection make(const DiskContext& ctx, const Connection& A);
};

FiberFn eta_plus(const DiskContext& ctx, const FiberFn& u);
FiberFn eta_minus(const DiskContext& ctx, const FiberFn& u);
FiberFn apply_X(const DiskContext& ctx, const FiberFn& u);
FiberFn apply_Xperp(const DiskContext& ctx, const FiberFn& u);
FiberFn apply_V(const FiberFn& u);
FiberFn mu_plus(const DiskContext& ctx, const SmConnection& A, const FiberFn& u);
FiberFn mu_minus(const DiskContext& ctx, const SmConnection& A, const FiberFn& u);
// Multiplication by A(x, v) (degree shifts by +-1).
FiberFn mult_sm(const SmConnection& A, const FiberFn& u);
// Multiplication by (star A)(x, v): (star A)_{+1} = -i Ap, (star A)_{-1} = +i Am.
FiberFn mult_star_sm(const SmConnection& A, const FiberFn& u);

FiberFn hilbert(const FiberFn& u);
FiberFn hilbert_even(const FiberFn& u);  // H applied to even degrees only
FiberFn hilbert_odd(const FiberFn& u);   // H applied to odd degrees only

// Degree-parity guard: largest coefficient outside the expected set.
double degree_leakage(const FiberFn& u, const std::vector<int>& allowed);

// star d_A of the 1-form with SM restriction cp e^{i th} + cm e^{-i th},
// computed in fibre calculus: 2i (mu_-(cp .) - mu_+(cm .)).
VField star_dA_via_mu(const DiskContext& ctx, const SmConnection& A, const VField& cp,
                      const VField& cm);

// Sup-norm residual of [H, X + A]u = (X_perp + star A)(u_0) + {(X_perp + star A)u}_0
// with the left side evaluated through the geodesic flow (5-point flow
// derivative of the closed-form u) and the right side through grid stencils.
struct BracketOptions {
  int ntheta = 32;
  int stride = 2;
  double r_cap = 0.9;
  double dt_scale = 1.2;  // flow step = dt_scale / nr
};
double bracket_residual(const DiskContext& ctx, const Connection& A,
                        const AnalyticFiberFn& u, const BracketOptions& opt = {});

}  // namespace argt
