// Range machinery: the boundary operators P+- = B H+- Q, adjoints of I_A^0 and
// I_A^1, the normal operator, the factorization identities, and the
// TSVD-regularized range membership tests.
#pragma once

#include <string>

#include "argt/transport.hpp"

namespace argt {

// Margin-supported witness space: window(a) * e^{i p phi} * T_q(a / amax)
// per component, with window = (1 - (a/amax)^2)^4.
struct WitnessBasis {
  int n = 1;
  FanGrid fan;
  int pmax = 6, qmax = 8;
  double amax = kPi / 2 - 0.15;

  WitnessBasis() = default;
  WitnessBasis(int n_, const FanGrid& f, int pmax_, int qmax_, double amax_)
      : n(n_), fan(f), pmax(pmax_), qmax(qmax_), amax(amax_) {}

  int dim() const { return n * (2 * pmax + 1) * qmax; }
  CVec eval(int idx, const BoundaryFan& p) const;
  BoundaryFn element(int idx) const;
  // Closed-form witness from fitted coefficients.
  BoundaryFn combine(const Eigen::VectorXcd& coef) const;
};

BoundaryFn P_minus(const ScatteringData& sd, const BoundaryFn& w);
BoundaryFn P_plus(const ScatteringData& sd, const BoundaryFn& w);

// (I_A^0)^* w = 2 pi (w#)_0 and (I_A^1)^* w = pi (w#_1 + w#_-1) as a 1-form.
VField adjoint_I0(const DiskContext& ctx, const InteriorTable& table, const BoundaryFn& w);
OneFormField adjoint_I1(const DiskContext& ctx, const InteriorTable& table,
                        const BoundaryFn& w);

// N_A f = I_A^* I_A f = (I_A f)#; pass the boundary data I_A f.
FiberFn normal_field(const DiskContext& ctx, const InteriorTable& table,
                     const BoundaryFn& If, int kmax);
VField normal0(const DiskContext& ctx, const InteriorTable& table, const BoundaryFn& If);

// Phase-space integrand adapters for the ray transform.
SmFunction sm_from_section(const DiskContext& ctx, const VField& b);
SmFunction sm_from_oneform(const DiskContext& ctx, const OneFormField& beta);
SmFunction sm_from_fiber(const DiskContext& ctx, const FiberFn& u);

struct FactorizationReport {
  double rel_minus = 0;  // -2 pi P_- = I_A^0 star d_A (I_A^1)^*
  double rel_plus = 0;   // -2 pi P_+ = I_A^1 star d_A (I_A^0)^*
  double abs_minus = 0, abs_plus = 0;
};
FactorizationReport factorization_check(const DiskContext& ctx, const Connection& A,
                                        const GeodesicIntegrator& integ,
                                        const ScatteringData& sd, const InteriorTable& table,
                                        const BoundaryFn& w);

struct TsvdResult {
  Eigen::VectorXcd coef;
  double rel_residual = 0;
  int rank = 0;
  double smax = 0;
  bool converged = true;
};
TsvdResult tsvd_solve(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& rhs, double rtol);

// Flattening with quadrature square roots, so Euclidean residuals are the
// discrete L^2 ones.
Eigen::VectorXcd boundary_to_vec(const ConformalMetric& m, const BoundaryFn& u);
Eigen::VectorXcd section_to_vec(const DiskContext& ctx, const VField& s);
Eigen::VectorXcd oneform_to_vec(const DiskContext& ctx, const OneFormField& b);

// Column assembly (parallel over columns / nodes, deterministic).
Eigen::MatrixXcd assemble_P_matrix(const ConformalMetric& m, const ScatteringData& sd,
                                   const WitnessBasis& basis, int parity);
// Matrix of the map coef -> selected fibre mode of (witness)#, flattened like
// section_to_vec (k = 0) or stacked modes (+1, -1) like oneform_to_vec.
Eigen::MatrixXcd assemble_sharp0_matrix(const DiskContext& ctx, const InteriorTable& table,
                                        const WitnessBasis& basis);
Eigen::MatrixXcd assemble_sharp1_matrix(const DiskContext& ctx, const InteriorTable& table,
                                        const WitnessBasis& basis);

struct RangeTestReport {
  std::string method;
  double residual_abs = 0;
  double residual_rel = 0;
  Eigen::VectorXcd witness;
  std::vector<cd> harmonic_coeffs;
  bool ls_converged = true;
};

// Blind membership test: least squares over the witness span of P_-.
RangeTestReport range_test_0form_blind(const DiskContext& ctx, const ScatteringData& sd,
                                       const WitnessBasis& basis, const BoundaryFn& u,
                                       double rtol = 1e-6);
// Witness synthesis for u = I_A^0(b): takes the solenoidal potential beta
// (star d_A beta = b, d_A star beta = 0) and solves (I_A^1)^* w = beta.
RangeTestReport range_test_0form_witness(const DiskContext& ctx, const ScatteringData& sd,
                                         const InteriorTable& table, const WitnessBasis& basis,
                                         const BoundaryFn& u, const OneFormField& beta,
                                         double rtol = 1e-6);
// 1-form test: u ~ P_+ w + sum_j c_j I_A^1(eta_j) over a given harmonic basis.
RangeTestReport range_test_1form(const DiskContext& ctx, const ScatteringData& sd,
                                 const WitnessBasis& basis,
                                 const std::vector<BoundaryFn>& harmonic_data,
                                 const BoundaryFn& u, double rtol = 1e-6);

// Surjectivity solves (adjoint realizations): I_{0,A}^* w = (w#)_0 = b and
// (I_A^1)^* w = beta.
RangeTestReport solve_adjoint0(const DiskContext& ctx, const InteriorTable& table,
                               const WitnessBasis& basis, const VField& b,
                               double rtol = 1e-6);
RangeTestReport solve_adjoint1(const DiskContext& ctx, const InteriorTable& table,
                               const WitnessBasis& basis, const OneFormField& beta,
                               double rtol = 1e-6);

// Seeded smooth boundary noise, antisymmetrized under geodesic reversal and
// scaled to a relative mu-norm; used by the non-membership calibration.
BoundaryFn odd_noise(const ConformalMetric& m, const ScatteringData& sd, std::mt19937_64& rng,
                     const BoundaryFn& u, double rel_amplitude);

}  // namespace argt
