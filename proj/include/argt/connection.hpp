// Unitary connections as skew-Hermitian matrices of 1-forms: d_A, the Hodge
// star, curvature, gauge transforms, and the (+-1)-degree parts of 1-forms.
#pragma once

#include <functional>
#include <random>

#include "argt/context.hpp"
#include "argt/polyz.hpp"

namespace argt {

// Connection evaluated anywhere on the disk (analytic closure or grid
// interpolation); grid samples are materialized per context for stencil ops.
class Connection {
 public:
  using Eval = std::function<void(double x, double y, CMat& A1, CMat& A2)>;

  Connection() = default;
  Connection(int n, Eval eval) : n_(n), eval_(std::move(eval)) {}

  static Connection zero(int n);
  // n = 1 abelian connection i(g1 dx1 + g2 dx2) with real polynomial g1, g2.
  static Connection abelian(const PolyZ& g1, const PolyZ& g2);
  // Seeded skew-Hermitian connection with smooth polynomial entries.
  static Connection seeded(int n, std::mt19937_64& rng, double scale);
  // Interpolating connection over externally supplied grid samples.
  static Connection from_grid(int n, const PolarGrid& g, MatField A1, MatField A2);

  int n() const { return n_; }
  void components(double x, double y, CMat& A1, CMat& A2) const { eval_(x, y, A1, A2); }

  // A(x, v) for the g-unit vector of (x, theta): e^{-lambda}(A1 cos + A2 sin).
  CMat eval_sm(const ConformalMetric& m, double x, double y, double theta) const;

  // Skew-Hermitian deviation max over grid nodes (sanity diagnostic).
  double skew_defect(const DiskContext& ctx) const;

  // Grid samples of the components on the context grid.
  void sample(const DiskContext& ctx, MatField& A1, MatField& A2) const;
  // Fiber-degree coefficients on SM: Apm = e^{-lambda} (A1 -+ i A2)/2.
  void sample_pm(const DiskContext& ctx, MatField& Aplus, MatField& Aminus) const;

 private:
  int n_ = 1;
  Eval eval_;
};

// U(n)-valued gauge with closed-form derivative, G = Id on the boundary.
struct Gauge {
  int n = 1;
  std::function<CMat(double, double)> G;
  std::function<void(double, double, CMat&, CMat&)> dG;  // dG/dx1, dG/dx2

  static Gauge seeded(int n, std::mt19937_64& rng, double scale);
};

Connection gauge_transform(const Connection& A, const Gauge& g);

// Exterior covariant calculus on grid fields.
OneFormField covariant_d_section(const DiskContext& ctx, const Connection& A, const VField& s);
TwoFormField covariant_d_oneform(const DiskContext& ctx, const Connection& A,
                                 const OneFormField& beta);

// Hodge star: orientation star(dx1) = dx2, star(dx2) = -dx1.
OneFormField hodge_star(const OneFormField& beta);
TwoFormField hodge_star0(const DiskContext& ctx, const VField& s);
VField hodge_star2(const DiskContext& ctx, const TwoFormField& w);

// Codifferentials d_A^* = -star d_A star.
VField codifferential_oneform(const DiskContext& ctx, const Connection& A,
                              const OneFormField& beta);
OneFormField codifferential_twoform(const DiskContext& ctx, const Connection& A,
                                    const TwoFormField& w);

// star d_A beta as a section (0-form): e^{-2 lambda}(curl + wedge).
VField star_d_oneform(const DiskContext& ctx, const Connection& A, const OneFormField& beta);

MatField curvature(const DiskContext& ctx, const Connection& A);

// Degree components c_plus/c_minus of a 1-form restricted to SM:
// beta|SM = c_plus e^{i theta} + c_minus e^{-i theta}.
void fourier_parts(const DiskContext& ctx, const OneFormField& beta, VField& c_plus,
                   VField& c_minus);
OneFormField from_fourier_parts(const DiskContext& ctx, const VField& c_plus,
                                const VField& c_minus);

}  // namespace argt
