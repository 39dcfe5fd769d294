// Shared evaluation context: one polar grid plus the metric factors sampled on it.
#pragma once

#include "argt/geodesic.hpp"
#include "argt/grid.hpp"
#include "argt/metric.hpp"

namespace argt {

struct DiskContext {
  PolarGrid grid;
  const ConformalMetric* metric = nullptr;
  RField elam, elam_inv, e2lam, e2lam_inv;  // e^{lambda} and powers
  RField lam_x, lam_y;                      // grad lambda (closed form or FD)

  DiskContext() = default;
  DiskContext(const PolarGrid& g, const ConformalMetric& m);
};

// Vector-valued (C^n) grid fields.
struct VField {
  int n = 0;
  std::vector<CField> c;
  VField() = default;
  VField(int n_, const PolarGrid& g) : n(n_), c(n_, CField::Zero(g.nr, g.nphi)) {}
  CVec at(int i, int j) const {
    CVec v(n);
    for (int a = 0; a < n; ++a) v[a] = c[a](i, j);
    return v;
  }
  void set(int i, int j, const CVec& v) {
    for (int a = 0; a < n; ++a) c[a](i, j) = v[a];
  }
};

struct OneFormField {
  int n = 0;
  std::vector<CField> b1, b2;  // Euclidean components in dx1, dx2
  OneFormField() = default;
  OneFormField(int n_, const PolarGrid& g)
      : n(n_), b1(n_, CField::Zero(g.nr, g.nphi)), b2(n_, CField::Zero(g.nr, g.nphi)) {}
};

struct TwoFormField {  // coefficient of dx1 ^ dx2
  int n = 0;
  std::vector<CField> c;
  TwoFormField() = default;
  TwoFormField(int n_, const PolarGrid& g) : n(n_), c(n_, CField::Zero(g.nr, g.nphi)) {}
};

struct MatField {  // n x n matrix field, row-major entries
  int n = 0;
  std::vector<CField> m;
  MatField() = default;
  MatField(int n_, const PolarGrid& g) : n(n_), m(n_ * n_, CField::Zero(g.nr, g.nphi)) {}
  CField& at(int r, int c_) { return m[r * n + c_]; }
  const CField& at(int r, int c_) const { return m[r * n + c_]; }
  CMat value(int i, int j) const {
    CMat v(n, n);
    for (int r = 0; r < n; ++r)
      for (int c_ = 0; c_ < n; ++c_) v(r, c_) = m[r * n + c_](i, j);
    return v;
  }
  void set(int i, int j, const CMat& v) {
    for (int r = 0; r < n; ++r)
      for (int c_ = 0; c_ < n; ++c_) m[r * n + c_](i, j) = v(r, c_);
  }
};

double l2_norm_section(const DiskContext& ctx, const VField& s);
double l2_norm_oneform(const DiskContext& ctx, const OneFormField& b);
double sup_norm(const VField& s);

}  // namespace argt
