// Polar grid on the closed unit disk: radial half-offset nodes with the outer
// ring exactly on the boundary, periodic angular nodes, finite differences
// that cross the pole via f(-r, phi) = f(r, phi + pi).
#pragma once

#include <Eigen/Dense>

#include "argt/common.hpp"

namespace argt {

using CField = Eigen::ArrayXXcd;  // (nr, nphi)
using RField = Eigen::ArrayXXd;

struct PolarGrid {
  int nr = 0, nphi = 0;
  double hr = 0, hphi = 0;
  Eigen::ArrayXd r;    // r_i = (i + 1/2) hr, r_{nr-1} = 1
  Eigen::ArrayXd phi;  // phi_j = j hphi
  Eigen::ArrayXd wr;   // integral of r dr over the node's radial cell

  PolarGrid() = default;
  PolarGrid(int nr_, int nphi_);

  Vec2 node(int i, int j) const {
    return {r[i] * std::cos(phi[j]), r[i] * std::sin(phi[j])};
  }
  int index(int i, int j) const { return i * nphi + j; }
  int size() const { return nr * nphi; }

  // Total mass sum_ij f(i,j) wr(i) hphi; f must already carry any metric factor.
  double integrate(const RField& f) const;
  cd integrate(const CField& f) const;

  // f evaluated across the pole: row -1-m maps to (m, j + nphi/2).
  static int pole_row(int i) { return -1 - i; }
};

// Build a grid field by sampling a callable f(x, y).
template <typename F>
CField sample(const PolarGrid& g, F&& f) {
  CField out(g.nr, g.nphi);
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nphi; ++j) {
      Vec2 p = g.node(i, j);
      out(i, j) = f(p.x(), p.y());
    }
  return out;
}

// Partial derivatives (4th-order stencils; biased at the outer two rings).
CField d_r(const PolarGrid& g, const CField& f, int order = 1);
CField d_phi(const PolarGrid& g, const CField& f, int order = 1);
CField d_x(const PolarGrid& g, const CField& f);
CField d_y(const PolarGrid& g, const CField& f);
CField laplacian(const PolarGrid& g, const CField& f);

// Wirtinger derivatives: dz = (dx - i dy)/2, dzbar = (dx + i dy)/2.
CField d_z(const PolarGrid& g, const CField& f);
CField d_zbar(const PolarGrid& g, const CField& f);

// 4-point Lagrange interpolation (periodic in phi, pole-crossing in r).
// r slightly above 1 is clamped to the boundary.
cd interp(const PolarGrid& g, const CField& f, double x, double y);

// Interpolation stencil reusable across fields sampled on the same grid.
struct InterpStencil {
  int ir[4];    // radial rows; negative = pole-crossed row pole_row()
  int jp[4];    // phi columns for the non-crossed half
  int jp_op[4]; // phi columns shifted by pi (used for crossed rows)
  double wr_[4], wp[4];
};
InterpStencil make_stencil(const PolarGrid& g, double x, double y);
cd apply_stencil(const PolarGrid& g, const InterpStencil& s, const CField& f);

}  // namespace argt
