// Polynomials in z = x + iy and conj(z): closed-form smooth test fields on the
// disk with exact derivatives of any order.
#pragma once

#include <cstdint>
#include <map>
#include <random>

#include "argt/common.hpp"

namespace argt {

class PolyZ {
 public:
  PolyZ() = default;

  static PolyZ constant(cd c);
  static PolyZ z();
  static PolyZ zbar();

  cd eval(double x, double y) const;
  PolyZ dz() const;     // formal d/dz
  PolyZ dzbar() const;  // formal d/dzbar
  PolyZ dx() const { return dz() + dzbar(); }
  PolyZ dy() const { return (dz() - dzbar()) * cd(0, 1); }

  PolyZ operator+(const PolyZ& o) const;
  PolyZ operator-(const PolyZ& o) const;
  PolyZ operator*(const PolyZ& o) const;
  PolyZ operator*(cd c) const;
  PolyZ conj() const;

  // Real part as a polynomial: (p + conj(p))/2.
  PolyZ real_part() const { return (*this + conj()) * 0.5; }

  bool empty() const { return terms_.empty(); }
  int degree() const;
  double sup_disk(int samples = 48) const;  // crude sup over the closed disk

  // Smooth seeded field: sum over angular mode m (|m| <= mmax) and radial index
  // j (0 <= j < jmax) of c_{mj} (1 + m^2 + j^2)^{-2} z^{p} zbar^{q} with
  // p - q = m, min(p, q) = j. Coefficients drawn in the unit square.
  static PolyZ seeded(std::mt19937_64& rng, int mmax, int jmax, double scale,
                      bool real_valued);

  // Multiply by (1 - z zbar)^k so the field vanishes on the boundary to order k.
  PolyZ vanish_boundary(int k) const;

 private:
  std::map<std::pair<int, int>, cd> terms_;  // (p, q) -> coeff of z^p zbar^q
  void add_term(int p, int q, cd c);
};

// Uniform double in [-1, 1) from the top 53 bits, reproducible across platforms.
inline double unit_draw(std::mt19937_64& rng) {
  return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace argt
