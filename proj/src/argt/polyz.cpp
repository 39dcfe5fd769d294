#include "argt/polyz.hpp"

#include <cmath>

namespace argt {

void PolyZ::add_term(int p, int q, cd c) {
  if (c == cd(0, 0)) return;
  auto key = std::make_pair(p, q);
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(key, c);
  } else {
    it->second += c;
    if (it->second == cd(0, 0)) terms_.erase(it);
  }
}

PolyZ PolyZ::constant(cd c) {
  PolyZ p;
  p.add_term(0, 0, c);
  return p;
}

PolyZ PolyZ::z() {
  PolyZ p;
  p.add_term(1, 0, 1.0);
  return p;
}

PolyZ PolyZ::zbar() {
  PolyZ p;
  p.add_term(0, 1, 1.0);
  return p;
}

cd PolyZ::eval(double x, double y) const {
  constexpr int kMaxPow = 48;
  const cd zz(x, y);
  const cd zb(x, -y);
  cd zp[kMaxPow + 1], zq[kMaxPow + 1];
  int maxp = 0, maxq = 0;
  for (const auto& [pq, c] : terms_) {
    maxp = std::max(maxp, pq.first);
    maxq = std::max(maxq, pq.second);
  }
  if (maxp > kMaxPow || maxq > kMaxPow)
    throw std::invalid_argument("PolyZ::eval: degree too large");
  zp[0] = zq[0] = 1.0;
  for (int i = 1; i <= maxp; ++i) zp[i] = zp[i - 1] * zz;
  for (int i = 1; i <= maxq; ++i) zq[i] = zq[i - 1] * zb;
  cd acc = 0;
  for (const auto& [pq, c] : terms_) acc += c * zp[pq.first] * zq[pq.second];
  return acc;
}

PolyZ PolyZ::dz() const {
  PolyZ out;
  for (const auto& [pq, c] : terms_)
    if (pq.first > 0) out.add_term(pq.first - 1, pq.second, c * double(pq.first));
  return out;
}

PolyZ PolyZ::dzbar() const {
  PolyZ out;
  for (const auto& [pq, c] : terms_)
    if (pq.second > 0) out.add_term(pq.first, pq.second - 1, c * double(pq.second));
  return out;
}

PolyZ PolyZ::operator+(const PolyZ& o) const {
  PolyZ out = *this;
  for (const auto& [pq, c] : o.terms_) out.add_term(pq.first, pq.second, c);
  return out;
}

PolyZ PolyZ::operator-(const PolyZ& o) const {
  PolyZ out = *this;
  for (const auto& [pq, c] : o.terms_) out.add_term(pq.first, pq.second, -c);
  return out;
}

PolyZ PolyZ::operator*(const PolyZ& o) const {
  PolyZ out;
  for (const auto& [a, ca] : terms_)
    for (const auto& [b, cb] : o.terms_)
      out.add_term(a.first + b.first, a.second + b.second, ca * cb);
  return out;
}

PolyZ PolyZ::operator*(cd c) const {
  PolyZ out;
  for (const auto& [pq, cc] : terms_) out.add_term(pq.first, pq.second, cc * c);
  return out;
}

PolyZ PolyZ::conj() const {
  PolyZ out;
  for (const auto& [pq, c] : terms_) out.add_term(pq.second, pq.first, std::conj(c));
  return out;
}

int PolyZ::degree() const {
  int d = 0;
  for (const auto& [pq, c] : terms_) d = std::max(d, pq.first + pq.second);
  return d;
}

double PolyZ::sup_disk(int samples) const {
  double m = 0;
  for (int i = 0; i < samples; ++i)
    for (int j = 0; j < samples; ++j) {
      double rr = (i + 0.5) / samples;
      double ph = kTwoPi * j / samples;
      m = std::max(m, std::abs(eval(rr * std::cos(ph), rr * std::sin(ph))));
    }
  return m;
}

PolyZ PolyZ::seeded(std::mt19937_64& rng, int mmax, int jmax, double scale,
                    bool real_valued) {
  PolyZ out;
  for (int m = -mmax; m <= mmax; ++m)
    for (int j = 0; j < jmax; ++j) {
      cd c(unit_draw(rng), unit_draw(rng));
      c *= scale / std::pow(1.0 + m * m + j * j, 2.0);
      int p = j + std::max(m, 0), q = j + std::max(-m, 0);
      out.add_term(p, q, c);
    }
  if (real_valued) out = out.real_part();
  return out;
}

PolyZ PolyZ::vanish_boundary(int k) const {
  PolyZ factor = PolyZ::constant(1.0);
  PolyZ ring = PolyZ::constant(1.0) - PolyZ::z() * PolyZ::zbar();
  for (int i = 0; i < k; ++i) factor = factor * ring;
  return *this * factor;
}

}  // namespace argt
