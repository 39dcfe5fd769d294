// Shared aliases and small helpers used across the library.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace argt {

using cd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Fiber dimension n is 1 or 2 at runtime; fixed max size keeps these on the stack.
using CMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, 0, 2, 2>;
using CVec = Eigen::Matrix<cd, Eigen::Dynamic, 1, 0, 2, 1>;

using Vec2 = Eigen::Vector2d;

inline double wrap_2pi(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

// Signed wrap to (-pi, pi].
inline double wrap_pi(double a) {
  a = std::fmod(a + kPi, kTwoPi);
  if (a <= 0) a += kTwoPi;
  return a - kPi;
}

// Deterministic parallel map: body(i) writes only to slot i of its output.
void parallel_for(int n, const std::function<void(int)>& body);

// Worker budget: min(hardware, ARGT_WORKERS env or config cap).
int worker_count();
void set_worker_cap(int cap);

}  // namespace argt
