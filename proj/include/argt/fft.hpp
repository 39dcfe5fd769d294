// Thin FFTW wrapper for the fibre (circle) transforms.
#pragma once

#include <vector>

#include "argt/common.hpp"

namespace argt {

// out[j] = sum_k in[k] e^{-2 pi i jk/n} (inverse=false), unnormalized.
void dft(const cd* in, cd* out, int n, bool inverse);

// Fourier coefficients of samples u(theta_j), theta_j = 2 pi j / n:
// returns c indexed by k in [-n/2, n/2), c[k + n/2] = (1/n) sum_j u_j e^{-ik theta_j}.
std::vector<cd> circle_analyze(const std::vector<cd>& samples);

// Samples from coefficients (inverse of circle_analyze).
std::vector<cd> circle_synthesize(const std::vector<cd>& coeffs);

// Pointwise synthesis at arbitrary angle.
cd circle_eval(const std::vector<cd>& coeffs, double theta);

}  // namespace argt
