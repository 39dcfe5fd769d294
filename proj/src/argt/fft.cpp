#include "argt/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace argt {

namespace {

std::mutex g_plan_mutex;

fftw_plan get_plan(int n, bool inverse) {
  static std::map<std::pair<int, bool>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = std::make_pair(n, inverse);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<cd> dummy(n);
  auto* p = reinterpret_cast<fftw_complex*>(dummy.data());
  fftw_plan plan = fftw_plan_dft_1d(n, p, p, inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(key, plan);
  return plan;
}

}  // namespace

void dft(const cd* in, cd* out, int n, bool inverse) {
  fftw_plan plan = get_plan(n, inverse);
  // FFTW_UNALIGNED plans may be re-executed on any arrays of the right size.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cd*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

std::vector<cd> circle_analyze(const std::vector<cd>& samples) {
  const int n = static_cast<int>(samples.size());
  std::vector<cd> raw(n), out(n);
  dft(samples.data(), raw.data(), n, false);
  // raw[m] = sum_j u_j e^{-2 pi i jm/n}, m = 0..n-1; reorder to k in [-n/2, n/2).
  for (int k = -n / 2; k < n - n / 2; ++k) {
    int m = (k + n) % n;
    out[k + n / 2] = raw[m] / double(n);
  }
  return out;
}

std::vector<cd> circle_synthesize(const std::vector<cd>& coeffs) {
  const int n = static_cast<int>(coeffs.size());
  std::vector<cd> raw(n), out(n);
  for (int k = -n / 2; k < n - n / 2; ++k) raw[(k + n) % n] = coeffs[k + n / 2];
  dft(raw.data(), out.data(), n, true);
  return out;
}

cd circle_eval(const std::vector<cd>& coeffs, double theta) {
  const int n = static_cast<int>(coeffs.size());
  cd acc = 0;
  const cd e = std::polar(1.0, theta);
  // Horner over k = -n/2 .. n/2 - 1.
  for (int k = n - 1; k >= 0; --k) acc = acc * e + coeffs[k];
  return acc * std::polar(1.0, -theta * (n / 2));
}

}  // namespace argt
