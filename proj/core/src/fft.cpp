#include "selfsim/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace selfsim {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// FFTW planning is not thread-safe; execution with new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const std::size_t real_size = static_cast<std::size_t>(n) * n * n;
  const std::size_t complex_size = static_cast<std::size_t>(n) * n * (n / 2 + 1);
  std::vector<double> r(real_size);
  std::vector<fftw_complex> c(complex_size);
  PlanPair p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.forward = fftw_plan_dft_r2c_3d(n, n, n, r.data(), c.data(), flags);
  p.backward = fftw_plan_dft_c2r_3d(n, n, n, c.data(), r.data(), flags | FFTW_DESTROY_INPUT);
  return cache.emplace(n, p).first->second;
}

}  // namespace

SpectralScalar transform(const ScalarField& f) {
  const GridSpec& g = f.grid();
  SpectralScalar out(g);
  const auto& p = plans_for(g.n());
  // r2c does not modify its input
  fftw_execute_dft_r2c(p.forward, const_cast<double*>(f.values().data()),
                       reinterpret_cast<fftw_complex*>(out.coefficients().data()));
  return out;
}

ScalarField inverse(const SpectralScalar& s) {
  const GridSpec& g = s.grid();
  ScalarField out(g);
  std::vector<Complex> scratch(s.coefficients().begin(), s.coefficients().end());
  const auto& p = plans_for(g.n());
  fftw_execute_dft_c2r(p.backward, reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.values().data());
  out *= 1.0 / static_cast<double>(g.size());
  return out;
}

void forward_r2c_cube(int m, const double* in, Complex* out) {
  const auto& p = plans_for(m);
  fftw_execute_dft_r2c(p.forward, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

SpectralField transform(const VectorField& f) {
  return SpectralField(transform(f[0]), transform(f[1]), transform(f[2]));
}

VectorField inverse(const SpectralField& s) {
  return VectorField(inverse(s[0]), inverse(s[1]), inverse(s[2]));
}

}  // namespace selfsim
