#include "rigidlim/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>

namespace rigidlim {

namespace {
// FFTW planning is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct SpectralOps::Plans {
  int n = 0;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit Plans(int n_) : n(n_) {
    const std::size_t nc = static_cast<std::size_t>(n) * (n / 2 + 1);
    std::lock_guard<std::mutex> lock(planner_mutex());
    real = fftw_alloc_real(static_cast<std::size_t>(n) * n);
    spec = fftw_alloc_complex(nc);
    fwd = fftw_plan_dft_r2c_2d(n, n, real, spec, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_2d(n, n, spec, real, FFTW_ESTIMATE);
  }
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(spec);
  }
};

SpectralOps::SpectralOps(const Grid2D& grid) : grid_(grid), plans_(std::make_unique<Plans>(grid.n())) {
  const int n = grid.n();
  const int nh = n / 2 + 1;
  const double h = grid.spacing();
  symbol_.resize(static_cast<std::size_t>(n) * nh);
  for (int ky = 0; ky < n; ++ky) {
    const double sy = std::sin(kPi * ky / n);
    for (int kx = 0; kx < nh; ++kx) {
      const double sx = std::sin(kPi * kx / n);
      symbol_[static_cast<std::size_t>(ky) * nh + kx] = -4.0 / (h * h) * (sx * sx + sy * sy);
    }
  }
}

SpectralOps::~SpectralOps() = default;

void SpectralOps::forward(const std::vector<double>& in) {
  std::copy(in.begin(), in.end(), plans_->real);
  fftw_execute(plans_->fwd);
}

void SpectralOps::backward(std::vector<double>& out) {
  fftw_execute(plans_->bwd);
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = plans_->real[k] * scale;
}

ScalarField2D SpectralOps::solve_poisson(const ScalarField2D& rhs) {
  require_same_grid(grid_, rhs.grid());
  forward(rhs.data());
  const std::size_t nc = symbol_.size();
  fftw_complex* s = plans_->spec;
  s[0][0] = 0.0;
  s[0][1] = 0.0;
  for (std::size_t k = 1; k < nc; ++k) {
    s[k][0] /= symbol_[k];
    s[k][1] /= symbol_[k];
  }
  ScalarField2D phi(grid_);
  backward(phi.data());
  return phi;
}

ScalarField2D SpectralOps::project(VectorField2D& v) {
  require_same_grid(grid_, v.grid());
  ScalarField2D phi = solve_poisson(divergence(v));
  v -= gradient(phi);
  return phi;
}

void SpectralOps::diffuse(VectorField2D& v, double nu_dt) {
  require_same_grid(grid_, v.grid());
  const std::size_t nc = symbol_.size();
  for (int c = 0; c < 2; ++c) {
    forward(v.component(c));
    fftw_complex* s = plans_->spec;
    for (std::size_t k = 0; k < nc; ++k) {
      const double f = std::exp(nu_dt * symbol_[k]);
      s[k][0] *= f;
      s[k][1] *= f;
    }
    backward(v.component(c));
  }
}

VectorField2D leray_project(const VectorField2D& v) {
  SpectralOps ops(v.grid());
  VectorField2D out = v;
  ops.project(out);
  return out;
}

}  // namespace rigidlim
