#include "vlab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "vlab/threading.hpp"

namespace vlab {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft2D::Fft2D(int n) : n_(n) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  // UNALIGNED lets the plans execute on any caller buffer.
  std::vector<cplx> a(static_cast<std::size_t>(n) * n), b(a.size());
  auto* ain = reinterpret_cast<fftw_complex*>(a.data());
  auto* bout = reinterpret_cast<fftw_complex*>(b.data());
  fwd_ = fftw_plan_dft_2d(n, n, ain, bout, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  bwd_ = fftw_plan_dft_2d(n, n, ain, bout, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!fwd_ || !bwd_) throw std::runtime_error("Fft2D: planning failed");
}

Fft2D::~Fft2D() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void Fft2D::forward(const cplx* in, cplx* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(fwd_),
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void Fft2D::backward(const cplx* in, cplx* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(bwd_),
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

SpectralWorkspace::SpectralWorkspace(const Grid2D& g)
    : grid_(g), fft_(std::make_shared<Fft2D>(g.N)), scratch_a_(g.size()), scratch_b_(g.size()) {}

void SpectralWorkspace::to_spectrum(const ScalarField& f, std::vector<cplx>& spec) const {
  const std::size_t n = grid_.size();
  spec.resize(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) scratch_a_[i] = cplx(f.values[i], 0.0);
  });
  fft_->forward(scratch_a_.data(), spec.data());
}

void SpectralWorkspace::to_field(const std::vector<cplx>& spec, ScalarField& f) const {
  const std::size_t n = grid_.size();
  f.grid = grid_;
  f.values.resize(n);
  fft_->backward(spec.data(), scratch_a_.data());
  const double inv = 1.0 / static_cast<double>(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) f.values[i] = scratch_a_[i].real() * inv;
  });
}

void SpectralWorkspace::to_fields_packed(const std::vector<cplx>& s1, const std::vector<cplx>& s2,
                                         ScalarField& f1, ScalarField& f2) const {
  const std::size_t n = grid_.size();
  f1.grid = grid_;
  f2.grid = grid_;
  f1.values.resize(n);
  f2.values.resize(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) scratch_a_[i] = s1[i] + cplx(0.0, 1.0) * s2[i];
  });
  fft_->backward(scratch_a_.data(), scratch_b_.data());
  const double inv = 1.0 / static_cast<double>(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      f1.values[i] = scratch_b_[i].real() * inv;
      f2.values[i] = scratch_b_[i].imag() * inv;
    }
  });
}

void SpectralWorkspace::from_fields_packed(const ScalarField& f1, const ScalarField& f2,
                                           std::vector<cplx>& s1, std::vector<cplx>& s2) const {
  const std::size_t n = grid_.size();
  const int N = grid_.N;
  s1.resize(n);
  s2.resize(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) scratch_a_[i] = cplx(f1.values[i], f2.values[i]);
  });
  fft_->forward(scratch_a_.data(), scratch_b_.data());
  // Hermitian split: s1(k) = (Z(k) + conj Z(-k))/2, s2(k) = (Z(k) - conj Z(-k))/(2i)
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t jb, std::size_t je) {
    for (std::size_t j = jb; j < je; ++j) {
      const int jm = (j == 0) ? 0 : N - static_cast<int>(j);
      for (int i = 0; i < N; ++i) {
        const int im = (i == 0) ? 0 : N - i;
        const cplx z = scratch_b_[j * N + i];
        const cplx zm = std::conj(scratch_b_[static_cast<std::size_t>(jm) * N + im]);
        s1[j * N + i] = 0.5 * (z + zm);
        s2[j * N + i] = cplx(0.0, -0.5) * (z - zm);
      }
    }
  });
}

double SpectralWorkspace::kx(int q) const {
  const int N = grid_.N;
  if (q == N / 2) return 0.0;
  return 2.0 * std::numbers::pi / grid_.L * signed_mode(q, N);
}

double SpectralWorkspace::ky(int q) const { return kx(q); }

double SpectralWorkspace::k2(int qx, int qy) const {
  const double f = 2.0 * std::numbers::pi / grid_.L;
  const double a = f * signed_mode(qx, grid_.N);
  const double b = f * signed_mode(qy, grid_.N);
  return a * a + b * b;
}

bool SpectralWorkspace::keep_mode(int qx, int qy) const {
  const int cut = grid_.N / 3;
  return std::abs(signed_mode(qx, grid_.N)) <= cut && std::abs(signed_mode(qy, grid_.N)) <= cut;
}

void SpectralWorkspace::dealias(std::vector<cplx>& spec) const {
  const int N = grid_.N;
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t jb, std::size_t je) {
    for (std::size_t j = jb; j < je; ++j)
      for (int i = 0; i < N; ++i)
        if (!keep_mode(i, static_cast<int>(j))) spec[j * N + i] = 0.0;
  });
}

void SpectralWorkspace::gradient_spectra(const std::vector<cplx>& spec, std::vector<cplx>& dx,
                                         std::vector<cplx>& dy) const {
  const int N = grid_.N;
  dx.resize(spec.size());
  dy.resize(spec.size());
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t jb, std::size_t je) {
    for (std::size_t j = jb; j < je; ++j) {
      const cplx iky(0.0, ky(static_cast<int>(j)));
      for (int i = 0; i < N; ++i) {
        const cplx s = spec[j * N + i];
        dx[j * N + i] = cplx(0.0, kx(i)) * s;
        dy[j * N + i] = iky * s;
      }
    }
  });
}

void SpectralWorkspace::laplacian_spectrum(const std::vector<cplx>& spec,
                                           std::vector<cplx>& lap) const {
  const int N = grid_.N;
  lap.resize(spec.size());
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t jb, std::size_t je) {
    for (std::size_t j = jb; j < je; ++j)
      for (int i = 0; i < N; ++i) lap[j * N + i] = -k2(i, static_cast<int>(j)) * spec[j * N + i];
  });
}

VectorField spectral_gradient(const SpectralWorkspace& ws, const ScalarField& f) {
  require_finite(f, "spectral_gradient");
  std::vector<cplx> spec, dx, dy;
  ws.to_spectrum(f, spec);
  ws.gradient_spectra(spec, dx, dy);
  VectorField g(ws.grid());
  ScalarField gx(ws.grid()), gy(ws.grid());
  ws.to_fields_packed(dx, dy, gx, gy);
  g.ux = std::move(gx.values);
  g.uy = std::move(gy.values);
  return g;
}

VectorField spectral_gradient(const ScalarField& f) {
  SpectralWorkspace ws(f.grid);
  return spectral_gradient(ws, f);
}

ScalarField spectral_laplacian(const SpectralWorkspace& ws, const ScalarField& f) {
  std::vector<cplx> spec, lap;
  ws.to_spectrum(f, spec);
  ws.laplacian_spectrum(spec, lap);
  ScalarField out(ws.grid());
  ws.to_field(lap, out);
  return out;
}

}  // namespace vlab
