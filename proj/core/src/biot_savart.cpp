#include "vlab/biot_savart.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "vlab/threading.hpp"

namespace vlab {

namespace {
constexpr double kPi = std::numbers::pi;

// Fourier transform of the radially truncated Green's function
// E_T(x) = (1/2pi) log|x| for |x| <= T, 0 beyond.
double green_hat_truncated(double kappa, double T) {
  if (kappa * T < 1e-3) {
    // series of (J0(x)-1)/k^2 and (T log T/k) J1(x) around x = kT = 0
    const double x = kappa * T;
    const double j0m1_over_k2 = T * T * (-0.25 + x * x / 64.0);
    const double j1_term = T * std::log(T) * T * (0.5 - x * x / 16.0);
    return j1_term + j0m1_over_k2;
  }
  const double x = kappa * T;
  return T * std::log(T) * std::cyl_bessel_j(1.0, x) / kappa +
         (std::cyl_bessel_j(0.0, x) - 1.0) / (kappa * kappa);
}
}  // namespace

Point biot_savart_kernel(Point x) {
  const double r2 = x[0] * x[0] + x[1] * x[1];
  if (r2 == 0.0) throw std::invalid_argument("biot_savart_kernel: singular at x = 0");
  const double f = 1.0 / (2.0 * kPi * r2);
  return {x[1] * f, -x[0] * f};
}

FreeSpacePoissonPlan::FreeSpacePoissonPlan(const Grid2D& g) : grid_(g) {
  const int N = g.N;
  const int M2 = 2 * N;
  const int M4 = 4 * N;
  const double h = g.h;
  const double P = 4.0 * g.L;     // oversampled periodic box
  const double T = 2.0 * g.L;     // truncation radius, >= sqrt(2) L and <= P - sqrt(2) L
  const double dk = 2.0 * kPi / P;

  // Sample grad^perp E_T on the oversampled k-grid; the quarter table keeps
  // Bessel evaluations to (M4/2+1)^2.
  std::vector<double> ehat(static_cast<std::size_t>(M4 / 2 + 1) * (M4 / 2 + 1));
  parallel_for(static_cast<std::size_t>(M4 / 2 + 1), [&](std::size_t jb, std::size_t je) {
    for (std::size_t j = jb; j < je; ++j) {
      for (int i = 0; i <= M4 / 2; ++i) {
        const double kx = dk * i, ky = dk * static_cast<double>(j);
        const double kappa = std::hypot(kx, ky);
        double v;
        if (kappa == 0.0)
          v = 0.5 * T * T * std::log(T) - 0.25 * T * T;
        else
          v = green_hat_truncated(kappa, T);
        ehat[j * (M4 / 2 + 1) + i] = v;
      }
    }
  });

  Fft2D fft4(M4);
  std::vector<cplx> spec(static_cast<std::size_t>(M4) * M4);
  parallel_for(static_cast<std::size_t>(M4), [&](std::size_t jb, std::size_t je) {
    for (std::size_t j = jb; j < je; ++j) {
      const int sj = signed_mode(static_cast<int>(j), M4);
      const double ky = dk * sj;
      for (int i = 0; i < M4; ++i) {
        const int si = signed_mode(i, M4);
        // zero the Nyquist lines so i*k keeps odd symmetry
        if (si == M4 / 2 || sj == M4 / 2) {
          spec[j * M4 + i] = 0.0;
          continue;
        }
        const double kx = dk * si;
        const double e = ehat[static_cast<std::size_t>(std::abs(sj)) * (M4 / 2 + 1) + std::abs(si)];
        // V1 = i ky E, V2 = -i kx E; packed as V1 + i V2
        spec[j * M4 + i] = cplx(kx * e, ky * e);
      }
    }
  });

  std::vector<cplx> spatial(spec.size());
  fft4.backward(spec.data(), spatial.data());
  const double scale4 = 1.0 / (P * P);  // (1/P^2) sum_k e^{ikx} V(k)

  // restrict to the 2N x 2N doubled-domain circulant kernel
  std::vector<cplx> kernel(static_cast<std::size_t>(M2) * M2);
  for (int m2 = 0; m2 < M2; ++m2) {
    const int s2 = (m2 <= N) ? m2 : m2 - M2;
    const int j4 = (s2 % M4 + M4) % M4;
    for (int m1 = 0; m1 < M2; ++m1) {
      const int s1 = (m1 <= N) ? m1 : m1 - M2;
      const int i4 = (s1 % M4 + M4) % M4;
      kernel[static_cast<std::size_t>(m2) * M2 + m1] =
          scale4 * spatial[static_cast<std::size_t>(j4) * M4 + i4];
    }
  }

  fft2n_ = std::make_shared<Fft2D>(M2);
  kernel_hat_.resize(kernel.size());
  fft2n_->forward(kernel.data(), kernel_hat_.data());

  // fold in the quadrature weight and inverse-DFT normalization of the solve
  const double w = h * h / (static_cast<double>(M2) * M2);
  for (auto& v : kernel_hat_) v *= w;

  buf_a_.resize(kernel.size());
  buf_b_.resize(kernel.size());
}

VectorField FreeSpacePoissonPlan::velocity(const ScalarField& omega) const {
  if (omega.grid != grid_)
    throw std::invalid_argument("FreeSpacePoissonPlan: field grid does not match plan");
  const int N = grid_.N;
  const int M2 = 2 * N;
  // zero-pad into the doubled domain
  std::fill(buf_a_.begin(), buf_a_.end(), cplx(0.0, 0.0));
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t jb, std::size_t je) {
    for (std::size_t j = jb; j < je; ++j)
      for (int i = 0; i < N; ++i)
        buf_a_[j * M2 + i] = cplx(omega.values[j * N + i], 0.0);
  });
  fft2n_->forward(buf_a_.data(), buf_b_.data());
  parallel_for(buf_b_.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) buf_b_[i] *= kernel_hat_[i];
  });
  fft2n_->backward(buf_b_.data(), buf_a_.data());

  VectorField u(grid_);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t jb, std::size_t je) {
    for (std::size_t j = jb; j < je; ++j)
      for (int i = 0; i < N; ++i) {
        const cplx z = buf_a_[j * M2 + i];
        u.ux[j * N + i] = z.real();
        u.uy[j * N + i] = z.imag();
      }
  });
  ++solves_;
  return u;
}

namespace {
enum class DerivKind { divergence, curl };
}

static ScalarField velocity_derivative(const Grid2D& grid, const Fft2D& fft,
                                       const std::vector<cplx>& kernel_hat,
                                       const ScalarField& omega, DerivKind kind) {
  const int N = grid.N;
  const int M2 = 2 * N;
  std::vector<cplx> a(static_cast<std::size_t>(M2) * M2, cplx(0.0, 0.0)), b(a.size());
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) a[static_cast<std::size_t>(j) * M2 + i] = omega.values[grid.idx(i, j)];
  fft.forward(a.data(), b.data());
  const double dk = 2.0 * kPi / (2.0 * grid.L);
  for (int j = 0; j < M2; ++j) {
    const int sj = signed_mode(j, M2);
    const double ky = (sj == M2 / 2) ? 0.0 : dk * sj;
    for (int i = 0; i < M2; ++i) {
      const int si = signed_mode(i, M2);
      const double kx = (si == M2 / 2) ? 0.0 : dk * si;
      const std::size_t q = static_cast<std::size_t>(j) * M2 + i;
      // packed kernel: u1 + i u2 per mode; split by Hermitian symmetry
      const int im = (i == 0) ? 0 : M2 - i;
      const int jm = (j == 0) ? 0 : M2 - j;
      const cplx z = kernel_hat[q] * b[q];
      const std::size_t qm = static_cast<std::size_t>(jm) * M2 + im;
      const cplx zm = std::conj(kernel_hat[qm] * b[qm]);
      const cplx u1 = 0.5 * (z + zm);
      const cplx u2 = cplx(0.0, -0.5) * (z - zm);
      a[q] = (kind == DerivKind::divergence) ? cplx(0.0, 1.0) * (kx * u1 + ky * u2)
                                             : cplx(0.0, 1.0) * (ky * u1 - kx * u2);
    }
  }
  fft.backward(a.data(), b.data());
  ScalarField out(grid);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      out.values[grid.idx(i, j)] = b[static_cast<std::size_t>(j) * M2 + i].real();
  return out;
}

ScalarField FreeSpacePoissonPlan::velocity_divergence(const ScalarField& omega) const {
  return velocity_derivative(grid_, *fft2n_, kernel_hat_, omega, DerivKind::divergence);
}

ScalarField FreeSpacePoissonPlan::velocity_curl(const ScalarField& omega) const {
  return velocity_derivative(grid_, *fft2n_, kernel_hat_, omega, DerivKind::curl);
}

std::shared_ptr<const FreeSpacePoissonPlan> poisson_plan(const Grid2D& g) {
  static std::mutex m;
  static std::map<std::pair<double, int>, std::shared_ptr<const FreeSpacePoissonPlan>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto key = std::make_pair(g.L, g.N);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto plan = std::make_shared<const FreeSpacePoissonPlan>(g);
  cache.emplace(key, plan);
  return plan;
}

VectorField free_space_velocity(const ScalarField& omega, const FreeSpacePoissonPlan& plan) {
  require_finite(omega, "free_space_velocity");
  const Grid2D& g = omega.grid;
  double linf = 0.0;
  for (double v : omega.values) linf = std::max(linf, std::abs(v));
  const double thr = 1e-12 * std::max(1.0, linf);
  const double margin = 0.25 * g.L;
  const int N = g.N;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      const double d = std::min(std::min(g.x(i) + 0.5 * g.L, 0.5 * g.L - g.x(i)),
                                std::min(g.y(j) + 0.5 * g.L, 0.5 * g.L - g.y(j)));
      if (d < margin && std::abs(omega.values[g.idx(i, j)]) > thr)
        throw std::invalid_argument(
            "free_space_velocity: vorticity support closer than L/4 to the box boundary");
    }
  return plan.velocity(omega);
}

VectorField free_space_velocity(const ScalarField& omega) {
  return free_space_velocity(omega, *poisson_plan(omega.grid));
}

}  // namespace vlab
