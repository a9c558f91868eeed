#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "vlab/grid.hpp"

namespace vlab {

using cplx = std::complex<double>;

// Out-of-place unnormalized complex 2D FFT of fixed size n x n.
// Plans are created with FFTW_ESTIMATE so that plan choice (and therefore
// round-off) is reproducible run to run.
class Fft2D {
 public:
  explicit Fft2D(int n);
  ~Fft2D();
  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;

  int n() const { return n_; }
  void forward(const cplx* in, cplx* out) const;
  void backward(const cplx* in, cplx* out) const;  // unnormalized inverse

 private:
  int n_;
  void* fwd_;
  void* bwd_;
};

// Signed mode index for slot q of an N-point DFT: 0..N/2, then negative.
inline int signed_mode(int q, int N) { return (q <= N / 2) ? q : q - N; }

// Spectral scratch bound to one grid: forward/backward transforms between
// real fields and their (unnormalized) spectra, derivatives, dealiasing.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const Grid2D& g);

  const Grid2D& grid() const { return grid_; }

  void to_spectrum(const ScalarField& f, std::vector<cplx>& spec) const;
  void to_field(const std::vector<cplx>& spec, ScalarField& f) const;
  // One inverse transform recovering two real fields: f1 = Re ifft(s1 + i s2),
  // f2 = Im ifft(s1 + i s2).  Valid because s1, s2 are spectra of real fields.
  void to_fields_packed(const std::vector<cplx>& s1, const std::vector<cplx>& s2,
                        ScalarField& f1, ScalarField& f2) const;
  // One forward transform of two real fields, split by Hermitian symmetry.
  void from_fields_packed(const ScalarField& f1, const ScalarField& f2,
                          std::vector<cplx>& s1, std::vector<cplx>& s2) const;

  double kx(int q) const;  // first-derivative wavenumber, Nyquist zeroed
  double ky(int q) const;
  double k2(int qx, int qy) const;  // |k|^2 including Nyquist

  // 2/3-rule: zero every mode with |signed index| > N/3 (Nyquist included).
  void dealias(std::vector<cplx>& spec) const;
  bool keep_mode(int qx, int qy) const;

  void gradient_spectra(const std::vector<cplx>& spec, std::vector<cplx>& dx,
                        std::vector<cplx>& dy) const;
  void laplacian_spectrum(const std::vector<cplx>& spec, std::vector<cplx>& lap) const;

 private:
  Grid2D grid_;
  std::shared_ptr<Fft2D> fft_;
  mutable std::vector<cplx> scratch_a_;
  mutable std::vector<cplx> scratch_b_;
};

// fields-module operations

// (sum |f|^p h^2)^(1/p); p = infinity gives max |f|.
double lp_norm(const ScalarField& f, double p);
// |f|_4 + |f|_{4/3}
double lp_intersection_norm(const ScalarField& f);
double mass(const ScalarField& f);

VectorField spectral_gradient(const ScalarField& f);
VectorField spectral_gradient(const SpectralWorkspace& ws, const ScalarField& f);
ScalarField spectral_laplacian(const SpectralWorkspace& ws, const ScalarField& f);

}  // namespace vlab
