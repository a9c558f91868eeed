#include "vlab/interpolate.hpp"

#include <cmath>
#include <stdexcept>

#include "vlab/threading.hpp"

namespace vlab {

namespace {

// Cyclic constant-coefficient tridiagonal solve (Sherman-Morrison around the
// plain Thomas sweep).  Row pattern: a x[i-1] + b x[i] + c x[i+1] = d[i].
void cyclic_thomas(double a, double b, double c, std::vector<double>& d,
                   std::vector<double>& scratch) {
  const std::size_t n = d.size();
  const double gamma = -b;
  const double b0 = b - gamma;
  const double bn = b - a * c / gamma;

  auto solve_tridiag = [&](std::vector<double>& rhs, std::vector<double>& cp) {
    cp.resize(n);
    double beta = b0;
    rhs[0] /= beta;
    for (std::size_t i = 1; i < n; ++i) {
      cp[i] = c / beta;
      beta = ((i == n - 1) ? bn : b) - a * cp[i];
      rhs[i] = (rhs[i] - a * rhs[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cp[i + 1] * rhs[i + 1];
  };

  std::vector<double> u(n, 0.0), cp;
  u[0] = gamma;
  u[n - 1] = c;
  solve_tridiag(d, cp);
  solve_tridiag(u, scratch);
  const double vy = d[0] + a / gamma * d[n - 1];
  const double vz = u[0] + a / gamma * u[n - 1];
  const double factor = vy / (1.0 + vz);
  for (std::size_t i = 0; i < n; ++i) d[i] -= factor * u[i];
}

inline void spline_weights(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = (1.0 - 3.0 * t + 3.0 * t2 - t3) / 6.0;
  w[1] = (4.0 - 6.0 * t2 + 3.0 * t3) / 6.0;
  w[2] = (1.0 + 3.0 * t + 3.0 * t2 - 3.0 * t3) / 6.0;
  w[3] = t3 / 6.0;
}

}  // namespace

BicubicSampler::BicubicSampler(const Grid2D& g, const std::vector<double>& values)
    : grid_(g), coef_(values) {
  if (values.size() != g.size())
    throw std::invalid_argument("BicubicSampler: value count does not match grid");
  const int N = g.N;
  const double a = 1.0 / 6.0, b = 4.0 / 6.0, c = 1.0 / 6.0;
  // rows
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t jb, std::size_t je) {
    std::vector<double> line(N), scratch;
    for (std::size_t j = jb; j < je; ++j) {
      for (int i = 0; i < N; ++i) line[i] = coef_[j * N + i];
      cyclic_thomas(a, b, c, line, scratch);
      for (int i = 0; i < N; ++i) coef_[j * N + i] = line[i];
    }
  });
  // columns
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t ib, std::size_t ie) {
    std::vector<double> line(N), scratch;
    for (std::size_t i = ib; i < ie; ++i) {
      for (int j = 0; j < N; ++j) line[j] = coef_[static_cast<std::size_t>(j) * N + i];
      cyclic_thomas(a, b, c, line, scratch);
      for (int j = 0; j < N; ++j) coef_[static_cast<std::size_t>(j) * N + i] = line[j];
    }
  });
}

double BicubicSampler::operator()(Point p) const {
  const int N = grid_.N;
  const double invh = 1.0 / grid_.h;
  // node i sits at -L/2 + (i + 1/2) h
  double u = (p[0] + 0.5 * grid_.L) * invh - 0.5;
  double v = (p[1] + 0.5 * grid_.L) * invh - 0.5;
  double iu = std::floor(u), iv = std::floor(v);
  const double tu = u - iu, tv = v - iv;
  int i0 = static_cast<int>(iu), j0 = static_cast<int>(iv);

  double wx[4], wy[4];
  spline_weights(tu, wx);
  spline_weights(tv, wy);

  auto wrap = [N](int q) {
    q %= N;
    return q < 0 ? q + N : q;
  };
  int ix[4], jy[4];
  for (int m = 0; m < 4; ++m) {
    ix[m] = wrap(i0 - 1 + m);
    jy[m] = wrap(j0 - 1 + m);
  }
  double acc = 0.0;
  for (int m = 0; m < 4; ++m) {
    const double* row = coef_.data() + static_cast<std::size_t>(jy[m]) * N;
    acc += wy[m] * (wx[0] * row[ix[0]] + wx[1] * row[ix[1]] + wx[2] * row[ix[2]] +
                    wx[3] * row[ix[3]]);
  }
  return acc;
}

}  // namespace vlab
