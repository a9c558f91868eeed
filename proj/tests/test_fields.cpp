#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vlab/fft.hpp"
#include "vlab/interpolate.hpp"
#include "vlab/oseen.hpp"
#include "vlab/snapshot.hpp"

using namespace vlab;

namespace {
constexpr double kPi = std::numbers::pi;

ScalarField random_smooth_field(const Grid2D& g, unsigned seed) {
  // sum of a few Gaussians well inside the box
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-0.15 * g.L, 0.15 * g.L);
  std::uniform_real_distribution<double> wid(0.02 * g.L, 0.05 * g.L);
  std::uniform_real_distribution<double> amp(-2.0, 2.0);
  ScalarField f(g);
  for (int n = 0; n < 4; ++n) {
    const double cx = pos(rng), cy = pos(rng), s = wid(rng), a = amp(rng);
    for (int j = 0; j < g.N; ++j)
      for (int i = 0; i < g.N; ++i) {
        const double dx = g.x(i) - cx, dy = g.y(j) - cy;
        f(i, j) += a * std::exp(-(dx * dx + dy * dy) / (2.0 * s * s));
      }
  }
  return f;
}
}  // namespace

TEST_CASE("lp_norm basics") {
  Grid2D g(8.0, 32);
  ScalarField zero(g);
  CHECK(lp_norm(zero, 2.0) == 0.0);
  CHECK(lp_intersection_norm(zero) == 0.0);

  ScalarField cell(g);
  cell(5, 7) = 1.0;
  CHECK(lp_norm(cell, 1.0) == doctest::Approx(g.h * g.h).epsilon(1e-14));
  CHECK(mass(cell) == doctest::Approx(g.h * g.h).epsilon(1e-14));

  CHECK_THROWS(lp_norm(cell, 0.5));
}

TEST_CASE("lp norms of the Oseen gaussian match closed forms") {
  Grid2D g(32.0, 512);
  const ScalarField f = oseen_gaussian_field(g);

  // max over cell centers sits h/sqrt(2) from the origin
  const double linf = lp_norm(f, std::numeric_limits<double>::infinity());
  CHECK(linf == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-3));
  CHECK(linf <= 1.0 / (4.0 * kPi));

  const double l4 = lp_norm(f, 4.0);
  const double l43 = lp_norm(f, 4.0 / 3.0);
  CHECK(l4 == doctest::Approx(std::pow(kPi, 0.25) / (4.0 * kPi)).epsilon(1e-10));
  CHECK(l43 == doctest::Approx(std::pow(3.0 * kPi, 0.75) / (4.0 * kPi)).epsilon(1e-10));
  CHECK(lp_intersection_norm(f) == doctest::Approx(l4 + l43).epsilon(1e-14));
  CHECK(l4 + l43 == doctest::Approx(0.53405).epsilon(2e-4));

  CHECK(mass(f) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lp_norm homogeneity and triangle inequality") {
  Grid2D g(8.0, 64);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    ScalarField a(g), b(g);
    for (auto& v : a.values) v = u(rng);
    for (auto& v : b.values) v = u(rng);
    const double c = std::abs(u(rng)) * 3.0;
    for (double p : {1.0, 4.0 / 3.0, 2.0, 4.0}) {
      ScalarField ca(g), apb(g);
      for (std::size_t q = 0; q < g.size(); ++q) {
        ca.values[q] = c * a.values[q];
        apb.values[q] = a.values[q] + b.values[q];
      }
      CHECK(lp_norm(ca, p) == doctest::Approx(c * lp_norm(a, p)).epsilon(1e-12));
      CHECK(lp_norm(apb, p) <= lp_norm(a, p) + lp_norm(b, p) + 1e-12);
    }
    // intersection norm homogeneity
    ScalarField ca(g);
    for (std::size_t q = 0; q < g.size(); ++q) ca.values[q] = c * a.values[q];
    CHECK(lp_intersection_norm(ca) ==
          doctest::Approx(c * lp_intersection_norm(a)).epsilon(1e-12));
  }
}

TEST_CASE("Parseval identity to 1e-12") {
  Grid2D g(16.0, 256);
  const ScalarField f = random_smooth_field(g, 3);
  SpectralWorkspace ws(g);
  std::vector<cplx> spec;
  ws.to_spectrum(f, spec);
  std::vector<double> terms(spec.size());
  for (std::size_t q = 0; q < spec.size(); ++q) terms[q] = std::norm(spec[q]);
  const double spectral_energy = ksum(terms) * g.h * g.h / g.size();
  std::vector<double> phys(f.values.size());
  for (std::size_t q = 0; q < phys.size(); ++q) phys[q] = f.values[q] * f.values[q];
  const double physical_energy = ksum(phys) * g.h * g.h;
  CHECK(spectral_energy == doctest::Approx(physical_energy).epsilon(1e-12));
}

TEST_CASE("spectral gradient: constants, Fourier modes, gaussian") {
  Grid2D g(32.0, 512);

  ScalarField c(g);
  for (auto& v : c.values) v = 2.5;
  VectorField gc = spectral_gradient(c);
  double m = 0.0;
  for (std::size_t q = 0; q < g.size(); ++q)
    m = std::max({m, std::abs(gc.ux[q]), std::abs(gc.uy[q])});
  CHECK(m < 1e-13);

  ScalarField s(g);
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) s(i, j) = std::sin(2.0 * kPi * g.x(i) / g.L);
  VectorField gs = spectral_gradient(s);
  double err = 0.0;
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      const double exact = (2.0 * kPi / g.L) * std::cos(2.0 * kPi * g.x(i) / g.L);
      err = std::max(err, std::abs(gs.ux[g.idx(i, j)] - exact));
      err = std::max(err, std::abs(gs.uy[g.idx(i, j)]));
    }
  CHECK(err < 1e-12);

  const ScalarField f = oseen_gaussian_field(g);
  VectorField gf = spectral_gradient(f);
  double scale = 0.0;
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i)
      scale = std::max(scale, norm(oseen_gaussian_gradient(g.node(i, j))));
  double gerr = 0.0;
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      const Point xi = g.node(i, j);
      if (xi[0] * xi[0] + xi[1] * xi[1] > 64.0) continue;
      const Point exact = oseen_gaussian_gradient(xi);
      gerr = std::max(gerr, std::abs(gf.ux[g.idx(i, j)] - exact[0]) / scale);
      gerr = std::max(gerr, std::abs(gf.uy[g.idx(i, j)] - exact[1]) / scale);
    }
  CHECK(gerr < 1e-10);
}

TEST_CASE("gradient of a dealiased product obeys the Leibniz rule") {
  Grid2D g(16.0, 128);
  SpectralWorkspace ws(g);
  ScalarField a = random_smooth_field(g, 5);
  ScalarField b = random_smooth_field(g, 6);
  // band-limit both factors
  std::vector<cplx> sa, sb;
  ws.to_spectrum(a, sa);
  ws.dealias(sa);
  ws.to_field(sa, a);
  ws.to_spectrum(b, sb);
  ws.dealias(sb);
  ws.to_field(sb, b);

  ScalarField ab(g);
  for (std::size_t q = 0; q < g.size(); ++q) ab.values[q] = a.values[q] * b.values[q];
  const VectorField gab = spectral_gradient(ws, ab);
  const VectorField ga = spectral_gradient(ws, a);
  const VectorField gb = spectral_gradient(ws, b);
  double scale = 0.0, err = 0.0;
  for (std::size_t q = 0; q < g.size(); ++q) {
    const double lx = a.values[q] * gb.ux[q] + b.values[q] * ga.ux[q];
    const double ly = a.values[q] * gb.uy[q] + b.values[q] * ga.uy[q];
    scale = std::max({scale, std::abs(lx), std::abs(ly)});
    err = std::max({err, std::abs(gab.ux[q] - lx), std::abs(gab.uy[q] - ly)});
  }
  // the product doubles the bandwidth; the mismatch is exactly the tail
  // beyond the dealias cut of the factors, which is spectrally small here
  CHECK(err < 1e-8 * scale);
}

TEST_CASE("grid construction guards") {
  CHECK_THROWS(Grid2D(16.0, 48));  // not a power of two
  CHECK_THROWS(Grid2D(16.0, 8));   // too small
  CHECK_THROWS(Grid2D(-1.0, 64));
  Grid2D g(16.0, 64);
  CHECK(g.h == doctest::Approx(0.25));
  CHECK(g.x(0) == doctest::Approx(-8.0 + 0.125));
}

TEST_CASE("bicubic spline interpolates node values exactly and smooth fields accurately") {
  Grid2D g(8.0, 64);
  const ScalarField f = random_smooth_field(g, 21);
  const BicubicSampler s(g, f.values);
  double node_err = 0.0;
  for (int j = 0; j < g.N; j += 5)
    for (int i = 0; i < g.N; i += 5)
      node_err = std::max(node_err, std::abs(s(g.node(i, j)) - f(i, j)));
  CHECK(node_err < 1e-12);

  // off-node accuracy on a broad gaussian: O(h^4) error
  ScalarField smooth(g);
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      const Point x = g.node(i, j);
      smooth(i, j) = std::exp(-(x[0] * x[0] + x[1] * x[1]) / 2.0);
    }
  const BicubicSampler s2(g, smooth.values);
  double off_err = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double x = -2.0 + 0.021 * k, y = 1.3 - 0.017 * k;
    off_err = std::max(off_err, std::abs(s2({x, y}) - std::exp(-(x * x + y * y) / 2.0)));
  }
  CHECK(off_err < 2e-5);
}

TEST_CASE("snapshot round trip is bit exact") {
  Grid2D g(4.0, 16);
  ScalarField f = random_smooth_field(g, 9);
  Snapshot s{0.375, 1e-3, f};
  const std::string path = "snapshot_test.bin";
  write_snapshot(path, s);
  const Snapshot r = read_snapshot(path);
  CHECK(r.t == s.t);
  CHECK(r.nu == s.nu);
  CHECK(r.field.grid.N == g.N);
  CHECK(r.field.grid.L == g.L);
  CHECK(r.field.values == f.values);
  std::remove(path.c_str());
}
