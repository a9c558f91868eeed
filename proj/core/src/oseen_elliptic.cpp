#include "vlab/oseen_elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "vlab/threading.hpp"

namespace vlab {

namespace {
constexpr double kPi = std::numbers::pi;
using zd = std::complex<double>;

// Banded LU with partial pivoting for complex systems, LAPACK-style storage.
class BandedSolver {
 public:
  BandedSolver(int n, int kl, int ku)
      : n_(n), kl_(kl), ku_(ku), lda_(2 * kl + ku + 1), ab_(static_cast<std::size_t>(lda_) * n),
        piv_(n) {}

  // A(i, j) for |i - j| <= band
  zd& at(int i, int j) { return ab_[static_cast<std::size_t>(j) * lda_ + (kl_ + ku_ + i - j)]; }

  void factor() {
    for (int j = 0; j < n_; ++j) {
      const int ipiv_lo = j;
      const int ipiv_hi = std::min(n_ - 1, j + kl_);
      int p = ipiv_lo;
      double best = std::abs(get(ipiv_lo, j));
      for (int i = ipiv_lo + 1; i <= ipiv_hi; ++i) {
        const double v = std::abs(get(i, j));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (best == 0.0) throw std::runtime_error("BandedSolver: singular matrix");
      piv_[j] = p;
      if (p != j) swap_rows(j, p, j, std::min(n_ - 1, j + kl_ + ku_));
      const zd pivot = get(j, j);
      for (int i = j + 1; i <= ipiv_hi; ++i) {
        const zd l = get(i, j) / pivot;
        set(i, j, l);
        const int cols_hi = std::min(n_ - 1, j + kl_ + ku_);
        for (int c = j + 1; c <= cols_hi; ++c) set(i, c, get(i, c) - l * get(j, c));
      }
    }
  }

  void solve(std::vector<zd>& x) const {
    for (int j = 0; j < n_; ++j) {
      if (piv_[j] != j) std::swap(x[j], x[piv_[j]]);
      const int hi = std::min(n_ - 1, j + kl_);
      for (int i = j + 1; i <= hi; ++i) x[i] -= get(i, j) * x[j];
    }
    for (int j = n_ - 1; j >= 0; --j) {
      const int lo = std::max(0, j - kl_ - ku_);
      x[j] /= get(j, j);
      for (int i = lo; i < j; ++i) x[i] -= get(i, j) * x[j];
    }
  }

 private:
  zd get(int i, int j) const {
    const int off = kl_ + ku_ + i - j;
    if (off < 0 || off >= lda_) return zd(0.0, 0.0);
    return ab_[static_cast<std::size_t>(j) * lda_ + off];
  }
  void set(int i, int j, zd v) { ab_[static_cast<std::size_t>(j) * lda_ + (kl_ + ku_ + i - j)] = v; }
  void swap_rows(int r1, int r2, int col_lo, int col_hi) {
    for (int c = col_lo; c <= col_hi; ++c) {
      const zd a = get(r1, c), b = get(r2, c);
      set(r1, c, b);
      set(r2, c, a);
    }
  }

  int n_, kl_, ku_, lda_;
  std::vector<zd> ab_;
  std::vector<int> piv_;
};

double vg_theta_over_r(double r) {
  // v^G_theta(r)/r = -(1 - e^{-r^2/4})/(2 pi r^2)
  const double r2 = r * r;
  double f;
  if (r2 < 1e-6) {
    const double s = 0.25 * r2;
    f = 0.25 * (1.0 - 0.5 * s + s * s / 6.0);
  } else {
    f = (1.0 - std::exp(-0.25 * r2)) / r2;
  }
  return -f / (2.0 * kPi);
}
}  // namespace

MomentCoefficients compute_moments(const ScalarField& w, Point ztilde, double d_min) {
  require_finite(w, "compute_moments");
  if (!(d_min > 0.0)) throw std::invalid_argument("compute_moments: d_min must be positive");
  const Grid2D& g = w.grid;
  double linf = 0.0;
  for (double v : w.values) linf = std::max(linf, std::abs(v));
  const double thr = 1e-12 * std::max(1.0, linf);
  // cells inside d_min hold only dealiasing ripple when the true field
  // vanishes near ztilde; O(1) values there mean the support really arrived
  const double intrusion = 0.05 * linf;
  const double h2 = g.h * g.h;
  std::vector<double> t2c, t2s, t3c, t3s;
  t2c.reserve(g.size());
  t2s.reserve(g.size());
  t3c.reserve(g.size());
  t3s.reserve(g.size());
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      const double wv = w.values[g.idx(i, j)];
      if (std::abs(wv) <= thr) continue;
      const Point d = ztilde - g.node(i, j);
      const double rr = norm(d);
      if (rr < d_min) {
        if (std::abs(wv) > intrusion)
          throw std::invalid_argument("compute_moments: vorticity support within d_min of ztilde");
        continue;  // ripple inside the exclusion disc
      }
      const double beta = std::atan2(d[1], d[0]);
      const double inv2 = 1.0 / (rr * rr);
      const double inv3 = inv2 / rr;
      t2c.push_back(std::cos(2.0 * beta) * inv2 * wv);
      t2s.push_back(std::sin(2.0 * beta) * inv2 * wv);
      t3c.push_back(std::cos(3.0 * beta) * inv3 * wv);
      t3s.push_back(std::sin(3.0 * beta) * inv3 * wv);
    }
  MomentCoefficients m;
  m.alpha2 = ksum(t2c) * h2;
  m.beta2 = ksum(t2s) * h2;
  m.alpha3 = ksum(t3c) * h2;
  m.beta3 = ksum(t3s) * h2;
  return m;
}

RadialOseenSolver::RadialOseenSolver(double r_max, int nodes) : r_max_(r_max), m_(nodes) {
  if (nodes < 64) throw std::invalid_argument("RadialOseenSolver: too few nodes");
  r_.resize(m_);
  gcoef_.resize(m_);
  gauss_.resize(m_);
  const double dr = r_max_ / m_;
  for (int j = 0; j < m_; ++j) {
    const double rj = (j + 1) * dr;
    r_[j] = rj;
    gcoef_[j] = vg_theta_over_r(rj);
    gauss_[j] = std::exp(-0.25 * rj * rj) / (4.0 * kPi);
  }
}

RadialOseenSolver::ModeSolution RadialOseenSolver::solve_mode(int n,
                                                              const std::vector<double>& rhs_a,
                                                              const std::vector<double>& rhs_b,
                                                              double nu) const {
  if (n != 2 && n != 3)
    throw std::invalid_argument("RadialOseenSolver: angular mode must be 2 or 3");
  if (nu <= 0.0) throw std::invalid_argument("RadialOseenSolver: nu must be positive");
  if (rhs_a.size() != r_.size() || rhs_b.size() != r_.size())
    throw std::invalid_argument("RadialOseenSolver: rhs not sampled on solver nodes");

  const int m = m_;
  const double dr = r_max_ / m;
  const double idr2 = 1.0 / (dr * dr);
  const int nn = 2 * m;  // unknowns: c_j then psi_j interleaved
  BandedSolver lu(nn, 2, 2);
  std::vector<zd> rhs(nn, zd(0.0, 0.0));

  // complex combination c = a + i b of the two phases:
  //   -nu [c'' + c'/r + (r/2) c' - n^2 c / r^2] - i n g(r) c + i (n/2) G(r) psi = z
  //   psi'' + psi'/r - n^2 psi / r^2 - c = 0
  // c_0 = psi_0 = 0 (mode regularity ~ r^n), c_M = 0, Robin psi' + (n/R) psi = 0.
  for (int j = 0; j < m; ++j) {
    const double rj = r_[j];
    const int rc = 2 * j;      // elliptic row
    const int rp = 2 * j + 1;  // stream-function row
    const bool last = (j == m - 1);

    if (last) {
      lu.at(rc, rc) = zd(1.0, 0.0);  // Dirichlet: c_M = 0
      rhs[rc] = zd(0.0, 0.0);
    } else {
      const double c_lo = idr2 - 1.0 / (2.0 * dr * rj) - rj / (4.0 * dr);
      const double c_hi = idr2 + 1.0 / (2.0 * dr * rj) + rj / (4.0 * dr);
      const double c_mid = -2.0 * idr2 - n * static_cast<double>(n) / (rj * rj);
      if (j > 0) lu.at(rc, rc - 2) = zd(-nu * c_lo, 0.0);
      lu.at(rc, rc) = zd(-nu * c_mid, -n * gcoef_[j]);
      lu.at(rc, rc + 2) = zd(-nu * c_hi, 0.0);
      lu.at(rc, rp) = zd(0.0, 0.5 * n * gauss_[j]);
      rhs[rc] = zd(rhs_a[j], rhs_b[j]);
    }

    const double p_lo = idr2 - 1.0 / (2.0 * dr * rj);
    const double p_hi = idr2 + 1.0 / (2.0 * dr * rj);
    const double p_mid = -2.0 * idr2 - n * static_cast<double>(n) / (rj * rj);
    if (j > 0) lu.at(rp, rp - 2) = zd(p_lo, 0.0);
    lu.at(rp, rc) = zd(-1.0, 0.0);
    if (last) {
      // ghost psi_{M+1} = psi_{M-1} - 2 dr (n/R) psi_M
      lu.at(rp, rp) = zd(p_mid - p_hi * 2.0 * dr * n / r_max_, 0.0);
      lu.at(rp, rp - 2) = zd(p_lo + p_hi, 0.0);
    } else {
      lu.at(rp, rp) = zd(p_mid, 0.0);
      lu.at(rp, rp + 2) = zd(p_hi, 0.0);
    }
    rhs[rp] = zd(0.0, 0.0);
  }

  lu.factor();
  lu.solve(rhs);

  ModeSolution sol;
  sol.n = n;
  sol.r = r_;
  sol.a.resize(m);
  sol.b.resize(m);
  for (int j = 0; j < m; ++j) {
    sol.a[j] = rhs[2 * j].real();
    sol.b[j] = rhs[2 * j].imag();
  }
  return sol;
}

double eval_profile(const std::vector<double>& nodes, const std::vector<double>& coef, double rq,
                    int n_mode) {
  const int m = static_cast<int>(nodes.size());
  if (rq >= nodes[m - 1]) return 0.0;
  const double dr = nodes[0];  // nodes are (j+1) dr
  // bracket so that nodes[j1] <= rq < nodes[j1+1]; j = -1 is the origin
  double pos = rq / dr - 1.0;
  int j1 = static_cast<int>(std::floor(pos));
  j1 = std::clamp(j1, -1, m - 2);
  const double t = pos - j1;
  const double parity = (n_mode % 2 == 0) ? 1.0 : -1.0;
  // reflected extension through the origin keeps cubic accuracy in the core
  auto val = [&](int j) -> double {
    if (j == -1) return 0.0;                   // value at r = 0
    if (j < -1) return parity * coef[-j - 2];  // r = -(j+2) dr mirrored
    if (j >= m) return 0.0;
    return coef[j];
  };
  const double vm1 = val(j1 - 1), v0 = val(j1), v1 = val(j1 + 1), v2 = val(j1 + 2);
  const double t2 = t * t;
  const double wm1 = -t * (t - 1.0) * (t - 2.0) / 6.0;
  const double w0 = (t2 - 1.0) * (t - 2.0) / 2.0;
  const double w1 = -t * (t + 1.0) * (t - 2.0) / 2.0;
  const double w2 = t * (t2 - 1.0) / 6.0;
  return wm1 * vm1 + w0 * v0 + w1 * v1 + w2 * v2;
}

ScalarField assemble_modes(const Grid2D& xi_grid, const std::vector<OseenModeProfile>& modes) {
  ScalarField out(xi_grid);
  for (const auto& p : modes) {
    parallel_for(static_cast<std::size_t>(xi_grid.N), [&](std::size_t jb, std::size_t je) {
      for (std::size_t j = jb; j < je; ++j)
        for (int i = 0; i < xi_grid.N; ++i) {
          const Point xi = xi_grid.node(i, static_cast<int>(j));
          const double r = norm(xi);
          const double a = eval_profile(p.r, p.a, r, p.n);
          const double b = eval_profile(p.r, p.b, r, p.n);
          if (a == 0.0 && b == 0.0) continue;
          const double th = std::atan2(xi[1], xi[0]);
          out.values[xi_grid.idx(i, static_cast<int>(j))] +=
              a * std::cos(p.n * th) + b * std::sin(p.n * th);
        }
    });
  }
  return out;
}

OseenModeProfile resample_profile(const OseenModeProfile& p, const std::vector<double>& nodes) {
  if (p.r.empty()) throw std::invalid_argument("resample_profile: empty profile");
  OseenModeProfile out;
  out.n = p.n;
  out.r = nodes;
  out.a.resize(nodes.size());
  out.b.resize(nodes.size());
  // linear interpolation between supplied samples, zero outside their range
  auto interp = [&](const std::vector<double>& ys, double rq) -> double {
    if (rq <= p.r.front()) {
      // inside the first sample: blend toward zero at the origin as r^n
      const double f = std::pow(rq / p.r.front(), p.n);
      return ys.front() * f;
    }
    if (rq >= p.r.back()) return 0.0;
    auto it = std::upper_bound(p.r.begin(), p.r.end(), rq);
    const std::size_t hi = static_cast<std::size_t>(it - p.r.begin());
    const std::size_t lo = hi - 1;
    const double t = (rq - p.r[lo]) / (p.r[hi] - p.r[lo]);
    return (1.0 - t) * ys[lo] + t * ys[hi];
  };
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    out.a[j] = interp(p.a, nodes[j]);
    out.b[j] = interp(p.b, nodes[j]);
  }
  return out;
}

ScalarField solve_elliptic(double nu, const std::vector<OseenModeProfile>& rhs,
                           const Grid2D& xi_grid, const RadialOseenSolver& solver) {
  std::vector<OseenModeProfile> sols;
  for (const auto& p : rhs) {
    if (p.n != 2 && p.n != 3)
      throw std::invalid_argument("solve_elliptic: rhs mode outside {2,3}");
    const OseenModeProfile rs = (p.r == solver.nodes()) ? p : resample_profile(p, solver.nodes());
    auto sol = solver.solve_mode(p.n, rs.a, rs.b, nu);
    sols.push_back({sol.n, sol.r, sol.a, sol.b});
  }
  return assemble_modes(xi_grid, sols);
}

ScalarField build_reaction_term(const VectorSampler& v_tilde, Point ztilde, double nu_t,
                                const Grid2D& xi_grid, const Grid2D& physical_grid) {
  if (nu_t <= 0.0) throw std::invalid_argument("build_reaction_term: nu*t must be positive");
  const double s = std::sqrt(nu_t);
  const double reach = 0.5 * xi_grid.L * s;
  const double half = 0.5 * physical_grid.L - 2.0 * physical_grid.h;
  if (std::abs(ztilde[0]) + reach > half || std::abs(ztilde[1]) + reach > half)
    throw std::invalid_argument("build_reaction_term: xi-box exceeds the physical domain");

  const Point v0 = v_tilde(ztilde);
  ScalarField out(xi_grid);
  parallel_for(static_cast<std::size_t>(xi_grid.N), [&](std::size_t jb, std::size_t je) {
    for (std::size_t j = jb; j < je; ++j)
      for (int i = 0; i < xi_grid.N; ++i) {
        const Point xi = xi_grid.node(i, static_cast<int>(j));
        const Point xp = ztilde + s * xi;
        const Point dv = v_tilde(xp) - v0;
        const Point dg = oseen_gaussian_gradient(xi);
        out.values[xi_grid.idx(i, static_cast<int>(j))] = dot(dv, dg) / s;
      }
  });
  return out;
}

ScalarField build_moment_reaction(const MomentCoefficients& m, double nu_t,
                                  const Grid2D& xi_grid) {
  if (nu_t < 0.0) throw std::invalid_argument("build_moment_reaction: nu*t must be >= 0");
  const double c = 1.0 / (16.0 * kPi * kPi);
  const double s = std::sqrt(nu_t);
  ScalarField out(xi_grid);
  for (int j = 0; j < xi_grid.N; ++j)
    for (int i = 0; i < xi_grid.N; ++i) {
      const Point xi = xi_grid.node(i, j);
      const double r2 = xi[0] * xi[0] + xi[1] * xi[1];
      const double r = std::sqrt(r2);
      const double e = std::exp(-0.25 * r2);
      const double th = std::atan2(xi[1], xi[0]);
      // psi = arg(ztilde - y) - arg(xi):
      //   int sin(n psi) -> beta_n cos(n theta) - alpha_n sin(n theta)
      const double mode2 = m.beta2 * std::cos(2.0 * th) - m.alpha2 * std::sin(2.0 * th);
      const double mode3 = m.beta3 * std::cos(3.0 * th) - m.alpha3 * std::sin(3.0 * th);
      out.values[xi_grid.idx(i, j)] = c * e * (r2 * mode2 - s * r2 * r * mode3);
    }
  return out;
}

std::vector<OseenModeProfile> moment_reaction_profiles(const MomentCoefficients& m, double nu_t,
                                                       const std::vector<double>& nodes) {
  const double c = 1.0 / (16.0 * kPi * kPi);
  const double s = std::sqrt(nu_t);
  OseenModeProfile p2, p3;
  p2.n = 2;
  p3.n = 3;
  p2.r = nodes;
  p3.r = nodes;
  p2.a.resize(nodes.size());
  p2.b.resize(nodes.size());
  p3.a.resize(nodes.size());
  p3.b.resize(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double r = nodes[j];
    const double e = std::exp(-0.25 * r * r);
    p2.a[j] = c * r * r * e * m.beta2;
    p2.b[j] = -c * r * r * e * m.alpha2;
    p3.a[j] = -c * s * r * r * r * e * m.beta3;
    p3.b[j] = c * s * r * r * r * e * m.alpha3;
  }
  return {p2, p3};
}

CoreCorrector build_core_corrector(const MomentCoefficients& m, double nu, double t,
                                   const RadialOseenSolver& solver) {
  auto profiles = moment_reaction_profiles(m, nu * t, solver.nodes());
  CoreCorrector out;
  std::vector<double> mag(solver.nodes().size(), 0.0);
  for (auto& p : profiles) {
    for (auto& v : p.a) v = -v;  // rhs is -A0
    for (auto& v : p.b) v = -v;
    auto sol = solver.solve_mode(p.n, p.a, p.b, nu);
    for (std::size_t j = 0; j < mag.size(); ++j)
      mag[j] += std::abs(sol.a[j]) + std::abs(sol.b[j]);
    out.modes.push_back(std::move(sol));
  }
  out.decay_rate = fit_gaussian_decay(solver.nodes(), mag, 8.0, 12.0);
  return out;
}

ScalarField corrector_field(const CoreCorrector& c, const Grid2D& xi_grid) {
  std::vector<OseenModeProfile> modes;
  for (const auto& s : c.modes) modes.push_back({s.n, s.r, s.a, s.b});
  return assemble_modes(xi_grid, modes);
}

ScalarField corrector_on_physical(const CoreCorrector& c, const Grid2D& g, Point ztilde,
                                  double nu_t) {
  if (nu_t <= 0.0) throw std::invalid_argument("corrector_on_physical: nu*t must be positive");
  const double inv_s = 1.0 / std::sqrt(nu_t);
  ScalarField out(g);
  for (const auto& p : c.modes) {
    parallel_for(static_cast<std::size_t>(g.N), [&](std::size_t jb, std::size_t je) {
      for (std::size_t j = jb; j < je; ++j)
        for (int i = 0; i < g.N; ++i) {
          const Point xi = inv_s * (g.node(i, static_cast<int>(j)) - ztilde);
          const double r = norm(xi);
          const double a = eval_profile(p.r, p.a, r, p.n);
          const double b = eval_profile(p.r, p.b, r, p.n);
          if (a == 0.0 && b == 0.0) continue;
          const double th = std::atan2(xi[1], xi[0]);
          out.values[g.idx(i, static_cast<int>(j))] +=
              a * std::cos(p.n * th) + b * std::sin(p.n * th);
        }
    });
  }
  return out;
}

double fit_gaussian_decay(const std::vector<double>& r, const std::vector<double>& mag,
                          double r_lo, double r_hi) {
  // fit log(mag) = log C - gamma r^2/4 by least squares
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (r[j] < r_lo || r[j] > r_hi) continue;
    if (mag[j] <= 0.0) continue;
    const double x = 0.25 * r[j] * r[j];
    const double y = std::log(mag[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 3) return 0.0;
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return -(n * sxy - sx * sy) / denom;
}

}  // namespace vlab
