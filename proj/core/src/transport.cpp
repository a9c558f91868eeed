#include "vlab/transport.hpp"

#include <cmath>
#include <stdexcept>

#include "vlab/threading.hpp"

namespace vlab {

TransportCore::TransportCore(const Grid2D& g)
    : grid_(g), ws_(g), fx_(g), fy_(g), sx_(g.size()), sy_(g.size()) {}

void TransportCore::flux_divergence(const std::vector<double>& ux, const std::vector<double>& uy,
                                    const ScalarField& w, std::vector<cplx>& out) const {
  const int N = grid_.N;
  parallel_for(grid_.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t q = b; q < e; ++q) {
      fx_.values[q] = ux[q] * w.values[q];
      fy_.values[q] = uy[q] * w.values[q];
    }
  });
  ws_.from_fields_packed(fx_, fy_, sx_, sy_);
  out.resize(grid_.size());
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t jb, std::size_t je) {
    for (std::size_t j = jb; j < je; ++j) {
      const double kyv = ws_.ky(static_cast<int>(j));
      for (int i = 0; i < N; ++i) {
        const std::size_t q = j * N + i;
        if (!ws_.keep_mode(i, static_cast<int>(j))) {
          out[q] = 0.0;
          continue;
        }
        out[q] = cplx(0.0, -1.0) * (ws_.kx(i) * sx_[q] + kyv * sy_[q]);
      }
    }
  });
}

const std::vector<double>& TransportCore::diffusion_table(double nu, double dt_half) const {
  const auto key = std::make_pair(nu, dt_half);
  auto it = exp_cache_.find(key);
  if (it != exp_cache_.end()) return it->second;
  const int N = grid_.N;
  std::vector<double> tab(grid_.size());
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) tab[grid_.idx(i, j)] = std::exp(-nu * ws_.k2(i, j) * dt_half);
  return exp_cache_.emplace(key, std::move(tab)).first->second;
}

void TransportCore::if_rk4_step(FlowState& state, double dt, const std::vector<double>& nu_fields,
                                const FlowRhs& rhs) const {
  const std::size_t nf = state.fields.size();
  const std::size_t np = state.points.size();
  if (nu_fields.size() != nf)
    throw std::invalid_argument("if_rk4_step: one diffusion coefficient per field required");

  std::vector<const std::vector<double>*> eh(nf);
  for (std::size_t f = 0; f < nf; ++f) eh[f] = &diffusion_table(nu_fields[f], 0.5 * dt);

  auto apply_exp = [&](const std::vector<cplx>& in, const std::vector<double>& tab, int pow,
                       std::vector<cplx>& out) {
    out.resize(in.size());
    if (pow == 1) {
      parallel_for(in.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t q = b; q < e; ++q) out[q] = in[q] * tab[q];
      });
    } else {
      parallel_for(in.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t q = b; q < e; ++q) out[q] = in[q] * (tab[q] * tab[q]);
      });
    }
  };

  FlowState stage;
  FlowDeriv k1, k2, k3, k4;
  stage.fields.resize(nf);
  stage.points.resize(np);

  // stage 1
  stage.t = state.t;
  stage.fields = state.fields;
  stage.points = state.points;
  rhs(stage, k1);

  // stage 2: E half (w + dt/2 k1)
  stage.t = state.t + 0.5 * dt;
  for (std::size_t f = 0; f < nf; ++f) {
    std::vector<cplx> tmp(state.fields[f].size());
    const auto& w0 = state.fields[f];
    const auto& kf = k1.fields[f];
    parallel_for(tmp.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t q = b; q < e; ++q) tmp[q] = w0[q] + 0.5 * dt * kf[q];
    });
    apply_exp(tmp, *eh[f], 1, stage.fields[f]);
  }
  for (std::size_t p = 0; p < np; ++p)
    stage.points[p] = state.points[p] + 0.5 * dt * k1.points[p];
  rhs(stage, k2);

  // stage 3: E half w + dt/2 k2
  for (std::size_t f = 0; f < nf; ++f) {
    apply_exp(state.fields[f], *eh[f], 1, stage.fields[f]);
    auto& sf = stage.fields[f];
    const auto& kf = k2.fields[f];
    parallel_for(sf.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t q = b; q < e; ++q) sf[q] += 0.5 * dt * kf[q];
    });
  }
  for (std::size_t p = 0; p < np; ++p)
    stage.points[p] = state.points[p] + 0.5 * dt * k2.points[p];
  rhs(stage, k3);

  // stage 4: E full w + dt E half k3
  stage.t = state.t + dt;
  for (std::size_t f = 0; f < nf; ++f) {
    apply_exp(state.fields[f], *eh[f], 2, stage.fields[f]);
    auto& sf = stage.fields[f];
    const auto& kf = k3.fields[f];
    const auto& tab = *eh[f];
    parallel_for(sf.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t q = b; q < e; ++q) sf[q] += dt * tab[q] * kf[q];
    });
  }
  for (std::size_t p = 0; p < np; ++p) stage.points[p] = state.points[p] + dt * k3.points[p];
  rhs(stage, k4);

  // combine
  for (std::size_t f = 0; f < nf; ++f) {
    auto& w = state.fields[f];
    const auto& tab = *eh[f];
    const auto& a = k1.fields[f];
    const auto& b2 = k2.fields[f];
    const auto& c = k3.fields[f];
    const auto& d = k4.fields[f];
    parallel_for(w.size(), [&](std::size_t bq, std::size_t eq) {
      for (std::size_t q = bq; q < eq; ++q) {
        const double e1 = tab[q];
        const double e2 = e1 * e1;
        w[q] = e2 * w[q] +
               (dt / 6.0) * (e2 * a[q] + 2.0 * e1 * (b2[q] + c[q]) + d[q]);
      }
    });
  }
  for (std::size_t p = 0; p < np; ++p)
    state.points[p] =
        state.points[p] +
        (dt / 6.0) * (k1.points[p] + 2.0 * k2.points[p] + 2.0 * k3.points[p] + k4.points[p]);
  state.t += dt;
}

}  // namespace vlab
