#include "plkg/nn/lstm.hpp"

#include <cmath>

#include "plkg/error.hpp"
#include "plkg/simd/kernels.hpp"

namespace plkg::nn {

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

LstmCell::LstmCell(const std::string& name, std::size_t in, std::size_t hidden, RngStream& rng)
    : w_x(name + ".w_x", 4 * hidden, in),
      w_h(name + ".w_h", 4 * hidden, hidden),
      b(name + ".bias", 4 * hidden, 1) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (auto& x : w_x.value) x = rng.uniform(-bound, bound);
  for (auto& x : w_h.value) x = rng.uniform(-bound, bound);
  for (auto& x : b.value) x = rng.uniform(-bound, bound);
}

LstmState LstmCell::zero_state(std::size_t batch) const {
  return {Tensor(batch, hidden_dim()), Tensor(batch, hidden_dim())};
}

LstmState LstmCell::step_impl(const Tensor& x, const LstmState& state, StepCache* cache) const {
  const std::size_t hd = hidden_dim();
  const std::size_t batch = x.rows();
  if (x.cols() != in_dim() || state.h.cols() != hd || state.c.cols() != hd ||
      state.h.rows() != batch || state.c.rows() != batch) {
    throw ShapeError(w_x.name + ": input/state shape mismatch");
  }
  const auto& k = simd::kernels();
  const std::vector<double> zero_bias(4 * hd, 0.0);
  std::vector<double> z(4 * hd), zh(4 * hd);

  LstmState out{Tensor(batch, hd), Tensor(batch, hd)};
  if (cache) {
    cache->x = x;
    cache->h_prev = state.h;
    cache->c_prev = state.c;
    cache->i = cache->f = cache->g = cache->o = cache->c = cache->tanh_c = Tensor(batch, hd);
  }
  for (std::size_t r = 0; r < batch; ++r) {
    k.gemv(w_x.value, 4 * hd, in_dim(), x.row(r), b.value, z);
    k.gemv(w_h.value, 4 * hd, hd, state.h.row(r), zero_bias, zh);
    for (std::size_t j = 0; j < hd; ++j) {
      const double gi = sigmoid(z[j] + zh[j]);
      const double gf = sigmoid(z[hd + j] + zh[hd + j]);
      const double gg = std::tanh(z[2 * hd + j] + zh[2 * hd + j]);
      const double go = sigmoid(z[3 * hd + j] + zh[3 * hd + j]);
      const double c = gf * state.c(r, j) + gi * gg;
      const double tc = std::tanh(c);
      out.c(r, j) = c;
      out.h(r, j) = go * tc;
      if (cache) {
        cache->i(r, j) = gi;
        cache->f(r, j) = gf;
        cache->g(r, j) = gg;
        cache->o(r, j) = go;
        cache->c(r, j) = c;
        cache->tanh_c(r, j) = tc;
      }
    }
  }
  return out;
}

LstmState LstmCell::step(const Tensor& x, const LstmState& state) const {
  return step_impl(x, state, nullptr);
}

LstmState LstmCell::forward(const std::vector<Tensor>& xs, const LstmState& initial) {
  cache_.assign(xs.size(), StepCache{});
  LstmState s = initial;
  for (std::size_t t = 0; t < xs.size(); ++t) s = step_impl(xs[t], s, &cache_[t]);
  return s;
}

LstmState LstmCell::infer(const std::vector<Tensor>& xs, const LstmState& initial) const {
  LstmState s = initial;
  for (const auto& x : xs) s = step_impl(x, s, nullptr);
  return s;
}

LstmGrads LstmCell::backward(const Tensor& dh_last, const Tensor& dc_last) {
  if (cache_.empty()) throw ShapeError(w_x.name + ": backward without forward");
  const std::size_t hd = hidden_dim();
  const std::size_t in = in_dim();
  const std::size_t batch = dh_last.rows();
  const auto& k = simd::kernels();

  LstmGrads grads;
  grads.dx.assign(cache_.size(), Tensor());
  Tensor dh = dh_last;
  Tensor dc = dc_last;
  std::vector<double> dz(4 * hd);
  for (std::size_t t = cache_.size(); t-- > 0;) {
    const StepCache& s = cache_[t];
    Tensor dx(batch, in);
    Tensor dh_prev(batch, hd);
    Tensor dc_prev(batch, hd);
    for (std::size_t r = 0; r < batch; ++r) {
      for (std::size_t j = 0; j < hd; ++j) {
        const double gi = s.i(r, j), gf = s.f(r, j), gg = s.g(r, j), go = s.o(r, j);
        const double tc = s.tanh_c(r, j);
        const double dhv = dh(r, j);
        const double dcv = dc(r, j) + dhv * go * (1.0 - tc * tc);
        dz[j] = dcv * gg * gi * (1.0 - gi);
        dz[hd + j] = dcv * s.c_prev(r, j) * gf * (1.0 - gf);
        dz[2 * hd + j] = dcv * gi * (1.0 - gg * gg);
        dz[3 * hd + j] = dhv * tc * go * (1.0 - go);
        dc_prev(r, j) = dcv * gf;
      }
      auto xr = s.x.row(r);
      auto hr = s.h_prev.row(r);
      auto dxr = dx.row(r);
      auto dhr = dh_prev.row(r);
      std::span<const double> wx = w_x.value;
      std::span<const double> wh = w_h.value;
      std::span<double> gwx = w_x.grad;
      std::span<double> gwh = w_h.grad;
      for (std::size_t q = 0; q < 4 * hd; ++q) {
        const double g = dz[q];
        if (g == 0.0) continue;
        b.grad[q] += g;
        k.axpy(g, xr, gwx.subspan(q * in, in));
        k.axpy(g, hr, gwh.subspan(q * hd, hd));
        k.axpy(g, wx.subspan(q * in, in), dxr);
        k.axpy(g, wh.subspan(q * hd, hd), dhr);
      }
    }
    grads.dx[t] = std::move(dx);
    dh = std::move(dh_prev);
    dc = std::move(dc_prev);
  }
  grads.dh0 = std::move(dh);
  grads.dc0 = std::move(dc);
  return grads;
}

}  // namespace plkg::nn
