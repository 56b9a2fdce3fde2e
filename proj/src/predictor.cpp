#include "plkg/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "plkg/baselines.hpp"
#include "plkg/env.hpp"
#include "plkg/error.hpp"
#include "plkg/nn/adam.hpp"

namespace plkg {

void PredictorConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ParameterError("PredictorConfig: " + msg); };
  if (seq_len < 1) fail("seq_len must be >= 1");
  if (hidden < 1) fail("hidden must be >= 1");
  if (!(lr > 0.0)) fail("lr must be > 0");
  if (!(w_mse >= 0.0) || !(w_bce >= 0.0)) fail("loss weights must be >= 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(input_scale > 0.0)) fail("input_scale must be > 0");
}

Rollout collect_rollout(const EnvConfig& env, std::size_t slots, RngStream& channel_rng,
                        RngStream& policy_rng) {
  env.validate();
  Rollout out;
  out.slots.reserve(slots);
  ChannelState state = init_channels(env.channel, channel_rng);
  for (std::size_t t = 0; t < slots; ++t) {
    const BeamPair beams = random_action(env.channel.n, policy_rng);
    const EquivalentChannels eq = equivalent_channels(state, beams, env.pa);
    out.slots.push_back({fred_features(eq), eq.ae, state.xi == EveMode::eavesdropping ? 1 : 0});
    state = evolve_ar1(state, env.channel, channel_rng);
  }
  return out;
}

void write_rollout_csv(const std::filesystem::path& path, const Rollout& rollout) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os.precision(17);
  os << "slot,af_re,af_im,bf_re,bf_im,hae_re,hae_im,xi\n";
  for (std::size_t t = 0; t < rollout.slots.size(); ++t) {
    const auto& s = rollout.slots[t];
    os << t << ',' << s.fred[0] << ',' << s.fred[1] << ',' << s.fred[2] << ',' << s.fred[3]
       << ',' << s.hae.real() << ',' << s.hae.imag() << ',' << s.xi << '\n';
  }
}

PredictorDataset build_dataset(const Rollout& rollout, const PredictorConfig& config,
                               std::uint64_t seed) {
  config.validate();
  const std::size_t len = config.seq_len;
  if (rollout.slots.size() < len) {
    throw ParameterError("build_dataset: rollout of " + std::to_string(rollout.slots.size()) +
                         " slots is shorter than the sequence length " + std::to_string(len));
  }
  const std::size_t windows = rollout.slots.size() - len + 1;
  std::vector<PredictorSample> all(windows);
  for (std::size_t w = 0; w < windows; ++w) {
    PredictorSample& s = all[w];
    s.inputs.reserve(len);
    for (std::size_t k = 0; k < len; ++k) s.inputs.push_back(rollout.slots[w + k].fred);
    const RolloutSlot& last = rollout.slots[w + len - 1];
    s.target_re = last.hae.real();
    s.target_im = last.hae.imag();
    s.target_xi = last.xi;
    s.end_slot = w + len - 1;
  }

  const std::size_t blocks = (windows + len - 1) / len;
  std::vector<std::size_t> order(blocks);
  std::iota(order.begin(), order.end(), 0);
  RngStream rng(seed, 0xDA7A);
  for (std::size_t i = blocks; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
  const std::size_t val_blocks = std::max<std::size_t>(1, blocks / 10);
  std::vector<char> is_val(blocks, 0);
  for (std::size_t i = 0; i < val_blocks && blocks > 1; ++i) is_val[order[i]] = 1;

  PredictorDataset out;
  for (std::size_t w = 0; w < windows; ++w) {
    (is_val[w / len] ? out.validation : out.train).push_back(std::move(all[w]));
  }
  return out;
}

double binary_cross_entropy(double logit, int label) {
  // log(1 + exp(-|z|)) + max(z, 0) - z y
  return std::log1p(std::exp(-std::abs(logit))) + std::max(logit, 0.0) -
         logit * static_cast<double>(label);
}

Predictor::Predictor(const PredictorConfig& config, RngStream& init_rng) : config_(config) {
  config_.validate();
  lstm_ = nn::LstmCell("predictor.lstm", 4, config_.hidden, init_rng);
  head_ = nn::Dense("predictor.head", config_.hidden, 3, init_rng);
}

nn::ParamRefs Predictor::params() {
  nn::ParamRefs p = lstm_.params();
  for (nn::Param* q : head_.params()) p.push_back(q);
  return p;
}

std::vector<nn::Tensor> Predictor::pack(std::span<const PredictorSample* const> batch) const {
  const double inv = 1.0 / config_.input_scale;
  std::vector<nn::Tensor> xs(config_.seq_len, nn::Tensor(batch.size(), 4));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    if (batch[b]->inputs.size() != config_.seq_len) {
      throw ShapeError("predictor: window length " + std::to_string(batch[b]->inputs.size()) +
                       " != " + std::to_string(config_.seq_len));
    }
    for (std::size_t t = 0; t < config_.seq_len; ++t) {
      for (std::size_t k = 0; k < 4; ++k) xs[t](b, k) = batch[b]->inputs[t][k] * inv;
    }
  }
  return xs;
}

Prediction Predictor::predict(std::span<const FredFeatures> window) const {
  if (window.size() != config_.seq_len) {
    throw ShapeError("predict: window length " + std::to_string(window.size()) + " != " +
                     std::to_string(config_.seq_len));
  }
  PredictorSample s;
  s.inputs.assign(window.begin(), window.end());
  const PredictorSample* one[] = {&s};
  const auto xs = pack(one);
  const nn::LstmState h = lstm_.infer(xs, lstm_.zero_state(1));
  const nn::Tensor out = head_.infer(h.h);
  const double scale = config_.input_scale;
  return {cd(out(0, 0) * scale, out(0, 1) * scale), 1.0 / (1.0 + std::exp(-out(0, 2)))};
}

double Predictor::loss(std::span<const PredictorSample* const> batch) const {
  const auto xs = pack(batch);
  const nn::LstmState h = lstm_.infer(xs, lstm_.zero_state(batch.size()));
  const nn::Tensor out = head_.infer(h.h);
  const double inv = 1.0 / config_.input_scale;
  double total = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const double er = out(b, 0) - batch[b]->target_re * inv;
    const double ei = out(b, 1) - batch[b]->target_im * inv;
    total += config_.w_mse * 0.5 * (er * er + ei * ei) +
             config_.w_bce * binary_cross_entropy(out(b, 2), batch[b]->target_xi);
  }
  return total / static_cast<double>(batch.size());
}

double Predictor::loss_and_grad(std::span<const PredictorSample* const> batch) {
  const auto xs = pack(batch);
  const std::size_t n = batch.size();
  const nn::LstmState h = lstm_.forward(xs, lstm_.zero_state(n));
  const nn::Tensor out = head_.forward(h.h);
  const double inv = 1.0 / config_.input_scale;
  const double inv_n = 1.0 / static_cast<double>(n);
  nn::Tensor d_out(n, 3);
  double total = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    const double er = out(b, 0) - batch[b]->target_re * inv;
    const double ei = out(b, 1) - batch[b]->target_im * inv;
    const double z = out(b, 2);
    const int y = batch[b]->target_xi;
    total += config_.w_mse * 0.5 * (er * er + ei * ei) + config_.w_bce * binary_cross_entropy(z, y);
    d_out(b, 0) = config_.w_mse * er * inv_n;
    d_out(b, 1) = config_.w_mse * ei * inv_n;
    d_out(b, 2) = config_.w_bce * (1.0 / (1.0 + std::exp(-z)) - static_cast<double>(y)) * inv_n;
  }
  const nn::Tensor dh = head_.backward(d_out);
  lstm_.backward(dh, nn::Tensor(n, config_.hidden));
  return total * inv_n;
}

PredictorMetrics evaluate_predictor(const Predictor& predictor,
                                    std::span<const PredictorSample> samples) {
  PredictorMetrics m;
  m.val_size = samples.size();
  if (samples.empty()) return m;
  const double inv = 1.0 / predictor.config().input_scale;
  double mean_re = 0.0, mean_im = 0.0;
  std::size_t positives = 0;
  for (const auto& s : samples) {
    mean_re += s.target_re * inv;
    mean_im += s.target_im * inv;
    positives += static_cast<std::size_t>(s.target_xi);
  }
  mean_re /= static_cast<double>(samples.size());
  mean_im /= static_cast<double>(samples.size());
  double sse = 0.0, sst = 0.0;
  std::size_t correct = 0;
  for (const auto& s : samples) {
    const Prediction p = predictor.predict(s.inputs);
    const double er = p.hae.real() * inv - s.target_re * inv;
    const double ei = p.hae.imag() * inv - s.target_im * inv;
    sse += er * er + ei * ei;
    const double dr = s.target_re * inv - mean_re;
    const double di = s.target_im * inv - mean_im;
    sst += dr * dr + di * di;
    const int guess = p.xi_prob >= 0.5 ? 1 : 0;
    if (guess == s.target_xi) ++correct;
  }
  const auto n = static_cast<double>(samples.size());
  m.val_mse = sse / (2.0 * n);
  m.val_r2 = sst > 0.0 ? 1.0 - sse / sst : 0.0;
  m.val_accuracy = static_cast<double>(correct) / n;
  const double p1 = static_cast<double>(positives) / n;
  m.base_rate_accuracy = std::max(p1, 1.0 - p1);
  return m;
}

PredictorMetrics train_predictor(Predictor& predictor, const PredictorDataset& data,
                                 RngStream& rng) {
  if (data.train.empty()) throw ParameterError("train_predictor: empty training set");
  const PredictorConfig& cfg = predictor.config();
  nn::Adam opt(cfg.lr);
  const nn::ParamRefs params = predictor.params();
  std::vector<const PredictorSample*> batch(cfg.batch_size);
  double last = 0.0;
  double running = 0.0;
  for (std::size_t step = 0; step < cfg.pretrain_steps; ++step) {
    for (auto& b : batch) b = &data.train[rng.index(data.train.size())];
    nn::zero_grads(params);
    last = predictor.loss_and_grad(batch);
    if (!std::isfinite(last)) {
      throw DivergenceError("train_predictor: non-finite loss at step " + std::to_string(step));
    }
    running = step == 0 ? last : 0.99 * running + 0.01 * last;
    opt.update(params);
  }
  PredictorMetrics m = evaluate_predictor(predictor, data.validation);
  m.train_size = data.train.size();
  m.final_train_loss = running;
  return m;
}

}  // namespace plkg
