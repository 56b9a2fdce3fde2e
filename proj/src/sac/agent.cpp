#include "plkg/sac/agent.hpp"

#include <algorithm>
#include <cmath>

#include "plkg/error.hpp"
#include "plkg/simd/kernels.hpp"

namespace plkg::sac {

void SacConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ParameterError("SacConfig: " + msg); };
  if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must lie in (0, 1)");
  if (!(tau_target > 0.0 && tau_target <= 1.0)) fail("tau_target must lie in (0, 1]");
  if (!(lr_actor > 0.0) || !(lr_critic > 0.0) || !(lr_alpha > 0.0)) fail("learning rates must be > 0");
  if (!(alpha_init > 0.0)) fail("alpha_init must be > 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (buffer_capacity < batch_size) fail("buffer_capacity must be >= batch_size");
  if (updates_per_step < 1) fail("updates_per_step must be >= 1");
  if (hidden < 2) fail("hidden must be >= 2");
}

void soft_update(const nn::ParamRefs& target, const nn::ParamRefs& online, double tau) {
  if (target.size() != online.size()) throw ShapeError("soft_update: parameter lists differ");
  const auto& k = simd::kernels();
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i]->value.size() != online[i]->value.size()) {
      throw ShapeError("soft_update: shape mismatch at " + target[i]->name);
    }
    k.lerp(tau, online[i]->value, target[i]->value);
  }
}

namespace {

void copy_values(const nn::ParamRefs& dst, const nn::ParamRefs& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i]->value = src[i]->value;
}

struct HeadSplit {
  nn::Tensor mean;
  nn::Tensor log_std;
};

HeadSplit split_head(const nn::Tensor& out, std::size_t dim) {
  return {nn::slice_cols(out, 0, dim), nn::slice_cols(out, dim, dim)};
}

nn::Tensor obs_tensor(const Observation& obs) {
  return nn::Tensor(1, Observation::kDim, std::vector<double>(obs.values.begin(), obs.values.end()));
}

}  // namespace

SacAgent::SacAgent(std::size_t antennas, const SacConfig& config, RngStream& init_rng)
    : config_(config),
      agent_dim_(2 * antennas),
      target_entropy_(config.target_entropy.value_or(-static_cast<double>(4 * antennas))),
      log_alpha_("log_alpha", 1, 1),
      opt_alice_(config.lr_actor),
      opt_bob_(config.lr_actor),
      opt_critic_(config.lr_critic),
      opt_alpha_(config.lr_alpha) {
  config_.validate();
  const std::vector<std::size_t> hidden{config_.hidden, config_.hidden};
  const std::size_t joint = 2 * agent_dim_;
  alice_ = nn::Mlp("alice", Observation::kDim, hidden, 2 * agent_dim_, init_rng);
  bob_ = nn::Mlp("bob", Observation::kDim, hidden, 2 * agent_dim_, init_rng);
  q1_ = nn::Mlp("q1", Observation::kDim + joint, hidden, 1, init_rng);
  q2_ = nn::Mlp("q2", Observation::kDim + joint, hidden, 1, init_rng);
  q1_target_ = nn::Mlp("q1_target", Observation::kDim + joint, hidden, 1, init_rng);
  q2_target_ = nn::Mlp("q2_target", Observation::kDim + joint, hidden, 1, init_rng);
  copy_values(q1_target_.params(), q1_.params());
  copy_values(q2_target_.params(), q2_.params());
  log_alpha_.value[0] = std::log(config_.alpha_init);
}

double SacAgent::alpha() const { return std::exp(log_alpha_.value[0]); }

nn::ParamRefs SacAgent::critic_params() {
  nn::ParamRefs p = q1_.params();
  for (nn::Param* q : q2_.params()) p.push_back(q);
  return p;
}

nn::ParamRefs SacAgent::target_params() {
  nn::ParamRefs p = q1_target_.params();
  for (nn::Param* q : q2_target_.params()) p.push_back(q);
  return p;
}

nn::ParamRefs SacAgent::all_params() {
  nn::ParamRefs p = alice_.params();
  for (nn::Param* q : bob_.params()) p.push_back(q);
  for (nn::Param* q : critic_params()) p.push_back(q);
  for (nn::Param* q : target_params()) p.push_back(q);
  p.push_back(&log_alpha_);
  return p;
}

std::vector<double> SacAgent::act(const Observation& obs, RngStream& rng,
                                  bool deterministic) const {
  const nn::Tensor x = obs_tensor(obs);
  std::vector<double> out;
  out.reserve(2 * agent_dim_);
  for (const nn::Mlp* actor : {&alice_, &bob_}) {
    const HeadSplit h = split_head(actor->infer(x), agent_dim_);
    if (deterministic) {
      for (double m : h.mean.data()) out.push_back(std::tanh(m));
    } else {
      const nn::PolicySample s = nn::gaussian_head_sample(h.mean, h.log_std, rng);
      out.insert(out.end(), s.action.data().begin(), s.action.data().end());
    }
  }
  return out;
}

JointSample SacAgent::sample_actions(const nn::Tensor& obs, const nn::Tensor& noise_alice,
                                     const nn::Tensor& noise_bob) const {
  const HeadSplit ha = split_head(alice_.infer(obs), agent_dim_);
  const HeadSplit hb = split_head(bob_.infer(obs), agent_dim_);
  JointSample js;
  js.alice = nn::gaussian_head(ha.mean, ha.log_std, noise_alice);
  js.bob = nn::gaussian_head(hb.mean, hb.log_std, noise_bob);
  js.joint = nn::concat_cols(js.alice.action, js.bob.action);
  js.log_prob.resize(obs.rows());
  for (std::size_t r = 0; r < obs.rows(); ++r) {
    js.log_prob[r] = js.alice.log_prob[r] + js.bob.log_prob[r];
  }
  return js;
}

std::vector<double> SacAgent::q_values(int which, const nn::Tensor& obs,
                                       const nn::Tensor& joint) const {
  const nn::Mlp& q = which == 0 ? q1_ : q2_;
  const nn::Tensor out = q.infer(nn::concat_cols(obs, joint));
  return {out.data().begin(), out.data().end()};
}

double SacAgent::q_value(int which, const nn::Tensor& obs, const nn::Tensor& joint) const {
  return q_values(which, obs, joint).front();
}

std::vector<double> SacAgent::target_q_values(int which, const nn::Tensor& obs,
                                              const nn::Tensor& joint) const {
  const nn::Mlp& q = which == 0 ? q1_target_ : q2_target_;
  const nn::Tensor out = q.infer(nn::concat_cols(obs, joint));
  return {out.data().begin(), out.data().end()};
}

std::vector<double> SacAgent::critic_target(const Batch& batch, const nn::Tensor& noise_alice,
                                            const nn::Tensor& noise_bob) const {
  const JointSample next = sample_actions(batch.next_obs, noise_alice, noise_bob);
  const std::vector<double> t1 = target_q_values(0, batch.next_obs, next.joint);
  const std::vector<double> t2 = target_q_values(1, batch.next_obs, next.joint);
  const double a = alpha();
  std::vector<double> y(batch.size());
  for (std::size_t r = 0; r < batch.size(); ++r) {
    const double soft = std::min(t1[r], t2[r]) - a * next.log_prob[r];
    y[r] = batch.reward[r] + config_.gamma * (1.0 - batch.done[r]) * soft;
  }
  return y;
}

std::pair<double, double> SacAgent::critic_loss(const Batch& batch, std::span<const double> y) {
  const std::size_t b = batch.size();
  const nn::Tensor input = nn::concat_cols(batch.obs, batch.action);
  const double inv_b = 1.0 / static_cast<double>(b);
  double losses[2] = {0.0, 0.0};
  nn::Mlp* critics[2] = {&q1_, &q2_};
  for (int j = 0; j < 2; ++j) {
    const nn::Tensor q = critics[j]->forward(input);
    nn::Tensor dq(b, 1);
    for (std::size_t r = 0; r < b; ++r) {
      const double e = q(r, 0) - y[r];
      losses[j] += 0.5 * e * e;
      dq(r, 0) = e * inv_b;
    }
    losses[j] *= inv_b;
    critics[j]->backward(dq);
  }
  return {losses[0], losses[1]};
}

double SacAgent::actor_loss(const Batch& batch, const nn::Tensor& noise_alice,
                            const nn::Tensor& noise_bob, std::vector<double>* log_prob_out) {
  const std::size_t b = batch.size();
  const double inv_b = 1.0 / static_cast<double>(b);
  const double a = alpha();

  const HeadSplit ha = split_head(alice_.forward(batch.obs), agent_dim_);
  const HeadSplit hb = split_head(bob_.forward(batch.obs), agent_dim_);
  const nn::PolicySample sa = nn::gaussian_head(ha.mean, ha.log_std, noise_alice);
  const nn::PolicySample sb = nn::gaussian_head(hb.mean, hb.log_std, noise_bob);
  const nn::Tensor joint = nn::concat_cols(sa.action, sb.action);
  const nn::Tensor input = nn::concat_cols(batch.obs, joint);
  const nn::Tensor q1 = q1_.forward(input);
  const nn::Tensor q2 = q2_.forward(input);

  nn::Tensor dq1(b, 1), dq2(b, 1);
  double loss = 0.0;
  std::vector<double> log_prob(b);
  for (std::size_t r = 0; r < b; ++r) {
    log_prob[r] = sa.log_prob[r] + sb.log_prob[r];
    const bool first = q1(r, 0) <= q2(r, 0);
    const double qmin = first ? q1(r, 0) : q2(r, 0);
    loss += a * log_prob[r] - qmin;
    (first ? dq1 : dq2)(r, 0) = -inv_b;
  }
  loss *= inv_b;

  // Critics are frozen here: only d(input) is used, their param grads dropped.
  const nn::Tensor din1 = q1_.backward(dq1);
  const nn::Tensor din2 = q2_.backward(dq2);
  nn::zero_grads(critic_params());

  const std::size_t obs_dim = Observation::kDim;
  nn::Tensor da(b, agent_dim_), db(b, agent_dim_);
  for (std::size_t r = 0; r < b; ++r) {
    for (std::size_t c = 0; c < agent_dim_; ++c) {
      da(r, c) = din1(r, obs_dim + c) + din2(r, obs_dim + c);
      db(r, c) = din1(r, obs_dim + agent_dim_ + c) + din2(r, obs_dim + agent_dim_ + c);
    }
  }
  const std::vector<double> dlogp(b, a * inv_b);
  const nn::HeadGrads ga = nn::gaussian_head_backward(sa, da, dlogp);
  const nn::HeadGrads gb = nn::gaussian_head_backward(sb, db, dlogp);
  alice_.backward(nn::concat_cols(ga.d_mean, ga.d_log_std));
  bob_.backward(nn::concat_cols(gb.d_mean, gb.d_log_std));

  if (log_prob_out) *log_prob_out = std::move(log_prob);
  return loss;
}

double SacAgent::alpha_loss(std::span<const double> log_prob) {
  double mean_lp = 0.0;
  for (double v : log_prob) mean_lp += v;
  mean_lp /= static_cast<double>(log_prob.size());
  const double a = alpha();
  // L = -alpha (mean log pi + H0); dL/dlog(alpha) = alpha dL/dalpha.
  const double dl_dalpha = -(mean_lp + target_entropy_);
  log_alpha_.grad[0] += a * dl_dalpha;
  return a * dl_dalpha;
}

UpdateStats SacAgent::update(const Batch& batch, RngStream& rng) {
  const std::size_t b = batch.size();
  auto noise = [&]() {
    nn::Tensor t(b, agent_dim_);
    for (auto& v : t.data()) v = rng.normal();
    return t;
  };
  UpdateStats stats;

  const nn::Tensor next_a = noise();
  const nn::Tensor next_b = noise();
  const std::vector<double> y = critic_target(batch, next_a, next_b);
  const nn::ParamRefs critics = critic_params();
  nn::zero_grads(critics);
  const auto [l1, l2] = critic_loss(batch, y);
  stats.critic_loss = 0.5 * (l1 + l2);
  opt_critic_.update(critics);
  nn::zero_grads(critics);

  const nn::Tensor cur_a = noise();
  const nn::Tensor cur_b = noise();
  const nn::ParamRefs pa = alice_params();
  const nn::ParamRefs pb = bob_params();
  nn::zero_grads(pa);
  nn::zero_grads(pb);
  std::vector<double> log_prob;
  stats.actor_loss = actor_loss(batch, cur_a, cur_b, &log_prob);
  opt_alice_.update(pa);
  opt_bob_.update(pb);

  log_alpha_.zero_grad();
  stats.alpha_loss = alpha_loss(log_prob);
  opt_alpha_.update(alpha_params());

  soft_update(q1_target_.params(), q1_.params(), config_.tau_target);
  soft_update(q2_target_.params(), q2_.params(), config_.tau_target);

  double mean_lp = 0.0;
  for (double v : log_prob) mean_lp += v;
  stats.mean_log_prob = mean_lp / static_cast<double>(b);
  stats.alpha = alpha();

  if (!std::isfinite(stats.critic_loss) || !std::isfinite(stats.actor_loss) ||
      !std::isfinite(stats.alpha_loss)) {
    std::string dump = "SAC update produced a non-finite loss (critic=" +
                       std::to_string(stats.critic_loss) + ", actor=" +
                       std::to_string(stats.actor_loss) + ", alpha=" +
                       std::to_string(stats.alpha_loss) + ")\nbatch rows (obs | reward | done):\n";
    for (std::size_t r = 0; r < b; ++r) {
      for (double v : batch.obs.row(r)) dump += std::to_string(v) + " ";
      dump += "| " + std::to_string(batch.reward[r]) + " | " + std::to_string(batch.done[r]) + "\n";
    }
    throw DivergenceError(dump);
  }
  return stats;
}

}  // namespace plkg::sac
