#pragma once

#include <optional>

#include "plkg/nn/adam.hpp"
#include "plkg/nn/mlp.hpp"
#include "plkg/nn/policy_head.hpp"
#include "plkg/sac/replay_buffer.hpp"

namespace plkg::sac {

struct SacConfig {
  double gamma = 0.99;
  double tau_target = 0.005;
  double lr_actor = 1e-4;
  double lr_critic = 1e-4;
  double lr_alpha = 1e-4;
  double alpha_init = 0.02;
  std::optional<double> target_entropy;  // defaults to -(joint action dim)
  std::size_t batch_size = 256;
  std::size_t buffer_capacity = 100000;
  std::size_t warmup_steps = 1000;
  std::size_t updates_per_step = 1;
  std::size_t hidden = 512;

  void validate() const;
};

// Per-update scalars.
struct UpdateStats {
  double critic_loss = 0.0;  // mean of the two critics' losses
  double actor_loss = 0.0;
  double alpha_loss = 0.0;
  double alpha = 0.0;
  double mean_log_prob = 0.0;
};

// Both actors' reparameterized samples at one batch of states.
struct JointSample {
  nn::PolicySample alice;
  nn::PolicySample bob;
  nn::Tensor joint;               // [alice | bob]
  std::vector<double> log_prob;   // alice + bob
};

// target <- (1 - tau) target + tau online, elementwise.
void soft_update(const nn::ParamRefs& target, const nn::ParamRefs& online, double tau);

// Two actors (Alice, Bob) sharing twin critics over (state, joint action),
// with target critics and a learned temperature.
class SacAgent {
 public:
  SacAgent(std::size_t antennas, const SacConfig& config, RngStream& init_rng);

  std::size_t agent_action_dim() const { return agent_dim_; }
  std::size_t joint_action_dim() const { return 2 * agent_dim_; }
  double alpha() const;
  double target_entropy() const { return target_entropy_; }
  const SacConfig& config() const { return config_; }

  // Stochastic (sampled) or deterministic (tanh(mean)) joint action.
  std::vector<double> act(const Observation& obs, RngStream& rng, bool deterministic) const;

  // y = r + gamma (1 - done) (min_j Q_target_j(s', a') - alpha log pi(a'|s')),
  // with a' drawn from the current actors using the supplied noise.
  std::vector<double> critic_target(const Batch& batch, const nn::Tensor& noise_alice,
                                    const nn::Tensor& noise_bob) const;

  // Returns (loss_q1, loss_q2), each mean 0.5 (Q - y)^2; accumulates critic grads.
  std::pair<double, double> critic_loss(const Batch& batch, std::span<const double> y);

  // mean(alpha log pi(a|s) - min_j Q_j(s, a)) with a re-sampled from both
  // actors; accumulates actor grads (critic grads are cleared afterwards).
  // Returns the loss and, via `log_prob_out`, the per-row joint log pi.
  double actor_loss(const Batch& batch, const nn::Tensor& noise_alice,
                    const nn::Tensor& noise_bob, std::vector<double>* log_prob_out = nullptr);

  // mean(-alpha log pi - alpha H0); accumulates d/dlog(alpha). Returns the loss.
  double alpha_loss(std::span<const double> log_prob);

  // One full update: critics, actors, temperature, then target soft update.
  UpdateStats update(const Batch& batch, RngStream& rng);

  JointSample sample_actions(const nn::Tensor& obs, const nn::Tensor& noise_alice,
                             const nn::Tensor& noise_bob) const;

  double q_value(int which, const nn::Tensor& obs, const nn::Tensor& joint_action) const;
  std::vector<double> q_values(int which, const nn::Tensor& obs, const nn::Tensor& joint) const;
  std::vector<double> target_q_values(int which, const nn::Tensor& obs,
                                      const nn::Tensor& joint) const;

  nn::ParamRefs alice_params() { return alice_.params(); }
  nn::ParamRefs bob_params() { return bob_.params(); }
  nn::ParamRefs critic_params();
  nn::ParamRefs target_params();
  nn::ParamRefs alpha_params() { return {&log_alpha_}; }
  nn::ParamRefs all_params();

  nn::Mlp& alice() { return alice_; }
  nn::Mlp& bob() { return bob_; }
  nn::Mlp& critic(int which) { return which == 0 ? q1_ : q2_; }
  nn::Mlp& target_critic(int which) { return which == 0 ? q1_target_ : q2_target_; }

 private:
  SacConfig config_;
  std::size_t agent_dim_;
  double target_entropy_;
  nn::Mlp alice_, bob_;
  nn::Mlp q1_, q2_, q1_target_, q2_target_;
  nn::Param log_alpha_;
  nn::Adam opt_alice_, opt_bob_, opt_critic_, opt_alpha_;
};

}  // namespace plkg::sac
