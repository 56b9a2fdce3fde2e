#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "../support/oracles.hpp"
#include "plkg/error.hpp"
#include "plkg/sac/agent.hpp"
#include "plkg/sac/trainer.hpp"

using namespace plkg;
using namespace plkg::sac;
using nn::Tensor;

namespace {

SacConfig tiny_config(std::size_t hidden = 6) {
  SacConfig c;
  c.hidden = hidden;
  c.batch_size = 4;
  c.buffer_capacity = 64;
  c.warmup_steps = 0;
  return c;
}

Tensor random_tensor(std::size_t r, std::size_t c, RngStream& rng, double scale = 1.0) {
  Tensor t(r, c);
  for (auto& x : t.data()) x = scale * rng.uniform(-1.0, 1.0);
  return t;
}

Batch random_batch(std::size_t b, std::size_t adim, RngStream& rng, double done_prob = 0.3) {
  Batch out{random_tensor(b, 5, rng), random_tensor(b, adim, rng, 0.9), random_tensor(b, 5, rng),
            std::vector<double>(b), std::vector<double>(b)};
  for (std::size_t r = 0; r < b; ++r) {
    out.reward[r] = rng.uniform(-1.0, 2.0);
    out.done[r] = rng.uniform() < done_prob ? 1.0 : 0.0;
  }
  return out;
}

nn::Param* find(nn::Mlp& m, const std::string& suffix) {
  for (nn::Param* p : m.params()) {
    if (p->name.size() >= suffix.size() &&
        p->name.compare(p->name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return p;
    }
  }
  return nullptr;
}

// Makes a critic output the constant `value`.
void flatten_critic(nn::Mlp& m, double value) {
  nn::Param* w = find(m, "out.weight");
  nn::Param* b = find(m, "out.bias");
  REQUIRE(w);
  REQUIRE(b);
  std::fill(w->value.begin(), w->value.end(), 0.0);
  b->value[0] = value;
}

void set_alpha_zero(SacAgent& agent) { agent.alpha_params()[0]->value[0] = -1000.0; }

std::vector<std::vector<double>> snapshot(const nn::ParamRefs& params) {
  std::vector<std::vector<double>> out;
  for (auto* p : params) out.push_back(p->value);
  return out;
}

bool all_zero_grads(const nn::ParamRefs& params) {
  for (auto* p : params)
    for (double g : p->grad)
      if (g != 0.0) return false;
  return true;
}

}  // namespace

TEST_CASE("action dimensions follow the antenna count") {
  RngStream rng(1, 0);
  SacAgent agent(8, tiny_config(), rng);
  CHECK(agent.agent_action_dim() == 16);
  CHECK(agent.joint_action_dim() == 32);
  CHECK(agent.target_entropy() == -32.0);
  Observation obs;
  CHECK(agent.act(obs, rng, false).size() == 32);
}

TEST_CASE("critic target hand cases") {
  RngStream rng(2, 0);
  SacAgent agent(1, tiny_config(), rng);
  set_alpha_zero(agent);
  flatten_critic(agent.target_critic(0), 0.0);
  flatten_critic(agent.target_critic(1), 0.0);
  Batch b = random_batch(1, 4, rng, 0.0);
  b.reward[0] = 1.0;
  const Tensor na(1, 2), nb(1, 2);
  CHECK(agent.critic_target(b, na, nb)[0] == doctest::Approx(1.0));

  flatten_critic(agent.target_critic(0), 2.0);
  flatten_critic(agent.target_critic(1), 3.0);
  CHECK(agent.critic_target(b, na, nb)[0] == doctest::Approx(1.0 + 0.99 * 2.0));
  b.done[0] = 1.0;
  CHECK(agent.critic_target(b, na, nb)[0] == 1.0);
}

TEST_CASE("critic target uses the elementwise minimum of the target critics") {
  RngStream rng(3, 0);
  SacAgent agent(2, tiny_config(), rng);
  // Decorrelate the two targets.
  for (auto* p : agent.target_critic(1).params())
    for (auto& v : p->value) v += rng.uniform(-0.5, 0.5);
  const Batch b = random_batch(16, 8, rng);
  const Tensor na = random_tensor(16, 4, rng), nb = random_tensor(16, 4, rng);
  const auto y = agent.critic_target(b, na, nb);
  const JointSample next = agent.sample_actions(b.next_obs, na, nb);
  const auto t1 = agent.target_q_values(0, b.next_obs, next.joint);
  const auto t2 = agent.target_q_values(1, b.next_obs, next.joint);
  int picked_second = 0;
  for (std::size_t r = 0; r < 16; ++r) {
    const double soft = std::min(t1[r], t2[r]) - agent.alpha() * next.log_prob[r];
    CHECK(y[r] == doctest::Approx(b.reward[r] + 0.99 * (1.0 - b.done[r]) * soft).epsilon(1e-12));
    picked_second += t2[r] < t1[r];
  }
  CHECK(picked_second > 0);
  CHECK(picked_second < 16);
}

TEST_CASE("critic loss values and gradients") {
  RngStream rng(4, 0);
  SacAgent agent(1, tiny_config(), rng);
  Batch b = random_batch(1, 4, rng);
  const double q = agent.q_value(0, b.obs, b.action);
  std::vector<double> y{q};
  auto [l1, l2] = agent.critic_loss(b, y);
  CHECK(l1 == 0.0);
  flatten_critic(agent.critic(0), 0.0);
  y[0] = 1.0;
  std::tie(l1, l2) = agent.critic_loss(b, y);
  CHECK(l1 == doctest::Approx(0.5));

  SacAgent g(2, tiny_config(5), rng);
  const Batch batch = random_batch(6, 8, rng);
  std::vector<double> targets(6);
  for (auto& t : targets) t = rng.uniform(-1.0, 1.0);
  nn::zero_grads(g.critic_params());
  g.critic_loss(batch, targets);
  std::vector<double*> vals;
  std::vector<double> grads;
  oracle::flatten(g.critic_params(), vals, grads);
  auto loss = [&] {
    double total = 0.0;
    for (int j = 0; j < 2; ++j) {
      const auto qs = g.q_values(j, batch.obs, batch.action);
      for (std::size_t r = 0; r < 6; ++r) total += 0.5 * (qs[r] - targets[r]) * (qs[r] - targets[r]);
    }
    return total / 6.0;
  };
  CHECK(oracle::fd_check(vals, grads, loss) <= 1e-4);
}

TEST_CASE("actor loss gradients match finite differences") {
  RngStream rng(5, 0);
  SacConfig cfg = tiny_config(5);
  cfg.alpha_init = 0.3;
  SacAgent agent(2, cfg, rng);
  const Batch b = random_batch(5, 8, rng);
  const Tensor na = random_tensor(5, 4, rng, 1.5), nb = random_tensor(5, 4, rng, 1.5);
  nn::zero_grads(agent.alice_params());
  nn::zero_grads(agent.bob_params());
  const double l0 = agent.actor_loss(b, na, nb);
  CHECK(all_zero_grads(agent.critic_params()));
  std::vector<double*> vals;
  std::vector<double> grads;
  oracle::flatten(agent.alice_params(), vals, grads);
  oracle::flatten(agent.bob_params(), vals, grads);
  // Reference loss recomputed from the public pieces, independent of backward.
  auto loss = [&] {
    const JointSample s = agent.sample_actions(b.obs, na, nb);
    const auto q1 = agent.q_values(0, b.obs, s.joint);
    const auto q2 = agent.q_values(1, b.obs, s.joint);
    double total = 0.0;
    for (std::size_t r = 0; r < 5; ++r) {
      total += agent.alpha() * s.log_prob[r] - std::min(q1[r], q2[r]);
    }
    return total / 5.0;
  };
  CHECK(l0 == doctest::Approx(loss()).epsilon(1e-12));
  CHECK(oracle::fd_check(vals, grads, loss) <= 1e-4);
}

TEST_CASE("actor loss is flat for constant critics and zero temperature") {
  RngStream rng(6, 0);
  SacAgent agent(1, tiny_config(), rng);
  set_alpha_zero(agent);
  flatten_critic(agent.critic(0), 1.5);
  flatten_critic(agent.critic(1), 2.5);
  const Batch b = random_batch(8, 4, rng);
  const Tensor na = random_tensor(8, 2, rng), nb = random_tensor(8, 2, rng);
  nn::zero_grads(agent.alice_params());
  nn::zero_grads(agent.bob_params());
  const double l1 = agent.actor_loss(b, na, nb);
  CHECK(all_zero_grads(agent.alice_params()));
  CHECK(all_zero_grads(agent.bob_params()));
  CHECK(agent.actor_loss(b, na, nb) == l1);
}

TEST_CASE("actor moves toward higher Q along one coordinate") {
  RngStream rng(7, 0);
  SacConfig cfg = tiny_config(16);
  cfg.alpha_init = 1e-6;
  SacAgent agent(1, cfg, rng);
  // Fit both critics to Q = a_alice[0] on random actions.
  nn::Adam opt(1e-2);
  for (int step = 0; step < 1500; ++step) {
    const Batch b = random_batch(32, 4, rng, 1.0);
    std::vector<double> y(32);
    for (std::size_t r = 0; r < 32; ++r) y[r] = b.action(r, 0);
    nn::zero_grads(agent.critic_params());
    agent.critic_loss(b, y);
    opt.update(agent.critic_params());
  }
  const Batch probe = random_batch(64, 4, rng);
  auto mean_first = [&] {
    double s = 0.0;
    for (std::size_t r = 0; r < 64; ++r) {
      Observation o;
      for (int k = 0; k < 5; ++k) o.values[k] = probe.obs(r, k);
      s += agent.act(o, rng, true)[0];
    }
    return s / 64.0;
  };
  const double before = mean_first();
  nn::zero_grads(agent.alice_params());
  nn::zero_grads(agent.bob_params());
  agent.actor_loss(probe, random_tensor(64, 2, rng), random_tensor(64, 2, rng));
  for (auto* p : agent.alice_params())
    for (std::size_t i = 0; i < p->size(); ++i) p->value[i] -= 0.05 * p->grad[i];
  CHECK(mean_first() > before);
}

TEST_CASE("temperature loss direction and equilibrium") {
  RngStream rng(8, 0);
  SacConfig cfg = tiny_config();
  cfg.target_entropy = -16.0;
  SacAgent agent(4, cfg, rng);
  auto* la = agent.alpha_params()[0];
  la->zero_grad();
  const std::vector<double> lp(10, -10.0);
  const double loss = agent.alpha_loss(lp);
  CHECK(loss == doctest::Approx(26.0 * agent.alpha()));
  // dL/dalpha = 26; the stored gradient is w.r.t. log(alpha).
  CHECK(la->grad[0] / agent.alpha() == doctest::Approx(26.0));
  la->zero_grad();
  const std::vector<double> eq(10, 16.0);
  agent.alpha_loss(eq);
  CHECK(la->grad[0] == 0.0);

  // Log parameterization keeps alpha positive under a persistent push down.
  nn::Adam opt(1e-2);
  for (int k = 0; k < 100000; ++k) {
    la->zero_grad();
    agent.alpha_loss(lp);
    opt.update(agent.alpha_params());
  }
  CHECK(agent.alpha() > 0.0);
  CHECK(agent.alpha() < 0.02);
}

TEST_CASE("losses do not leak gradients across parameter groups") {
  RngStream rng(9, 0);
  SacAgent agent(2, tiny_config(), rng);
  const Batch b = random_batch(8, 8, rng);
  const auto actors_a = snapshot(agent.alice_params());
  const auto actors_b = snapshot(agent.bob_params());
  const auto critics = snapshot(agent.critic_params());
  for (auto* p : agent.all_params()) p->zero_grad();
  std::vector<double> y(8, 0.5);
  agent.critic_loss(b, y);
  CHECK(all_zero_grads(agent.alice_params()));
  CHECK(all_zero_grads(agent.bob_params()));
  CHECK(all_zero_grads(agent.alpha_params()));
  nn::zero_grads(agent.critic_params());
  std::vector<double> lp;
  agent.actor_loss(b, random_tensor(8, 4, rng), random_tensor(8, 4, rng), &lp);
  CHECK(all_zero_grads(agent.critic_params()));
  CHECK(all_zero_grads(agent.alpha_params()));
  nn::zero_grads(agent.alice_params());
  nn::zero_grads(agent.bob_params());
  agent.alpha_loss(lp);
  CHECK(all_zero_grads(agent.alice_params()));
  CHECK(all_zero_grads(agent.critic_params()));
  CHECK(snapshot(agent.alice_params()) == actors_a);
  CHECK(snapshot(agent.bob_params()) == actors_b);
  CHECK(snapshot(agent.critic_params()) == critics);
}

TEST_CASE("soft update endpoints and geometric convergence") {
  RngStream rng(10, 0);
  nn::Param t("t", 1, 7), o("o", 1, 7);
  for (auto& v : t.value) v = rng.uniform(-1.0, 1.0);
  for (auto& v : o.value) v = rng.uniform(-1.0, 1.0);
  const auto t0 = t.value;
  soft_update({&t}, {&o}, 0.0);
  CHECK(t.value == t0);
  auto dist = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < 7; ++i) s += (t.value[i] - o.value[i]) * (t.value[i] - o.value[i]);
    return std::sqrt(s);
  };
  double prev = dist();
  for (int k = 0; k < 50; ++k) {
    soft_update({&t}, {&o}, 0.005);
    const double d = dist();
    CHECK(d == doctest::Approx(prev * 0.995).epsilon(1e-9));
    prev = d;
  }
  soft_update({&t}, {&o}, 1.0);
  CHECK(t.value == o.value);
  nn::Param wrong("w", 1, 3);
  CHECK_THROWS_AS(soft_update({&t}, {&wrong}, 0.5), ShapeError);
}

TEST_CASE("replay buffer ring and uniform sampling") {
  ReplayBuffer buf(100);
  for (int i = 0; i < 150; ++i) {
    Transition t;
    t.action = {static_cast<double>(i)};
    t.reward = i;
    buf.push(t);
  }
  CHECK(buf.size() == 100);
  double min_reward = 1e9;
  for (std::size_t i = 0; i < buf.size(); ++i) min_reward = std::min(min_reward, buf.at(i).reward);
  CHECK(min_reward == 50.0);

  RngStream rng(11, 0);
  std::vector<double> counts(100, 0.0);
  const std::size_t draws = 100000;
  for (std::size_t i : buf.sample_indices(draws, rng)) counts[i] += 1.0;
  const double expected = draws / 100.0;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 99 degrees of freedom, upper 1% point.
  CHECK(chi2 < 134.64);
  CHECK_THROWS_AS(ReplayBuffer(0), ParameterError);
  ReplayBuffer empty(4);
  CHECK_THROWS_AS(empty.sample(1, rng), ContractError);
}

TEST_CASE("SAC learns a contextual bandit") {
  // One-step episodes: reward peaks when Alice's first coordinate tracks the
  // sign of obs[0] and Bob's first coordinate sits at -0.3.
  RngStream rng(12, 0);
  SacConfig cfg;
  cfg.hidden = 32;
  cfg.batch_size = 64;
  cfg.buffer_capacity = 5000;
  cfg.lr_actor = cfg.lr_critic = cfg.lr_alpha = 3e-3;
  cfg.alpha_init = 0.05;
  SacAgent agent(1, cfg, rng);
  ReplayBuffer buf(cfg.buffer_capacity);
  auto target = [](double ctx) { return ctx > 0.0 ? 0.6 : -0.6; };
  auto payoff = [&](const Observation& o, const std::vector<double>& a) {
    const double e1 = a[0] - target(o.values[0]);
    const double e2 = a[2] + 0.3;
    return -(e1 * e1 + e2 * e2);
  };
  auto draw_obs = [&] {
    Observation o;
    for (auto& v : o.values) v = rng.uniform(-1.0, 1.0);
    return o;
  };
  for (int step = 0; step < 3000; ++step) {
    const Observation o = draw_obs();
    std::vector<double> a = step < 200 ? std::vector<double>{rng.uniform(-1, 1), rng.uniform(-1, 1),
                                                             rng.uniform(-1, 1), rng.uniform(-1, 1)}
                                       : agent.act(o, rng, false);
    const double r = payoff(o, a);
    buf.push({o, a, r, o, true});
    if (buf.size() >= cfg.batch_size) agent.update(buf.sample(cfg.batch_size, rng), rng);
  }
  double learned = 0.0, random = 0.0;
  for (int k = 0; k < 500; ++k) {
    const Observation o = draw_obs();
    learned += payoff(o, agent.act(o, rng, true));
    random += payoff(o, {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                         rng.uniform(-1, 1)});
  }
  learned /= 500.0;
  random /= 500.0;
  MESSAGE("bandit mean payoff: learned " << learned << ", random " << random);
  CHECK(learned > -0.05);
  CHECK(learned > random + 0.3);
}

TEST_CASE("seeded smoke training run is reproducible") {
  EnvConfig env_cfg;
  env_cfg.channel = ChannelParams::stationary(2, 0.9);
  env_cfg.channel.tau = calibrate_tau(2, 0.5, 20000);
  env_cfg.episode_len = 20;
  SacConfig cfg = tiny_config(8);
  cfg.batch_size = 8;
  cfg.warmup_steps = 10;
  auto run = [&] {
    Environment env(env_cfg);
    RngStream init(77, kInitStream);
    SacAgent agent(2, cfg, init);
    const TrainingLog log = train(env, agent, 77, 3);
    const auto path = std::filesystem::temp_directory_path() / "plkg_smoke.csv";
    log.write_csv(path);
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  const std::string a = run();
  CHECK(a == run());
  CHECK(a.rfind(kTrainingLogHeader, 0) == 0);
  CHECK(std::count(a.begin(), a.end(), '\n') == 4);
}

TEST_CASE("baseline runs share the channel stream") {
  EnvConfig env_cfg;
  env_cfg.channel = ChannelParams::stationary(3, 0.9);
  env_cfg.lambda_k = 0.0;
  env_cfg.episode_len = 30;
  Environment e1(env_cfg), e2(env_cfg);
  const TrainingLog r = run_baseline(e1, BaselineKind::random, 5, 4);
  const TrainingLog o = run_baseline(e2, BaselineKind::oracle_svd, 5, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(o.episodes[i].eavesdrop_frac == r.episodes[i].eavesdrop_frac);
    CHECK(o.episodes[i].mean_reward >= r.episodes[i].mean_reward);
  }
}
