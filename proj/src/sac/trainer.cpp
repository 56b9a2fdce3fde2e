#include "plkg/sac/trainer.hpp"

#include <fstream>

#include "plkg/error.hpp"

namespace plkg::sac {

double TrainingLog::tail_mean(double EpisodeLog::*field, std::size_t window) const {
  if (episodes.empty()) return 0.0;
  const std::size_t n = std::min(window, episodes.size());
  double acc = 0.0;
  for (std::size_t i = episodes.size() - n; i < episodes.size(); ++i) acc += episodes[i].*field;
  return acc / static_cast<double>(n);
}

void TrainingLog::write_csv(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os.precision(17);
  os << kTrainingLogHeader << '\n';
  for (const auto& e : episodes) {
    os << e.episode << ',' << e.mean_reward << ',' << e.mean_rk << ',' << e.mean_rd << ','
       << e.eavesdrop_frac << ',' << e.alpha << ',' << e.critic_loss << ',' << e.actor_loss << ','
       << e.alpha_loss << ',' << e.clamp_count << '\n';
  }
}

namespace {

struct EpisodeAccumulator {
  double reward = 0.0, rk = 0.0, rd = 0.0, eve = 0.0;
  double critic = 0.0, actor = 0.0, alpha_loss = 0.0;
  std::size_t steps = 0, updates = 0;

  void add_step(const StepResult& s) {
    reward += s.reward;
    rk += s.report.key;
    rd += s.report.rd;
    eve += s.report.xi == EveMode::eavesdropping ? 1.0 : 0.0;
    ++steps;
  }

  void add_update(const UpdateStats& u) {
    critic += u.critic_loss;
    actor += u.actor_loss;
    alpha_loss += u.alpha_loss;
    ++updates;
  }

  EpisodeLog finish(std::size_t episode, double alpha, std::size_t clamps) const {
    const double n = static_cast<double>(std::max<std::size_t>(steps, 1));
    const double u = static_cast<double>(std::max<std::size_t>(updates, 1));
    return {episode, reward / n, rk / n, rd / n, eve / n, alpha, critic / u, actor / u,
            alpha_loss / u, clamps};
  }
};

}  // namespace

TrainingLog train(Environment& env, SacAgent& agent, std::uint64_t seed, std::size_t episodes,
                  const EpisodeCallback& on_episode) {
  const SacConfig& cfg = agent.config();
  RngStream channel_rng(seed, kChannelStream);
  RngStream policy_rng(seed, kPolicyStream);
  RngStream replay_rng(seed, kReplayStream);
  RngStream update_rng(seed, kUpdateStream);
  ReplayBuffer buffer(cfg.buffer_capacity);
  const std::size_t update_start = std::max(cfg.warmup_steps, cfg.batch_size);
  const std::size_t adim = agent.joint_action_dim();

  TrainingLog log;
  std::size_t total_steps = 0;
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    Observation obs = env.reset(channel_rng);
    const std::size_t clamps_before = env.diagnostics().clamp_count;
    EpisodeAccumulator acc;
    bool done = false;
    while (!done) {
      std::vector<double> action;
      if (total_steps < cfg.warmup_steps) {
        action.resize(adim);
        for (auto& a : action) a = policy_rng.uniform(-1.0, 1.0);
      } else {
        action = agent.act(obs, policy_rng, false);
      }
      const StepResult step = env.step(action, channel_rng);
      acc.add_step(step);
      buffer.push({obs, std::move(action), step.reward, step.obs, step.done});
      obs = step.obs;
      done = step.done;
      ++total_steps;
      if (buffer.size() >= update_start) {
        for (std::size_t u = 0; u < cfg.updates_per_step; ++u) {
          acc.add_update(agent.update(buffer.sample(cfg.batch_size, replay_rng), update_rng));
        }
      }
    }
    const EpisodeLog row =
        acc.finish(ep, agent.alpha(), env.diagnostics().clamp_count - clamps_before);
    log.episodes.push_back(row);
    if (on_episode) on_episode(row);
  }
  return log;
}

TrainingLog run_baseline(Environment& env, BaselineKind kind, std::uint64_t seed,
                         std::size_t episodes) {
  RngStream channel_rng(seed, kChannelStream);
  RngStream policy_rng(seed, kPolicyStream);
  const std::size_t n = env.config().channel.n;
  TrainingLog log;
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    env.reset(channel_rng);
    const std::size_t clamps_before = env.diagnostics().clamp_count;
    EpisodeAccumulator acc;
    bool done = false;
    while (!done) {
      const BeamPair beams = kind == BaselineKind::random ? random_action(n, policy_rng)
                                                          : oracle_action(env.channel().h_ab);
      const StepResult step = env.step_beams(beams, channel_rng);
      acc.add_step(step);
      done = step.done;
    }
    log.episodes.push_back(acc.finish(ep, 0.0, env.diagnostics().clamp_count - clamps_before));
  }
  return log;
}

std::vector<double> evaluate_policy(Environment& env, const SacAgent& agent, std::uint64_t seed,
                                    std::size_t episodes) {
  RngStream channel_rng(seed, kChannelStream);
  RngStream policy_rng(seed, kPolicyStream);
  std::vector<double> rewards;
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    Observation obs = env.reset(channel_rng);
    bool done = false;
    while (!done) {
      const StepResult step = env.step(agent.act(obs, policy_rng, true), channel_rng);
      rewards.push_back(step.reward);
      obs = step.obs;
      done = step.done;
    }
  }
  return rewards;
}

}  // namespace plkg::sac
