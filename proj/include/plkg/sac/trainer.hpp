#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "plkg/baselines.hpp"
#include "plkg/sac/agent.hpp"

namespace plkg::sac {

// One row of the training log.
struct EpisodeLog {
  std::size_t episode = 0;
  double mean_reward = 0.0;
  double mean_rk = 0.0;
  double mean_rd = 0.0;
  double eavesdrop_frac = 0.0;
  double alpha = 0.0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double alpha_loss = 0.0;
  std::size_t clamp_count = 0;
};

struct TrainingLog {
  std::vector<EpisodeLog> episodes;

  // Mean of a column over the last `window` episodes.
  double tail_mean(double EpisodeLog::*field, std::size_t window) const;
  void write_csv(const std::filesystem::path& path) const;
};

inline constexpr const char* kTrainingLogHeader =
    "episode,mean_reward,mean_rk,mean_rd,eavesdrop_frac,alpha,critic_loss,actor_loss,alpha_loss,"
    "clamp_count";

// Stream ids under one experiment seed. The channel stream is shared by every
// policy so runs with the same seed see the same channel realizations.
enum StreamId : std::uint64_t {
  kChannelStream = 1,
  kPolicyStream = 2,
  kReplayStream = 3,
  kInitStream = 4,
  kUpdateStream = 5,
  kPredictorStream = 6,
};

using EpisodeCallback = std::function<void(const EpisodeLog&)>;

// Interleaves environment steps with SAC updates. The first warmup_steps
// actions are uniform in [-1, 1]; updates begin once the buffer holds
// max(warmup_steps, batch_size) transitions.
TrainingLog train(Environment& env, SacAgent& agent, std::uint64_t seed, std::size_t episodes,
                  const EpisodeCallback& on_episode = {});

// Runs a fixed beam policy for the same channel stream as train().
TrainingLog run_baseline(Environment& env, BaselineKind kind, std::uint64_t seed,
                         std::size_t episodes);

// Evaluates the agent's deterministic policy; rewards per slot.
std::vector<double> evaluate_policy(Environment& env, const SacAgent& agent, std::uint64_t seed,
                                    std::size_t episodes);

}  // namespace plkg::sac
