#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "plkg/channel.hpp"
#include "plkg/nn/dense.hpp"
#include "plkg/nn/lstm.hpp"

namespace plkg {

struct EnvConfig;

struct PredictorConfig {
  std::size_t seq_len = 8;
  std::size_t hidden = 64;
  double lr = 1e-3;
  double w_mse = 1.0;
  double w_bce = 1.0;
  std::size_t pretrain_steps = 50000;
  std::size_t batch_size = 16;
  std::size_t rollout_slots = 20000;
  // Equivalent channels are divided by this before entering the LSTM and the
  // channel head is multiplied by it; set to sqrt(Pa).
  double input_scale = 1.0;

  void validate() const;
};

// Re/Im of Fred's equivalent channels to Alice and Bob for one slot.
using FredFeatures = std::array<double, 4>;

struct RolloutSlot {
  FredFeatures fred;
  cd hae;   // true sqrt(Pa) h_ae^H w_a under the same beams
  int xi;   // 1 while Eve eavesdrops
};

struct Rollout {
  std::vector<RolloutSlot> slots;
};

// Runs the channel under uniformly random beams and logs Fred inputs with
// ground-truth Eve labels.
Rollout collect_rollout(const EnvConfig& env, std::size_t slots, RngStream& channel_rng,
                        RngStream& policy_rng);

void write_rollout_csv(const std::filesystem::path& path, const Rollout& rollout);

struct PredictorSample {
  std::vector<FredFeatures> inputs;  // seq_len slots, oldest first
  double target_re = 0.0;
  double target_im = 0.0;
  int target_xi = 0;
  std::size_t end_slot = 0;
};

struct PredictorDataset {
  std::vector<PredictorSample> train;
  std::vector<PredictorSample> validation;
};

// Sliding windows of length seq_len; labels from the window's last slot.
// Windows are grouped in blocks of seq_len and blocks are assigned to the
// 10% validation split by a seeded shuffle.
PredictorDataset build_dataset(const Rollout& rollout, const PredictorConfig& config,
                               std::uint64_t seed);

struct Prediction {
  cd hae;
  double xi_prob;
};

struct PredictorMetrics {
  double val_mse = 0.0;       // mean over Re/Im components, scaled units
  double val_r2 = 0.0;
  double val_accuracy = 0.0;
  double base_rate_accuracy = 0.0;  // majority-class accuracy on validation
  double final_train_loss = 0.0;
  std::size_t train_size = 0;
  std::size_t val_size = 0;
};

// LSTM over the Fred window followed by a dense head producing
// [Re h_ae, Im h_ae, mode logit].
class Predictor {
 public:
  Predictor(const PredictorConfig& config, RngStream& init_rng);

  std::size_t seq_len() const { return config_.seq_len; }
  const PredictorConfig& config() const { return config_; }

  Prediction predict(std::span<const FredFeatures> window) const;

  // Joint loss over a batch; accumulates parameter gradients.
  double loss_and_grad(std::span<const PredictorSample* const> batch);
  double loss(std::span<const PredictorSample* const> batch) const;

  nn::ParamRefs params();

 private:
  std::vector<nn::Tensor> pack(std::span<const PredictorSample* const> batch) const;

  PredictorConfig config_;
  nn::LstmCell lstm_;
  nn::Dense head_;
};

double binary_cross_entropy(double logit, int label);

PredictorMetrics evaluate_predictor(const Predictor& predictor,
                                    std::span<const PredictorSample> samples);

PredictorMetrics train_predictor(Predictor& predictor, const PredictorDataset& data,
                                 RngStream& rng);

}  // namespace plkg
