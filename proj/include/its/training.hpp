#pragma once

#include <functional>
#include <string>
#include <vector>

#include "its/network.hpp"

namespace its {

struct TrainConfig {
    double learning_rate = 0.001;
    double anneal_factor = 0.5;
    int anneal_period = 6;  // epochs
    int epochs = 30;
    int batch_size = 64;
    double l2 = 1e-5;
    double keep_prob = 0.7;
    int max_select = 3;
    std::uint64_t seed = 0;
};

void validate(const TrainConfig& config);

/// Negative log-likelihood of the binary labels under the scores, averaged
/// over sentences. Scores are clamped to [1e-12, 1 - 1e-12] first.
Tensor cross_entropy(const Tensor& scores, const std::vector<int>& labels);

/// initial_rate * factor^floor(epoch / period).
double lr_schedule(int epoch, const TrainConfig& config);

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First/second moment accumulators, one pair per parameter tensor in
/// traversal order.
class AdamState {
public:
    AdamState(const ItsParameters& params, AdamConfig config = {});

    long step() const { return step_; }
    const AdamConfig& config() const { return config_; }

private:
    friend void adam_step(ItsParameters&, const std::vector<Array>&, AdamState&, double);
    std::vector<Array> m_;
    std::vector<Array> v_;
    long step_ = 0;
    AdamConfig config_;
};

/// Bias-corrected Adam update applied in place. Gradients must be in
/// traversal order; a NaN gradient aborts naming the parameter.
void adam_step(ItsParameters& params, const std::vector<Array>& grads, AdamState& state,
               double lr);

enum class Ablation { full, no_selective, no_iteration, no_concat };

Ablation parse_ablation(const std::string& name);
std::string ablation_name(Ablation ablation);
/// no_selective turns selective reading off, no_iteration forces K = 1,
/// no_concat labels from the last iteration alone.
ItsConfig apply_ablation(ItsConfig config, Ablation ablation);

struct EpochStats {
    int epoch = 0;
    double lr = 0.0;
    double mean_loss = 0.0;
    double label_accuracy = 0.0;
    double wall_seconds = 0.0;
};

/// CSV with an "epoch,lr,mean_loss,label_accuracy,wall_seconds" header.
std::string metrics_csv(const std::vector<EpochStats>& log);

struct TrainOptions {
    /// When set, writes checkpoint-epoch-N.json per epoch plus checkpoint.json
    /// and metrics.csv.
    std::filesystem::path out_dir;
    bool save_epoch_checkpoints = true;
    /// Continue from a saved checkpoint (picks up config, params, vocab and
    /// epoch counter; the optimizer restarts).
    std::filesystem::path resume_from;
    /// Pretrained embedding file; random initialization when empty.
    std::filesystem::path embeddings_path;
    /// Run the oracle even over documents that already carry labels.
    bool recompute_labels = false;
    std::function<void(const EpochStats&)> on_epoch;
};

struct TrainResult {
    Checkpoint checkpoint;
    std::vector<EpochStats> log;
    std::filesystem::path checkpoint_path;  // empty unless out_dir was set
};

/// Supervised training: oracle labels, batched cross-entropy plus L2 on
/// non-bias parameters, Adam with the annealing schedule, per-epoch
/// checkpoints and metrics. Single-threaded and fully determined by the
/// seed.
TrainResult train(const std::vector<Document>& corpus, ItsConfig its_config,
                  const TrainConfig& train_config, Ablation ablation = Ablation::full,
                  const TrainOptions& options = {});

}  // namespace its
