#include "its/training.hpp"

#include <chrono>
#include <cmath>

namespace its {

void validate(const TrainConfig& config) {
    if (config.learning_rate <= 0.0) {
        throw std::invalid_argument("TrainConfig: learning rate must be positive");
    }
    if (config.anneal_factor <= 0.0) {
        throw std::invalid_argument("TrainConfig: anneal factor must be positive");
    }
    if (config.anneal_period < 1) {
        throw std::invalid_argument("TrainConfig: anneal period must be >= 1 epochs");
    }
    if (config.epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (config.batch_size < 1) throw std::invalid_argument("TrainConfig: batch size must be >= 1");
    if (config.l2 < 0.0) throw std::invalid_argument("TrainConfig: l2 must be >= 0");
    if (!(config.keep_prob > 0.0 && config.keep_prob <= 1.0)) {
        throw std::invalid_argument("TrainConfig: keep probability must be in (0, 1]");
    }
    if (config.max_select < 1) throw std::invalid_argument("TrainConfig: max_select must be >= 1");
}

Tensor cross_entropy(const Tensor& scores, const std::vector<int>& labels) {
    if (scores.size() != static_cast<Index>(labels.size())) {
        throw std::invalid_argument("cross_entropy: " + std::to_string(scores.size()) +
                                    " scores vs " + std::to_string(labels.size()) + " labels");
    }
    constexpr double kEps = 1e-12;
    std::vector<double> pos(labels.size()), neg(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        pos[i] = static_cast<double>(labels[i]);
        neg[i] = 1.0 - pos[i];
    }
    const Tensor y = clamp(scores, kEps, 1.0 - kEps);
    const Tensor likelihood = add(mul(Tensor::from_vector(std::move(pos)), its::log(y)),
                                  mul(Tensor::from_vector(std::move(neg)),
                                      its::log(one_minus(y))));
    return scale(mean(likelihood), -1.0);
}

double lr_schedule(int epoch, const TrainConfig& config) {
    if (epoch < 0) throw std::invalid_argument("lr_schedule: epoch must be >= 0");
    return config.learning_rate *
           std::pow(config.anneal_factor, static_cast<double>(epoch / config.anneal_period));
}

// -- Adam -------------------------------------------------------------------

AdamState::AdamState(const ItsParameters& params, AdamConfig config) : config_(config) {
    for_each_parameter(const_cast<ItsParameters&>(params),
                       [&](const std::string&, bool, Tensor& t) {
                           m_.push_back(Array::Zero(t.size()));
                           v_.push_back(Array::Zero(t.size()));
                       });
}

void adam_step(ItsParameters& params, const std::vector<Array>& grads, AdamState& state,
               double lr) {
    if (lr <= 0.0) throw std::invalid_argument("adam_step: lr must be positive");
    std::size_t count = 0;
    for_each_parameter(params, [&](const std::string&, bool, Tensor&) { ++count; });
    if (grads.size() != count || state.m_.size() != count) {
        throw std::invalid_argument("adam_step: gradient/state size mismatch");
    }

    state.step_ += 1;
    const AdamConfig& cfg = state.config_;
    const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step_));
    const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step_));

    std::size_t slot = 0;
    for_each_parameter(params, [&](const std::string& name, bool, Tensor& t) {
        const Array& g = grads[slot];
        if (g.size() != t.size()) {
            throw std::invalid_argument("adam_step: gradient shape mismatch for " + name);
        }
        if (!g.isFinite().all()) {
            throw NumericError("NaN gradient for parameter " + name);
        }
        Array& m = state.m_[slot];
        Array& v = state.v_[slot];
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.square();
        const Array m_hat = m / bias1;
        const Array v_hat = v / bias2;
        Array updated = t.array() - lr * m_hat / (v_hat.sqrt() + cfg.epsilon);
        t = Tensor(t.shape(), std::move(updated));
        ++slot;
    });
}

// -- Ablations -----------------------------------------------------------------

Ablation parse_ablation(const std::string& name) {
    if (name == "full") return Ablation::full;
    if (name == "no_selective") return Ablation::no_selective;
    if (name == "no_iteration") return Ablation::no_iteration;
    if (name == "no_concat") return Ablation::no_concat;
    throw DataError("unknown ablation: " + name +
                    " (want full, no_selective, no_iteration or no_concat)");
}

std::string ablation_name(Ablation ablation) {
    switch (ablation) {
        case Ablation::full: return "full";
        case Ablation::no_selective: return "no_selective";
        case Ablation::no_iteration: return "no_iteration";
        case Ablation::no_concat: return "no_concat";
    }
    return "full";
}

ItsConfig apply_ablation(ItsConfig config, Ablation ablation) {
    switch (ablation) {
        case Ablation::full: break;
        case Ablation::no_selective: config.use_selective_reading = false; break;
        case Ablation::no_iteration: config.iterations = 1; break;
        case Ablation::no_concat: config.use_concat_labeling = false; break;
    }
    return config;
}

// -- Metrics ---------------------------------------------------------------------

std::string metrics_csv(const std::vector<EpochStats>& log) {
    std::string out = "epoch,lr,mean_loss,label_accuracy,wall_seconds\n";
    for (const EpochStats& row : log) {
        out += std::to_string(row.epoch);
        out += ',';
        out += format_double(row.lr);
        out += ',';
        out += format_double(row.mean_loss);
        out += ',';
        out += format_double(row.label_accuracy);
        out += ',';
        out += format_double(row.wall_seconds);
        out += '\n';
    }
    return out;
}

// -- Training loop -----------------------------------------------------------------

namespace {

struct PreparedDoc {
    TokenGrid grid;
    std::vector<int> labels;
};

}  // namespace

TrainResult train(const std::vector<Document>& corpus, ItsConfig its_config,
                  const TrainConfig& train_config, Ablation ablation,
                  const TrainOptions& options) {
    if (corpus.empty()) throw DataError("train: empty corpus");
    validate(train_config);
    its_config = apply_ablation(its_config, ablation);
    its_config.keep_prob = train_config.keep_prob;
    validate(its_config);

    RngState rng(train_config.seed);
    RngState embedding_rng = rng.fork(1);
    RngState init_rng = rng.fork(2);
    RngState dropout_rng = rng.fork(3);

    // Model state: fresh init or resumed checkpoint.
    Checkpoint model;
    int start_epoch = 0;
    if (!options.resume_from.empty()) {
        model = load_checkpoint(options.resume_from);
        its_config = model.config;
        start_epoch = model.epoch;
        if (start_epoch >= train_config.epochs) {
            throw DataError("resume: checkpoint already at epoch " + std::to_string(start_epoch));
        }
    } else {
        const Vocabulary vocab = Vocabulary::build(corpus);
        const EmbeddingMatrix embedding =
            options.embeddings_path.empty()
                ? random_embeddings(vocab, its_config.embedding_width, embedding_rng)
                : load_embeddings(options.embeddings_path, vocab, its_config.embedding_width,
                                  embedding_rng);
        model.config = its_config;
        model.params = init_parameters(its_config, embedding, init_rng);
        model.vocab_tokens = vocab.tokens();
    }
    const Vocabulary vocab = Vocabulary::from_tokens(model.vocab_tokens);

    // Labels once per corpus; oracle only where needed.
    std::vector<PreparedDoc> prepared;
    prepared.reserve(corpus.size());
    for (const Document& doc : corpus) {
        PreparedDoc p;
        p.grid = tokenize_and_pad(doc, vocab, its_config.max_words);
        if (doc.has_labels() && !options.recompute_labels) {
            p.labels = doc.labels;
        } else {
            p.labels = greedy_oracle_labels(doc, train_config.max_select);
        }
        prepared.push_back(std::move(p));
    }

    TrainResult result;
    result.checkpoint = std::move(model);
    AdamState optimizer(result.checkpoint.params);

    const auto write_checkpoint = [&](const std::string& name) {
        if (options.out_dir.empty()) return std::filesystem::path{};
        const std::filesystem::path path = options.out_dir / name;
        save_checkpoint(path, result.checkpoint);
        return path;
    };

    for (int epoch = start_epoch; epoch < train_config.epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        const double lr = lr_schedule(epoch, train_config);

        double loss_sum = 0.0;
        std::size_t batches = 0;
        std::size_t correct = 0;
        std::size_t total_sentences = 0;

        for (std::size_t begin = 0; begin < prepared.size(); begin += train_config.batch_size) {
            const std::size_t end =
                std::min(prepared.size(), begin + static_cast<std::size_t>(train_config.batch_size));

            Tape tape;
            const ItsParameters taped = watch_parameters(tape, result.checkpoint.params);
            std::vector<Tensor> doc_losses;
            doc_losses.reserve(end - begin);
            for (std::size_t d = begin; d < end; ++d) {
                const ForwardResult out =
                    forward(prepared[d].grid, taped, its_config,
                            {.train_mode = true, .dropout_rng = &dropout_rng});
                doc_losses.push_back(cross_entropy(out.scores, prepared[d].labels));
                for (Index i = 0; i < out.scores.size(); ++i) {
                    const int predicted = out.scores(i) >= 0.5 ? 1 : 0;
                    correct += predicted == prepared[d].labels[static_cast<std::size_t>(i)];
                    ++total_sentences;
                }
            }

            Tensor loss = mean(concat(doc_losses));
            if (train_config.l2 > 0.0) {
                Tensor penalty;
                bool first = true;
                for_each_parameter(
                    const_cast<ItsParameters&>(taped),
                    [&](const std::string&, bool is_bias, Tensor& t) {
                        if (is_bias) return;
                        penalty = first ? sum_squares(t) : add(penalty, sum_squares(t));
                        first = false;
                    });
                loss = add(loss, scale(penalty, train_config.l2));
            }

            const double loss_value = loss.value();
            if (!std::isfinite(loss_value)) {
                throw NumericError("train: loss diverged (not finite) at epoch " +
                                   std::to_string(epoch) + ", batch " + std::to_string(batches));
            }
            loss_sum += loss_value;
            ++batches;

            const GradientMap grad_map = tape.backward(loss);
            const std::vector<Array> grads = parameter_gradients(grad_map, taped);
            adam_step(result.checkpoint.params, grads, optimizer, lr);
        }

        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
        EpochStats stats;
        stats.epoch = epoch;
        stats.lr = lr;
        stats.mean_loss = loss_sum / static_cast<double>(batches);
        stats.label_accuracy =
            static_cast<double>(correct) / static_cast<double>(total_sentences);
        stats.wall_seconds = elapsed.count();
        result.log.push_back(stats);
        if (options.on_epoch) options.on_epoch(stats);

        result.checkpoint.epoch = epoch + 1;
        if (options.save_epoch_checkpoints) {
            write_checkpoint("checkpoint-epoch-" + std::to_string(epoch + 1) + ".json");
        }
    }

    result.checkpoint_path = write_checkpoint("checkpoint.json");
    if (!options.out_dir.empty()) {
        atomic_write(options.out_dir / "metrics.csv", metrics_csv(result.log));
    }
    return result;
}

}  // namespace its
