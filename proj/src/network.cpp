#include "its/network.hpp"

#include <cmath>

namespace its {

void validate(const ItsConfig& config) {
    if (config.iterations < 1) throw std::invalid_argument("ItsConfig: iterations must be >= 1");
    if (config.hidden_width < 1 || config.embedding_width < 1 || config.gate_width() < 1 ||
        config.label_width() < 1) {
        throw std::invalid_argument("ItsConfig: widths must be >= 1");
    }
    if (config.max_words < 1) throw std::invalid_argument("ItsConfig: max_words must be >= 1");
    if (!(config.keep_prob > 0.0 && config.keep_prob <= 1.0)) {
        throw std::invalid_argument("ItsConfig: keep probability must be in (0, 1]");
    }
}

// -- Parameter construction ------------------------------------------------

namespace {

GruParams make_gru(Index input_width, Index hidden_width) {
    GruParams g;
    g.w_update = Tensor::zeros({hidden_width, input_width});
    g.u_update = Tensor::zeros({hidden_width, hidden_width});
    g.b_update = Tensor::zeros({hidden_width});
    g.w_reset = Tensor::zeros({hidden_width, input_width});
    g.u_reset = Tensor::zeros({hidden_width, hidden_width});
    g.b_reset = Tensor::zeros({hidden_width});
    g.w_cand = Tensor::zeros({hidden_width, input_width});
    g.u_cand = Tensor::zeros({hidden_width, hidden_width});
    g.b_cand = Tensor::zeros({hidden_width});
    return g;
}

}  // namespace

ItsParameters make_parameters(const ItsConfig& config, Index vocab_size) {
    validate(config);
    if (vocab_size < 1) throw std::invalid_argument("make_parameters: vocab_size must be >= 1");
    const Index h = config.hidden_width;
    const Index e = config.embedding_width;
    const Index f = config.gate_width();
    const Index m = config.label_width();

    ItsParameters p;
    p.embedding = Tensor::zeros({vocab_size, e});
    p.context = {make_gru(e, h), make_gru(e, h)};
    p.doc_w = Tensor::zeros({h, 2 * h});
    p.doc_b = Tensor::zeros({h});
    p.iterations.resize(static_cast<std::size_t>(config.iteration_blocks()));
    for (IterationParams& block : p.iterations) {
        block.selective = {make_gru(h, h), make_gru(h, h)};
        block.gate.w1 = Tensor::zeros({f, 3 * h});
        block.gate.b1 = Tensor::zeros({f});
        block.gate.w2 = Tensor::zeros({h, f});
        block.gate.b2 = Tensor::zeros({h});
        block.iter_cell = make_gru(h, h);
        block.decoder = {make_gru(h, h), make_gru(h, h)};
    }
    p.head.w3 = Tensor::zeros({m, config.concat_factor() * h});
    p.head.b3 = Tensor::zeros({m});
    p.head.w4 = Tensor::zeros({1, m});
    p.head.b4 = Tensor::zeros({1});
    return p;
}

ItsParameters init_parameters(const ItsConfig& config, const EmbeddingMatrix& embedding,
                              RngState& rng) {
    if (embedding.cols() != config.embedding_width) {
        throw std::invalid_argument("init_parameters: embedding width " +
                                    std::to_string(embedding.cols()) + " does not match config " +
                                    std::to_string(config.embedding_width));
    }
    ItsParameters p = make_parameters(config, embedding.rows());
    p.embedding = Tensor::from_matrix(embedding);
    for_each_parameter(p, [&](const std::string& name, bool is_bias, Tensor& t) {
        if (is_bias || name == "embedding") return;
        // Fan-in-scaled uniform init keeps per-sentence signal alive at
        // small widths; at hidden width 200 the bound is ~0.12.
        const double bound = std::sqrt(3.0 / static_cast<double>(t.cols()));
        t = Tensor::uniform(t.shape(), -bound, bound, rng);
    });
    return p;
}

Index parameter_count(const ItsConfig& config, Index vocab_size) {
    const Index h = config.hidden_width;
    const Index e = config.embedding_width;
    const Index f = config.gate_width();
    const Index m = config.label_width();
    const auto gru = [h](Index in) { return 3 * (h * in + h * h + h); };

    Index total = vocab_size * e;            // embedding
    total += 2 * gru(e);                     // context Bi-GRU
    total += 2 * h * h + h;                  // D_0 projection
    const Index per_block = 2 * gru(h)       // selective cells
                            + (3 * h * f + f + h * f + h)  // gate MLP
                            + gru(h)         // iterative unit
                            + 2 * gru(h);    // decoder
    total += config.iteration_blocks() * per_block;
    total += m * config.concat_factor() * h + m + m + 1;  // labeling head
    return total;
}

ItsParameters watch_parameters(Tape& tape, const ItsParameters& params) {
    ItsParameters taped = params;
    for_each_parameter(taped, [&](const std::string&, bool, Tensor& t) { t = tape.watch(t); });
    return taped;
}

std::vector<Array> parameter_gradients(const GradientMap& grads, const ItsParameters& taped) {
    std::vector<Array> out;
    for_each_parameter(const_cast<ItsParameters&>(taped),
                       [&](const std::string&, bool, Tensor& t) {
                           out.push_back(grads.at(t).array());
                       });
    return out;
}

// -- Network operations ------------------------------------------------------

Tensor positional_weights(Index n_words, Index embedding_width) {
    if (n_words < 1 || embedding_width < 1) {
        throw std::invalid_argument("positional_weights: extents must be positive");
    }
    Array values(n_words * embedding_width);
    const double nw = static_cast<double>(n_words);
    const double ew = static_cast<double>(embedding_width);
    for (Index j = 1; j <= n_words; ++j) {
        for (Index d = 1; d <= embedding_width; ++d) {
            const double jj = static_cast<double>(j);
            const double dd = static_cast<double>(d);
            values[(j - 1) * embedding_width + (d - 1)] =
                (1.0 - jj / nw) - (dd / ew) * (1.0 - 2.0 * jj / nw);
        }
    }
    return Tensor({n_words, embedding_width}, std::move(values));
}

Tensor positional_encode(const Tensor& word_vectors) {
    if (word_vectors.rank() != 2) {
        throw std::invalid_argument("positional_encode: expected n_w x E matrix, got " +
                                    shape_str(word_vectors.shape()));
    }
    const Index n_w = word_vectors.rows();
    const Tensor weights = positional_weights(n_w, word_vectors.cols());
    // Sum over words = mean over rows scaled back by n_w.
    return scale(mean(mul(weights, word_vectors), 0), static_cast<double>(n_w));
}

Tensor gru_step(const Tensor& x, const Tensor& h_prev, const GruParams& p) {
    const Tensor u = sigmoid(add(add(matmul(p.w_update, x), matmul(p.u_update, h_prev)),
                                 p.b_update));
    const Tensor r = sigmoid(add(add(matmul(p.w_reset, x), matmul(p.u_reset, h_prev)),
                                 p.b_reset));
    const Tensor cand =
        its::tanh(add(add(matmul(p.w_cand, x), mul(r, matmul(p.u_cand, h_prev))), p.b_cand));
    return add(mul(u, cand), mul(one_minus(u), h_prev));
}

namespace {

/// One recurrent step with the externally supplied update gate.
Tensor gated_step(const Tensor& x, const Tensor& h_prev, const Tensor& gate,
                  const GruParams& p) {
    const Tensor r = sigmoid(add(add(matmul(p.w_reset, x), matmul(p.u_reset, h_prev)),
                                 p.b_reset));
    const Tensor cand =
        its::tanh(add(add(matmul(p.w_cand, x), mul(r, matmul(p.u_cand, h_prev))), p.b_cand));
    return add(mul(gate, cand), mul(one_minus(gate), h_prev));
}

}  // namespace

ContextStates encode_context(std::span<const Tensor> sentence_vectors, const BiGruParams& p) {
    if (sentence_vectors.empty()) throw std::invalid_argument("encode_context: no sentences");
    const Index n = static_cast<Index>(sentence_vectors.size());
    const Index h = p.fwd.u_update.rows();

    ContextStates out;
    out.fwd.resize(static_cast<std::size_t>(n));
    out.bwd.resize(static_cast<std::size_t>(n));
    out.combined.resize(static_cast<std::size_t>(n));

    Tensor state = Tensor::zeros({h});
    for (Index i = 0; i < n; ++i) {
        state = gru_step(sentence_vectors[static_cast<std::size_t>(i)], state, p.fwd);
        out.fwd[static_cast<std::size_t>(i)] = state;
    }
    state = Tensor::zeros({h});
    for (Index i = n - 1; i >= 0; --i) {
        state = gru_step(sentence_vectors[static_cast<std::size_t>(i)], state, p.bwd);
        out.bwd[static_cast<std::size_t>(i)] = state;
    }
    for (Index i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        out.combined[idx] = add(out.fwd[idx], out.bwd[idx]);
    }
    return out;
}

Tensor init_doc_repr(const ContextStates& context, const Tensor& w, const Tensor& b) {
    if (context.fwd.empty()) throw std::invalid_argument("init_doc_repr: no sentences");
    std::vector<Tensor> joined;
    joined.reserve(context.fwd.size());
    for (std::size_t i = 0; i < context.fwd.size(); ++i) {
        const Tensor parts[] = {context.fwd[i], context.bwd[i]};
        joined.push_back(concat(parts));
    }
    const Tensor pooled = mean(stack_rows(joined), 0);
    return its::tanh(affine(w, pooled, b));
}

Tensor selective_gate_logits(std::span<const Tensor> combined, const Tensor& doc_prev,
                             const SelectiveGateParams& p) {
    if (combined.empty()) throw std::invalid_argument("selective_gate: no sentences");
    std::vector<Tensor> logits;
    logits.reserve(combined.size());
    for (const Tensor& s : combined) {
        const Tensor parts[] = {mul(s, doc_prev), s, doc_prev};
        const Tensor features = concat(parts);
        logits.push_back(add(matmul(p.w2, its::tanh(affine(p.w1, features, p.b1))), p.b2));
    }
    return stack_rows(logits);
}

std::vector<Tensor> selective_gate(std::span<const Tensor> combined, const Tensor& doc_prev,
                                   const SelectiveGateParams& p) {
    const Tensor logits = selective_gate_logits(combined, doc_prev, p);
    // Normalize across sentences for each hidden dimension.
    const Tensor gates = softmax(logits, 0);
    std::vector<Tensor> out;
    out.reserve(combined.size());
    for (Index i = 0; i < static_cast<Index>(combined.size()); ++i) {
        out.push_back(take_row(gates, i));
    }
    return out;
}

SelectivePassResult selective_pass(std::span<const Tensor> combined,
                                   std::span<const Tensor> gates, const BiGruParams& p,
                                   bool use_selective) {
    if (combined.empty()) throw std::invalid_argument("selective_pass: no sentences");
    if (use_selective && gates.size() != combined.size()) {
        throw std::invalid_argument("selective_pass: gate count " + std::to_string(gates.size()) +
                                    " does not match sentence count " +
                                    std::to_string(combined.size()));
    }
    const Index n = static_cast<Index>(combined.size());
    const Index h = p.fwd.u_reset.rows();

    std::vector<Tensor> fwd(static_cast<std::size_t>(n)), bwd(static_cast<std::size_t>(n));
    Tensor state = Tensor::zeros({h});
    for (Index i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        state = use_selective ? gated_step(combined[idx], state, gates[idx], p.fwd)
                              : gru_step(combined[idx], state, p.fwd);
        fwd[idx] = state;
    }
    state = Tensor::zeros({h});
    for (Index i = n - 1; i >= 0; --i) {
        const auto idx = static_cast<std::size_t>(i);
        state = use_selective ? gated_step(combined[idx], state, gates[idx], p.bwd)
                              : gru_step(combined[idx], state, p.bwd);
        bwd[idx] = state;
    }

    SelectivePassResult result;
    result.states.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        result.states[idx] = add(fwd[idx], bwd[idx]);
    }
    // Each direction's last computed state: the forward sweep ends on the
    // last sentence, the backward sweep on the first.
    result.final_state = add(fwd[static_cast<std::size_t>(n - 1)], bwd[0]);
    return result;
}

Tensor iterate_doc(const Tensor& final_state, const Tensor& doc_prev, const GruParams& p) {
    return gru_step(final_state, doc_prev, p);
}

std::vector<Tensor> decode_features(std::span<const Tensor> combined, const Tensor& doc_k,
                                    const BiGruParams& p) {
    if (combined.empty()) throw std::invalid_argument("decode_features: no sentences");
    const Index n = static_cast<Index>(combined.size());

    std::vector<Tensor> fwd(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
    Tensor state = doc_k;
    for (Index i = 0; i < n; ++i) {
        state = gru_step(combined[static_cast<std::size_t>(i)], state, p.fwd);
        fwd[static_cast<std::size_t>(i)] = state;
    }
    state = doc_k;
    for (Index i = n - 1; i >= 0; --i) {
        const auto idx = static_cast<std::size_t>(i);
        state = gru_step(combined[idx], state, p.bwd);
        out[idx] = add(fwd[idx], state);
    }
    return out;
}

Tensor label_scores(const std::vector<std::vector<Tensor>>& features_per_iteration,
                    const LabelHeadParams& p, bool use_concat) {
    if (features_per_iteration.empty()) {
        throw std::invalid_argument("label_scores: no iteration features");
    }
    const std::size_t n = features_per_iteration.front().size();
    for (const auto& feats : features_per_iteration) {
        if (feats.size() != n) {
            throw std::invalid_argument("label_scores: iterations disagree on sentence count");
        }
    }

    std::vector<Tensor> per_sentence;
    per_sentence.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Tensor z;
        if (use_concat) {
            std::vector<Tensor> parts;
            parts.reserve(features_per_iteration.size());
            for (const auto& feats : features_per_iteration) parts.push_back(feats[i]);
            z = concat(parts);
        } else {
            z = features_per_iteration.back()[i];
        }
        const Tensor logit = add(matmul(p.w4, its::tanh(affine(p.w3, z, p.b3))), p.b4);
        per_sentence.push_back(sigmoid(logit));
    }
    return concat(per_sentence);
}

// -- Full forward ---------------------------------------------------------

namespace {

/// Head applied to a single iteration's feature vector using that
/// iteration's column block of w3. Plain value math, never taped.
double aux_probability(const LabelHeadParams& head, const Tensor& feature, Index block,
                       Index hidden_width) {
    const auto w3 = head.w3.matrix();
    const Index offset = std::min(block * hidden_width, w3.cols() - hidden_width);
    const Eigen::VectorXd feat = Eigen::Map<const Eigen::VectorXd>(feature.array().data(),
                                                                   feature.size());
    const Eigen::VectorXd hidden =
        (w3.middleCols(offset, hidden_width) * feat +
         Eigen::Map<const Eigen::VectorXd>(head.b3.array().data(), head.b3.size()))
            .array()
            .tanh();
    const double logit = (head.w4.matrix() * hidden)(0, 0) + head.b4(0);
    return 1.0 / (1.0 + std::exp(-logit));
}

Tensor maybe_dropout(const Tensor& t, const ItsConfig& config, const ForwardOptions& options) {
    if (!options.train_mode || config.keep_prob >= 1.0) return t;
    if (options.dropout_rng == nullptr) {
        throw std::invalid_argument("forward: train_mode with dropout needs an rng");
    }
    return dropout(t, config.keep_prob,
                   dropout_mask(t.shape(), config.keep_prob, *options.dropout_rng));
}

}  // namespace

ForwardResult forward(const TokenGrid& grid, const ItsParameters& params,
                      const ItsConfig& config, const ForwardOptions& options) {
    validate(config);
    const Index n_s = grid.sentence_count();
    if (n_s < 1) throw std::invalid_argument("forward: document has no sentences");
    if (static_cast<Index>(grid.lengths.size()) != n_s) {
        throw std::invalid_argument("forward: grid lengths do not match rows");
    }

    ForwardResult result;

    // Sentence vectors via positional encoding over the non-pad prefix.
    std::vector<Tensor> sentence_vectors;
    sentence_vectors.reserve(static_cast<std::size_t>(n_s));
    for (Index i = 0; i < n_s; ++i) {
        const Index n_w = grid.lengths[static_cast<std::size_t>(i)];
        if (n_w == 0) {
            result.all_pad_sentences.push_back(i);
            sentence_vectors.push_back(Tensor::zeros({config.embedding_width}));
            continue;
        }
        std::vector<Index> ids(static_cast<std::size_t>(n_w));
        for (Index j = 0; j < n_w; ++j) ids[static_cast<std::size_t>(j)] = grid.ids(i, j);
        const Tensor rows = take_rows(params.embedding, ids);
        sentence_vectors.push_back(maybe_dropout(positional_encode(rows), config, options));
    }

    // Context encoding, shared across iterations.
    ContextStates context = encode_context(sentence_vectors, params.context);
    for (Tensor& s : context.combined) s = maybe_dropout(s, config, options);
    if (options.keep_internals) {
        for (const Tensor& s : context.combined) result.combined_states.push_back(s.array());
    }

    result.doc_reprs.push_back(init_doc_repr(context, params.doc_w, params.doc_b));

    std::vector<std::vector<Tensor>> features_per_iteration;
    features_per_iteration.reserve(static_cast<std::size_t>(config.iterations));
    for (int k = 0; k < config.iterations; ++k) {
        const IterationParams& block =
            params.iterations[config.tie_iteration_params ? 0 : static_cast<std::size_t>(k)];
        const Tensor& doc_prev = result.doc_reprs.back();

        std::vector<Tensor> gates;
        if (config.use_selective_reading) {
            gates = selective_gate(context.combined, doc_prev, block.gate);
            if (options.keep_internals) {
                const Tensor logits =
                    selective_gate_logits(context.combined, doc_prev, block.gate);
                result.gate_logits.push_back(
                    ConstMatrixMap(logits.array().data(), n_s, config.hidden_width));
            }
        }
        const SelectivePassResult pass = selective_pass(context.combined, gates, block.selective,
                                                        config.use_selective_reading);
        result.doc_reprs.push_back(iterate_doc(pass.final_state, doc_prev, block.iter_cell));

        std::vector<Tensor> features =
            decode_features(context.combined, result.doc_reprs.back(), block.decoder);
        for (Tensor& f : features) f = maybe_dropout(f, config, options);
        features_per_iteration.push_back(std::move(features));
    }

    result.scores = label_scores(features_per_iteration, params.head, config.use_concat_labeling);

    result.aux_scores.resize(config.iterations, n_s);
    for (int k = 0; k < config.iterations; ++k) {
        for (Index i = 0; i < n_s; ++i) {
            result.aux_scores(k, i) = aux_probability(
                params.head, features_per_iteration[static_cast<std::size_t>(k)]
                                 [static_cast<std::size_t>(i)],
                config.use_concat_labeling ? k : 0, config.hidden_width);
        }
    }
    return result;
}

std::vector<double> ForwardResult::probabilities() const {
    std::vector<double> out(static_cast<std::size_t>(scores.size()));
    for (Index i = 0; i < scores.size(); ++i) out[static_cast<std::size_t>(i)] = scores(i);
    return out;
}

}  // namespace its
