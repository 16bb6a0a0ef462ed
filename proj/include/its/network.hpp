#pragma once

#include <span>
#include <string>
#include <vector>

#include "its/base.hpp"
#include "its/tensor.hpp"
#include "its/text.hpp"

namespace its {

/// Network hyperparameters. Gate and label MLP widths of 0 resolve to the
/// hidden width.
struct ItsConfig {
    int iterations = 5;
    Index hidden_width = 200;
    Index embedding_width = 100;
    Index gate_hidden_width = 0;
    Index label_hidden_width = 0;
    Index max_words = 70;
    double keep_prob = 0.7;
    bool use_selective_reading = true;
    bool use_concat_labeling = true;
    bool tie_iteration_params = false;

    Index gate_width() const { return gate_hidden_width > 0 ? gate_hidden_width : hidden_width; }
    Index label_width() const {
        return label_hidden_width > 0 ? label_hidden_width : hidden_width;
    }
    /// How many feature vectors per sentence the labeling head consumes.
    Index concat_factor() const { return use_concat_labeling ? iterations : 1; }
    /// How many parameter blocks the iteration stack holds.
    int iteration_blocks() const { return tie_iteration_params ? 1 : iterations; }
};

void validate(const ItsConfig& config);

/// One GRU direction. The update-gate parameters exist in every cell; the
/// selective-reading pass only reads them when selective reading is
/// disabled and the cell degenerates to a standard GRU.
struct GruParams {
    Tensor w_update, u_update, b_update;
    Tensor w_reset, u_reset, b_reset;
    Tensor w_cand, u_cand, b_cand;
};

struct BiGruParams {
    GruParams fwd, bwd;
};

struct SelectiveGateParams {
    Tensor w1, b1, w2, b2;
};

struct IterationParams {
    BiGruParams selective;
    SelectiveGateParams gate;
    GruParams iter_cell;
    BiGruParams decoder;
};

struct LabelHeadParams {
    Tensor w3, b3, w4, b4;
};

struct ItsParameters {
    Tensor embedding;  // V x E
    BiGruParams context;
    Tensor doc_w, doc_b;  // D_0 projection
    std::vector<IterationParams> iterations;
    LabelHeadParams head;

    Index vocab_size() const { return embedding.rows(); }
};

// -- Parameter traversal -------------------------------------------------
//
// The one canonical ordering used for initialization, optimizer state,
// gradient flattening and checkpoints.

template <typename ParamsT, typename Fn>
void for_each_parameter(ParamsT& params, Fn&& fn) {
    const auto gru = [&fn](const std::string& prefix, auto& g) {
        fn(prefix + ".w_update", false, g.w_update);
        fn(prefix + ".u_update", false, g.u_update);
        fn(prefix + ".b_update", true, g.b_update);
        fn(prefix + ".w_reset", false, g.w_reset);
        fn(prefix + ".u_reset", false, g.u_reset);
        fn(prefix + ".b_reset", true, g.b_reset);
        fn(prefix + ".w_cand", false, g.w_cand);
        fn(prefix + ".u_cand", false, g.u_cand);
        fn(prefix + ".b_cand", true, g.b_cand);
    };
    fn("embedding", false, params.embedding);
    gru("context.fwd", params.context.fwd);
    gru("context.bwd", params.context.bwd);
    fn("doc.w", false, params.doc_w);
    fn("doc.b", true, params.doc_b);
    for (std::size_t k = 0; k < params.iterations.size(); ++k) {
        auto& block = params.iterations[k];
        const std::string p = "iter" + std::to_string(k);
        gru(p + ".selective.fwd", block.selective.fwd);
        gru(p + ".selective.bwd", block.selective.bwd);
        fn(p + ".gate.w1", false, block.gate.w1);
        fn(p + ".gate.b1", true, block.gate.b1);
        fn(p + ".gate.w2", false, block.gate.w2);
        fn(p + ".gate.b2", true, block.gate.b2);
        gru(p + ".iter_cell", block.iter_cell);
        gru(p + ".decoder.fwd", block.decoder.fwd);
        gru(p + ".decoder.bwd", block.decoder.bwd);
    }
    fn("head.w3", false, params.head.w3);
    fn("head.b3", true, params.head.b3);
    fn("head.w4", false, params.head.w4);
    fn("head.b4", true, params.head.b4);
}

/// Zero-valued parameters of the right shapes.
ItsParameters make_parameters(const ItsConfig& config, Index vocab_size);

/// Uniform[-0.1, 0.1] weights, zero biases, embedding rows as given.
/// Random draws happen in traversal order, so a fixed seed fixes every
/// weight.
ItsParameters init_parameters(const ItsConfig& config, const EmbeddingMatrix& embedding,
                              RngState& rng);

/// Closed-form total parameter count for a config; the regression test pins
/// the traversal against it.
Index parameter_count(const ItsConfig& config, Index vocab_size);

/// Copies with every tensor registered as a differentiable leaf.
ItsParameters watch_parameters(Tape& tape, const ItsParameters& params);

/// Gradients in traversal order (zeros for untouched parameters).
std::vector<Array> parameter_gradients(const GradientMap& grads, const ItsParameters& taped);

// -- Network operations ------------------------------------------------------

/// Position/dimension weights l with l[j,d] = (1 - j/n_w) - (d/E)(1 - 2j/n_w)
/// for 1-based j, d, returned as an (n_w x E) constant.
Tensor positional_weights(Index n_words, Index embedding_width);

/// Weighted sum of word vectors: sum_j l_j ∘ w_j over an (n_w x E) input.
Tensor positional_encode(const Tensor& word_vectors);

/// u = σ(W⁽ᵘ⁾x + U⁽ᵘ⁾h + b⁽ᵘ⁾); r likewise; h̃ = tanh(W⁽ʰ⁾x + r∘(Uh) + b⁽ʰ⁾);
/// h' = u∘h̃ + (1-u)∘h.
Tensor gru_step(const Tensor& x, const Tensor& h_prev, const GruParams& p);

struct ContextStates {
    std::vector<Tensor> fwd;
    std::vector<Tensor> bwd;
    std::vector<Tensor> combined;  // fwd + bwd, elementwise
};

/// Bidirectional GRU over the sentence vectors, both directions starting
/// from zero states.
ContextStates encode_context(std::span<const Tensor> sentence_vectors, const BiGruParams& p);

/// D_0 = tanh(W · mean_i [fwd_i; bwd_i] + b).
Tensor init_doc_repr(const ContextStates& context, const Tensor& w, const Tensor& b);

/// Per-sentence update gates, softmax-normalized across sentences per
/// hidden dimension.
std::vector<Tensor> selective_gate(std::span<const Tensor> combined, const Tensor& doc_prev,
                                   const SelectiveGateParams& p);

/// Pre-softmax gate logits F_i, one row per sentence; exposed for
/// diagnostics and the recompute invariant.
Tensor selective_gate_logits(std::span<const Tensor> combined, const Tensor& doc_prev,
                             const SelectiveGateParams& p);

struct SelectivePassResult {
    std::vector<Tensor> states;  // per-direction sums
    Tensor final_state;          // fwd state of the last sentence + bwd state of the first
};

/// Bidirectional pass with the gated state update h_i = g_i∘h̃_i +
/// (1-g_i)∘h_{i-1}. With use_selective false the cells run as standard GRUs
/// and the gates argument is ignored.
SelectivePassResult selective_pass(std::span<const Tensor> combined,
                                   std::span<const Tensor> gates, const BiGruParams& p,
                                   bool use_selective = true);

/// D_k from the pass's final state and D_{k-1}.
Tensor iterate_doc(const Tensor& final_state, const Tensor& doc_prev, const GruParams& p);

/// Bidirectional decoder, both directions initialized from D_k; outputs
/// summed per sentence.
std::vector<Tensor> decode_features(std::span<const Tensor> combined, const Tensor& doc_k,
                                    const BiGruParams& p);

/// Extraction probabilities from per-iteration features. With use_concat the
/// head sees [h¹;...;hᴷ] per sentence, otherwise hᴷ alone; a sigmoid maps
/// the affine output into [0, 1].
Tensor label_scores(const std::vector<std::vector<Tensor>>& features_per_iteration,
                    const LabelHeadParams& p, bool use_concat);

struct ForwardOptions {
    bool train_mode = false;
    RngState* dropout_rng = nullptr;  // required when train_mode and keep_prob < 1
    bool keep_internals = false;
};

struct ForwardResult {
    Tensor scores;                  // length n_s, values in [0, 1]
    std::vector<Tensor> doc_reprs;  // D_0 .. D_K
    /// Per-iteration probabilities (K x n_s) from the head applied to each
    /// iteration's features alone; diagnostic only.
    RowMatrix aux_scores;
    std::vector<Index> all_pad_sentences;

    // Populated when keep_internals is set.
    std::vector<Array> combined_states;
    std::vector<RowMatrix> gate_logits;  // per iteration, n_s x n_H

    std::vector<double> probabilities() const;
};

/// Full composition: positional encoding, context Bi-GRU, D_0, K rounds of
/// selective reading / polishing / decoding, and the labeling head. Pass
/// watched parameters to record the computation on their tape.
ForwardResult forward(const TokenGrid& grid, const ItsParameters& params,
                      const ItsConfig& config, const ForwardOptions& options = {});

// -- Checkpointing -------------------------------------------------------------

struct Checkpoint {
    ItsConfig config;
    ItsParameters params;
    std::vector<std::string> vocab_tokens;
    int epoch = 0;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace its
