// Command-line harness: training, evaluation, summarization, oracle
// labeling, baselines, iteration sweeps and heatmap dumps.

#include <algorithm>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "its/harness.hpp"
#include "its/network.hpp"
#include "its/rouge.hpp"
#include "its/synth.hpp"
#include "its/text.hpp"
#include "its/training.hpp"

namespace {

using namespace its;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct ModelFlags {
    ItsConfig config;
    void attach(CLI::App& cmd) {
        cmd.add_option("--iterations", config.iterations, "iteration count K");
        cmd.add_option("--hidden", config.hidden_width, "hidden width");
        cmd.add_option("--embedding-dim", config.embedding_width, "embedding width");
        cmd.add_option("--gate-width", config.gate_hidden_width, "gate MLP width (0 = hidden)");
        cmd.add_option("--label-width", config.label_hidden_width, "label MLP width (0 = hidden)");
        cmd.add_option("--max-words", config.max_words, "words per sentence after pad/cut");
        cmd.add_flag("--tie-iterations", config.tie_iteration_params,
                     "share parameters across iterations");
    }
};

struct TrainFlags {
    TrainConfig config;
    std::string ablation = "full";
    std::string embeddings;
    std::string resume;
    bool recompute_labels = false;
    void attach(CLI::App& cmd) {
        cmd.add_option("--epochs", config.epochs, "training epochs");
        cmd.add_option("--batch-size", config.batch_size, "documents per batch");
        cmd.add_option("--lr", config.learning_rate, "initial learning rate");
        cmd.add_option("--anneal-factor", config.anneal_factor, "learning rate anneal factor");
        cmd.add_option("--anneal-period", config.anneal_period, "epochs between anneals");
        cmd.add_option("--l2", config.l2, "L2 coefficient on non-bias parameters");
        cmd.add_option("--keep-prob", config.keep_prob, "dropout keep probability");
        cmd.add_option("--max-select", config.max_select, "oracle summary size");
        cmd.add_option("--seed", config.seed, "random seed");
        cmd.add_option("--ablation", ablation,
                       "full, no_selective, no_iteration or no_concat");
        cmd.add_option("--embeddings", embeddings, "pretrained embedding file");
        cmd.add_option("--resume", resume, "checkpoint to resume from");
        cmd.add_flag("--recompute-labels", recompute_labels,
                     "rerun the oracle even when labels are present");
    }
};

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
    } else {
        atomic_write(out_path, content);
    }
}

// -- Commands ------------------------------------------------------------

int cmd_train(const std::string& corpus_path, const std::string& out_dir, ModelFlags& model,
              TrainFlags& flags) {
    const std::vector<Document> corpus = read_corpus(corpus_path);
    TrainOptions options;
    options.out_dir = out_dir;
    options.embeddings_path = flags.embeddings;
    options.resume_from = flags.resume;
    options.recompute_labels = flags.recompute_labels;
    options.on_epoch = [](const EpochStats& stats) {
        std::cout << "epoch " << stats.epoch << " lr " << format_double(stats.lr) << " loss "
                  << format_double(stats.mean_loss) << " accuracy "
                  << format_double(stats.label_accuracy) << '\n';
    };
    const TrainResult result = train(corpus, model.config, flags.config,
                                     parse_ablation(flags.ablation), options);
    std::cout << "checkpoint: " << result.checkpoint_path.string() << '\n';
    return kExitOk;
}

int cmd_evaluate(const std::string& corpus_path, const std::string& checkpoint_path,
                 const std::string& baseline, const std::string& policy_text,
                 const std::string& out_dir, bool document_order) {
    const std::vector<Document> corpus = read_corpus(corpus_path);
    const TruncationPolicy policy = TruncationPolicy::parse(policy_text);

    std::vector<std::vector<Index>> selections;
    std::string system;
    if (!baseline.empty()) {
        if (baseline != "lead3") throw DataError("unknown baseline: " + baseline);
        selections = lead3_selections(corpus);
        system = "lead3";
    } else {
        if (checkpoint_path.empty()) {
            throw std::invalid_argument("evaluate needs --checkpoint or --baseline");
        }
        selections = model_selections(load_checkpoint(checkpoint_path), corpus, document_order);
        system = "its";
    }

    const RougeReport report = score_selections(corpus, selections, policy);
    std::cout << system << " @ " << policy.str() << '\n' << report.table();
    if (!out_dir.empty()) {
        atomic_write(std::filesystem::path(out_dir) / "rouge.json", report.json() + "\n");
        atomic_write(std::filesystem::path(out_dir) / "rouge.txt",
                     system + " @ " + policy.str() + "\n" + report.table());
    }
    return kExitOk;
}

int cmd_summarize(const std::string& corpus_path, const std::string& checkpoint_path,
                  const std::string& out_path, bool document_order) {
    const std::vector<Document> corpus = read_corpus(corpus_path);
    const Checkpoint model = load_checkpoint(checkpoint_path);
    const std::vector<std::vector<Index>> selections =
        model_selections(model, corpus, document_order);
    std::string out;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        out += selection_json(corpus[d], selections[d]);
        out += '\n';
    }
    emit(out_path, out);
    return kExitOk;
}

int cmd_lead3(const std::string& corpus_path, const std::string& out_path) {
    const std::vector<Document> corpus = read_corpus(corpus_path);
    const std::vector<std::vector<Index>> selections = lead3_selections(corpus);
    std::string out;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        out += selection_json(corpus[d], selections[d]);
        out += '\n';
    }
    emit(out_path, out);
    return kExitOk;
}

int cmd_label_oracle(const std::string& corpus_path, const std::string& out_path,
                     int max_select) {
    std::vector<Document> corpus = read_corpus(corpus_path);
    std::size_t skipped = 0;
    for (Document& doc : corpus) {
        if (!doc.has_highlights()) {
            std::cerr << "warning: no highlights for document " << doc.id << ", skipped\n";
            ++skipped;
            continue;
        }
        doc.labels = greedy_oracle_labels(doc, max_select);
    }
    if (skipped > 0) {
        std::cerr << "warning: skipped " << skipped << " document(s) without highlights\n";
    }
    write_corpus(out_path, corpus);
    return kExitOk;
}

int cmd_heatmap(const std::string& corpus_path, const std::string& checkpoint_path,
                const std::string& out_path, Index index) {
    const Checkpoint model = load_checkpoint(checkpoint_path);
    if (model.config.iterations < 2) {
        throw DataError("heatmap needs a checkpoint with at least 2 iterations");
    }
    const std::vector<Document> corpus = read_corpus(corpus_path);
    if (index < 0 || index >= static_cast<Index>(corpus.size())) {
        throw DataError("document index " + std::to_string(index) + " out of range (corpus has " +
                        std::to_string(corpus.size()) + " documents)");
    }
    const Vocabulary vocab = Vocabulary::from_tokens(model.vocab_tokens);
    const TokenGrid grid =
        tokenize_and_pad(corpus[static_cast<std::size_t>(index)], vocab, model.config.max_words);
    const ForwardResult result = forward(grid, model.params, model.config);

    std::string csv;
    for (Index k = 0; k < result.aux_scores.rows(); ++k) {
        for (Index i = 0; i < result.aux_scores.cols(); ++i) {
            if (i > 0) csv += ',';
            csv += format_double(result.aux_scores(k, i));
        }
        csv += '\n';
    }
    emit(out_path, csv);
    return kExitOk;
}

int cmd_sweep(const std::string& corpus_path, const std::string& eval_corpus_path,
              const std::string& out_path, int k_min, int k_max, ModelFlags& model,
              TrainFlags& flags, const std::string& policy_text) {
    if (k_min < 1 || k_max > 8 || k_min > k_max) {
        throw std::invalid_argument("sweep range must satisfy 1 <= k-min <= k-max <= 8");
    }
    const std::vector<Document> train_corpus = read_corpus(corpus_path);
    const std::vector<Document> eval_corpus =
        eval_corpus_path.empty() ? train_corpus : read_corpus(eval_corpus_path);
    const TruncationPolicy policy = TruncationPolicy::parse(policy_text);

    // Same epochs and seed for every K, per the fairness protocol.
    std::string csv = "iterations,epochs,rouge1_recall,rouge2_recall,rougeL_recall\n";
    for (int k = k_min; k <= k_max; ++k) {
        ItsConfig config = model.config;
        config.iterations = k;
        const TrainResult result =
            train(train_corpus, config, flags.config, parse_ablation(flags.ablation));
        const RougeReport report = score_selections(
            eval_corpus, model_selections(result.checkpoint, eval_corpus, false), policy);
        csv += std::to_string(k) + ',' + std::to_string(flags.config.epochs) + ',' +
               format_double(report.rouge1.recall) + ',' + format_double(report.rouge2.recall) +
               ',' + format_double(report.rougeL.recall) + '\n';
        std::cout << "K=" << k << " rouge1 recall " << format_double(report.rouge1.recall)
                  << '\n';
    }
    atomic_write(out_path, csv);
    return kExitOk;
}

int cmd_gen_synth(const std::string& out_path, const SynthConfig& config) {
    write_corpus(out_path, generate_marker_corpus(config));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iterative extractive summarizer"};
    app.require_subcommand(1);
    // Flat key=value file, keys prefixed with the subcommand
    // ("train.epochs=30"); command-line flags win over file values.
    app.set_config("--config", "", "key=value option file");

    std::string corpus, eval_corpus, out, checkpoint, baseline, policy = "none";
    bool document_order = false;
    Index doc_index = 0;
    int k_min = 1, k_max = 7;
    ModelFlags model;
    TrainFlags flags;
    SynthConfig synth;

    CLI::App* train_cmd = app.add_subcommand("train", "train a model");
    train_cmd->add_option("--corpus", corpus, "training corpus (JSONL)")->required();
    train_cmd->add_option("--out", out, "output directory")->required();
    model.attach(*train_cmd);
    flags.attach(*train_cmd);

    CLI::App* eval_cmd = app.add_subcommand("evaluate", "score summaries with ROUGE");
    eval_cmd->add_option("--corpus", corpus, "corpus with highlights")->required();
    eval_cmd->add_option("--checkpoint", checkpoint, "trained model checkpoint");
    eval_cmd->add_option("--baseline", baseline, "baseline system (lead3)");
    eval_cmd->add_option("--policy", policy, "truncation: none, bytes:N or words:N");
    eval_cmd->add_option("--out", out, "directory for rouge.json / rouge.txt");
    eval_cmd->add_flag("--document-order", document_order,
                       "emit selected sentences in document order");

    CLI::App* sum_cmd = app.add_subcommand("summarize", "select top sentences per document");
    sum_cmd->add_option("--corpus", corpus, "input corpus")->required();
    sum_cmd->add_option("--checkpoint", checkpoint, "trained model checkpoint")->required();
    sum_cmd->add_option("--out", out, "output JSONL (stdout when omitted)");
    sum_cmd->add_flag("--document-order", document_order,
                      "emit selected sentences in document order");

    CLI::App* lead_cmd = app.add_subcommand("lead3", "first-three-sentences baseline");
    lead_cmd->add_option("--corpus", corpus, "input corpus")->required();
    lead_cmd->add_option("--out", out, "output JSONL (stdout when omitted)");

    CLI::App* oracle_cmd = app.add_subcommand("label-oracle", "attach greedy oracle labels");
    oracle_cmd->add_option("--corpus", corpus, "corpus with highlights")->required();
    oracle_cmd->add_option("--out", out, "labeled corpus output")->required();
    oracle_cmd->add_option("--max-select", flags.config.max_select, "summary size");

    CLI::App* sweep_cmd = app.add_subcommand("sweep-iterations",
                                             "train and score one model per K");
    sweep_cmd->add_option("--corpus", corpus, "training corpus")->required();
    sweep_cmd->add_option("--eval-corpus", eval_corpus, "evaluation corpus (training one if unset)");
    sweep_cmd->add_option("--out", out, "output CSV path")->required();
    sweep_cmd->add_option("--k-min", k_min, "smallest iteration count");
    sweep_cmd->add_option("--k-max", k_max, "largest iteration count");
    sweep_cmd->add_option("--policy", policy, "truncation policy for scoring");
    model.attach(*sweep_cmd);
    flags.attach(*sweep_cmd);

    CLI::App* heat_cmd = app.add_subcommand("heatmap", "per-iteration score matrix for one document");
    heat_cmd->add_option("--corpus", corpus, "input corpus")->required();
    heat_cmd->add_option("--checkpoint", checkpoint, "trained model checkpoint")->required();
    heat_cmd->add_option("--index", doc_index, "document index in the corpus");
    heat_cmd->add_option("--out", out, "output CSV (stdout when omitted)");

    CLI::App* synth_cmd = app.add_subcommand("gen-synth", "write a synthetic marker corpus");
    synth_cmd->add_option("--out", out, "corpus output path")->required();
    synth_cmd->add_option("--docs", synth.docs, "document count");
    synth_cmd->add_option("--sentences", synth.sentences, "sentences per document");
    synth_cmd->add_option("--words", synth.words, "words per sentence");
    synth_cmd->add_option("--vocab", synth.filler_vocab, "filler vocabulary size");
    synth_cmd->add_option("--marker-min-index", synth.marker_min_index,
                          "lowest sentence index for the marker");
    synth_cmd->add_option("--seed", synth.seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(train_cmd)) return cmd_train(corpus, out, model, flags);
        if (app.got_subcommand(eval_cmd)) {
            return cmd_evaluate(corpus, checkpoint, baseline, policy, out, document_order);
        }
        if (app.got_subcommand(sum_cmd)) {
            return cmd_summarize(corpus, checkpoint, out, document_order);
        }
        if (app.got_subcommand(lead_cmd)) return cmd_lead3(corpus, out);
        if (app.got_subcommand(oracle_cmd)) {
            return cmd_label_oracle(corpus, out, flags.config.max_select);
        }
        if (app.got_subcommand(sweep_cmd)) {
            return cmd_sweep(corpus, eval_corpus, out, k_min, k_max, model, flags, policy);
        }
        if (app.got_subcommand(heat_cmd)) {
            return cmd_heatmap(corpus, checkpoint, out, doc_index);
        }
        if (app.got_subcommand(synth_cmd)) return cmd_gen_synth(out, synth);
        std::cerr << "no command\n";
        return kExitUsage;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
}
