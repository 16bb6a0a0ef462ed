#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "its/base.hpp"
#include "its/rouge.hpp"
#include "its/tensor.hpp"

namespace its {

/// Pre-tokenized article with optional gold highlights and optional
/// precomputed extraction labels.
struct Document {
    std::string id;
    std::vector<TokenList> sentences;
    std::vector<TokenList> highlights;
    std::vector<int> labels;  // empty when absent

    bool has_highlights() const { return !highlights.empty(); }
    bool has_labels() const { return !labels.empty(); }
};

/// Token ids, case-folded, most frequent first, capped. Ids 0 and 1 are
/// reserved for padding and unknown tokens.
class Vocabulary {
public:
    static constexpr Index kPad = 0;
    static constexpr Index kUnk = 1;
    static constexpr std::size_t kDefaultCapacity = 100000;

    static Vocabulary build(const std::vector<Document>& corpus,
                            std::size_t capacity = kDefaultCapacity);
    static Vocabulary from_tokens(const std::vector<std::string>& tokens);

    Index id(const std::string& token) const;
    const std::string& token(Index id) const;
    Index size() const { return static_cast<Index>(tokens_.size()); }

    const std::vector<std::string>& tokens() const { return tokens_; }

private:
    Vocabulary() = default;
    void insert(const std::string& token);

    std::unordered_map<std::string, Index> ids_;
    std::vector<std::string> tokens_;
};

/// Sentences mapped to ids and padded/cut to a fixed width. lengths[i]
/// counts the non-pad prefix of row i.
struct TokenGrid {
    Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> ids;
    std::vector<Index> lengths;

    Index sentence_count() const { return ids.rows(); }
};

TokenGrid tokenize_and_pad(const Document& doc, const Vocabulary& vocab, Index max_words);

/// One embedding row per vocabulary id; the pad row is all zero.
using EmbeddingMatrix = RowMatrix;

/// Reads a whitespace-separated "token v1 ... vE" file. Vocabulary tokens
/// missing from the file get uniform[-0.2, 0.2] rows; the file fixes E when
/// expected_width is 0.
EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                                Index expected_width, RngState& rng);

/// Uniform[-0.2, 0.2] rows for every non-pad id, as if loading an empty file.
EmbeddingMatrix random_embeddings(const Vocabulary& vocab, Index width, RngState& rng);

// -- Corpus IO -------------------------------------------------------------
//
// JSONL, one object per line:
//   {"id": str, "sentences": [[token,...],...], "highlights": [[...],...]?,
//    "labels": [0|1,...]?}

void for_each_document(const std::filesystem::path& path,
                       const std::function<void(Document&&)>& fn);
std::vector<Document> read_corpus(const std::filesystem::path& path);
std::string document_to_json(const Document& doc);
void write_corpus(const std::filesystem::path& path, const std::vector<Document>& docs);

// -- Greedy oracle ----------------------------------------------------------

enum class OracleObjective {
    mean_f1,       // mean of ROUGE-1 F1 and ROUGE-2 F1 (default)
    rouge1_f1,
    rouge2_f1,
    mean_recall,
};

/// Binary gold labels from abstractive highlights. Greedily adds the
/// sentence whose inclusion most improves the oracle score of the selected
/// set (kept in document order) against the joined highlights; stops when no
/// sentence strictly improves the score or max_select is reached. Ties break
/// toward the lowest sentence index.
std::vector<int> greedy_oracle_labels(const Document& doc, int max_select,
                                      OracleObjective objective = OracleObjective::mean_f1);

/// Score used by the oracle for an explicit selection; exposed so tests can
/// compare greedy picks against exhaustive search.
double oracle_score(const Document& doc, const std::vector<int>& selected_indices,
                    OracleObjective objective = OracleObjective::mean_f1);

}  // namespace its
