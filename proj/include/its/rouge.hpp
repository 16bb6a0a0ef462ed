#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "its/base.hpp"

namespace its {

using TokenList = std::vector<std::string>;

/// How candidate summaries are shortened before scoring.
struct TruncationPolicy {
    enum class Mode { none, bytes, words };
    Mode mode = Mode::none;
    std::size_t limit = 0;

    static TruncationPolicy none() { return {}; }
    static TruncationPolicy bytes(std::size_t limit) { return {Mode::bytes, limit}; }
    static TruncationPolicy words(std::size_t limit) { return {Mode::words, limit}; }
    /// Parses "none", "bytes:N" or "words:N".
    static TruncationPolicy parse(const std::string& text);
    std::string str() const;
};

struct RougeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t overlap = 0;
    std::size_t candidate_units = 0;
    std::size_t reference_units = 0;
    /// Set when the reference had no units of this order.
    bool empty_reference = false;
};

struct RougeReport {
    RougeScore rouge1;
    RougeScore rouge2;
    RougeScore rougeL;
    std::size_t documents = 0;

    /// Aligned Rouge-1/2/L column table.
    std::string table() const;
    std::string json() const;
};

/// Bytes mode keeps the longest token prefix whose space-joined byte length
/// stays within the limit; tokens are never split. Words mode keeps the
/// first `limit` tokens.
TokenList truncate(const TokenList& tokens, const TruncationPolicy& policy);

/// Clipped n-gram overlap, n in {1, 2}.
RougeScore rouge_n(const TokenList& candidate, const TokenList& reference, int n);

/// Longest-common-subsequence overlap.
RougeScore rouge_l(const TokenList& candidate, const TokenList& reference);

/// One document: candidate sentences plus one or more reference summaries.
struct ScoredPair {
    std::vector<TokenList> candidate_sentences;
    std::vector<std::vector<TokenList>> references;  // each reference is a sentence list
};

/// Macro-averaged corpus scores. Sentences are joined with single spaces and
/// tokens case-folded; truncation applies to candidates only. With
/// max_over_references each document takes the best-scoring reference per
/// metric (F1 order); otherwise exactly one reference is required.
RougeReport score_corpus(const std::vector<ScoredPair>& pairs, const TruncationPolicy& policy,
                         bool max_over_references = false);

std::string fold_case(const std::string& token);
TokenList fold_tokens(const TokenList& tokens);
TokenList join_sentences(const std::vector<TokenList>& sentences);

}  // namespace its
