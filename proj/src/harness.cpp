#include "its/harness.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

namespace its {

std::vector<Index> select_top_sentences(const std::vector<double>& scores, bool document_order,
                                        std::size_t max_sentences) {
    std::vector<Index> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    // Stable sort keeps the lower index first among equal scores.
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    });
    order.resize(std::min(max_sentences, order.size()));
    if (document_order) std::sort(order.begin(), order.end());
    return order;
}

std::vector<std::vector<Index>> model_selections(const Checkpoint& model,
                                                 const std::vector<Document>& corpus,
                                                 bool document_order) {
    const Vocabulary vocab = Vocabulary::from_tokens(model.vocab_tokens);
    std::vector<std::vector<Index>> out;
    out.reserve(corpus.size());
    for (const Document& doc : corpus) {
        const TokenGrid grid = tokenize_and_pad(doc, vocab, model.config.max_words);
        const ForwardResult result = forward(grid, model.params, model.config);
        out.push_back(select_top_sentences(result.probabilities(), document_order));
    }
    return out;
}

std::vector<std::vector<Index>> lead3_selections(const std::vector<Document>& corpus) {
    std::vector<std::vector<Index>> out;
    out.reserve(corpus.size());
    for (const Document& doc : corpus) {
        std::vector<Index> first(std::min<std::size_t>(3, doc.sentences.size()));
        std::iota(first.begin(), first.end(), 0);
        out.push_back(std::move(first));
    }
    return out;
}

RougeReport score_selections(const std::vector<Document>& corpus,
                             const std::vector<std::vector<Index>>& selections,
                             const TruncationPolicy& policy) {
    if (corpus.size() != selections.size()) {
        throw std::invalid_argument("score_selections: selection count mismatch");
    }
    std::vector<ScoredPair> pairs;
    pairs.reserve(corpus.size());
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        const Document& doc = corpus[d];
        if (!doc.has_highlights()) {
            throw DataError("document " + doc.id + " has no highlights to evaluate against");
        }
        ScoredPair pair;
        for (Index i : selections[d]) {
            pair.candidate_sentences.push_back(doc.sentences[static_cast<std::size_t>(i)]);
        }
        pair.references = {doc.highlights};
        pairs.push_back(std::move(pair));
    }
    return score_corpus(pairs, policy);
}

std::string selection_json(const Document& doc, const std::vector<Index>& selected) {
    nlohmann::json j;
    j["id"] = doc.id;
    j["selected"] = selected;
    nlohmann::json sentences = nlohmann::json::array();
    for (Index i : selected) sentences.push_back(doc.sentences[static_cast<std::size_t>(i)]);
    j["summary"] = std::move(sentences);
    return j.dump();
}

}  // namespace its
