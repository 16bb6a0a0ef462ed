#pragma once

#include <vector>

#include "its/network.hpp"
#include "its/rouge.hpp"

namespace its {

/// Indices of the top-scoring sentences (at most max_sentences), ordered by
/// descending score with ties broken toward the lower index. With
/// document_order the chosen indices are re-sorted ascending.
std::vector<Index> select_top_sentences(const std::vector<double>& scores, bool document_order,
                                        std::size_t max_sentences = 3);

/// Per-document model selections, forwarding each document through the
/// checkpointed model.
std::vector<std::vector<Index>> model_selections(const Checkpoint& model,
                                                 const std::vector<Document>& corpus,
                                                 bool document_order);

/// First min(3, n_s) sentence indices per document.
std::vector<std::vector<Index>> lead3_selections(const std::vector<Document>& corpus);

/// ROUGE against each document's highlights; candidates truncated per the
/// policy. Documents without highlights are an error.
RougeReport score_selections(const std::vector<Document>& corpus,
                             const std::vector<std::vector<Index>>& selections,
                             const TruncationPolicy& policy);

/// One JSONL line: {"id", "selected", "summary"}.
std::string selection_json(const Document& doc, const std::vector<Index>& selected);

}  // namespace its
