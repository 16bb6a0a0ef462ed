#pragma once

#include <vector>

#include "its/text.hpp"

namespace its {

/// Marker-token corpus: every document is filler except one sentence that
/// carries the marker token, and the highlights repeat that sentence
/// verbatim. Gold labels are known by construction, so training and
/// evaluation need no external data.
struct SynthConfig {
    int docs = 32;
    int sentences = 8;
    int words = 8;
    int filler_vocab = 150;
    /// Marker sentences land at a uniform index >= this, which keeps Lead-3
    /// from seeing them (the default skips the first three positions).
    int marker_min_index = 3;
    std::uint64_t seed = 7;
};

std::vector<Document> generate_marker_corpus(const SynthConfig& config);

}  // namespace its
