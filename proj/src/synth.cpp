#include "its/synth.hpp"

#include <iomanip>
#include <sstream>

namespace its {

namespace {

std::string filler_token(std::uint64_t index) {
    std::ostringstream out;
    out << "w" << std::setw(3) << std::setfill('0') << index;
    return out.str();
}

}  // namespace

std::vector<Document> generate_marker_corpus(const SynthConfig& config) {
    if (config.docs < 1 || config.sentences < 1 || config.words < 1 || config.filler_vocab < 2) {
        throw std::invalid_argument("SynthConfig: docs, sentences, words, vocab must be positive");
    }
    if (config.marker_min_index < 0 || config.marker_min_index >= config.sentences) {
        throw std::invalid_argument("SynthConfig: marker_min_index must fall inside the document");
    }

    RngState rng(config.seed);
    std::vector<Document> corpus;
    corpus.reserve(static_cast<std::size_t>(config.docs));
    for (int d = 0; d < config.docs; ++d) {
        Document doc;
        std::ostringstream id;
        id << "synth-" << std::setw(3) << std::setfill('0') << d;
        doc.id = id.str();

        const std::size_t marker_index =
            static_cast<std::size_t>(config.marker_min_index) +
            rng.uniform_index(static_cast<std::uint64_t>(config.sentences -
                                                         config.marker_min_index));
        for (int s = 0; s < config.sentences; ++s) {
            TokenList sentence;
            const bool is_marker = static_cast<std::size_t>(s) == marker_index;
            for (int w = 0; w < config.words; ++w) {
                // Marker sentences alternate the marker token with fillers
                // so the signal survives pooling.
                if (is_marker && w % 2 == 0) {
                    sentence.push_back("marker");
                } else {
                    sentence.push_back(filler_token(
                        rng.uniform_index(static_cast<std::uint64_t>(config.filler_vocab))));
                }
            }
            doc.sentences.push_back(std::move(sentence));
        }
        doc.highlights = {doc.sentences[marker_index]};
        corpus.push_back(std::move(doc));
    }
    return corpus;
}

}  // namespace its
