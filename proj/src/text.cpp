#include "its/text.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace its {

using nlohmann::json;

// -- Vocabulary -------------------------------------------------------------

void Vocabulary::insert(const std::string& token) {
    ids_.emplace(token, static_cast<Index>(tokens_.size()));
    tokens_.push_back(token);
}

Vocabulary Vocabulary::build(const std::vector<Document>& corpus, std::size_t capacity) {
    if (capacity < 2) throw std::invalid_argument("Vocabulary: capacity must hold pad and unk");
    std::unordered_map<std::string, std::size_t> counts;
    for (const Document& doc : corpus) {
        for (const TokenList& sentence : doc.sentences) {
            for (const std::string& token : sentence) ++counts[fold_case(token)];
        }
    }
    // Most frequent first; ties break lexicographically so builds are
    // independent of hash iteration order.
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary vocab;
    vocab.insert("<pad>");
    vocab.insert("<unk>");
    for (const auto& [token, count] : ranked) {
        if (vocab.tokens_.size() >= capacity) break;
        if (token == "<pad>" || token == "<unk>") continue;
        vocab.insert(token);
    }
    return vocab;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
    Vocabulary vocab;
    for (const std::string& token : tokens) {
        if (vocab.ids_.count(token)) throw DataError("Vocabulary: duplicate token " + token);
        vocab.insert(token);
    }
    if (vocab.size() < 2 || vocab.tokens_[0] != "<pad>" || vocab.tokens_[1] != "<unk>") {
        throw DataError("Vocabulary: token list must start with <pad>, <unk>");
    }
    return vocab;
}

Index Vocabulary::id(const std::string& token) const {
    const auto it = ids_.find(fold_case(token));
    return it != ids_.end() ? it->second : kUnk;
}

const std::string& Vocabulary::token(Index id) const {
    if (id < 0 || id >= size()) throw std::out_of_range("Vocabulary: id out of range");
    return tokens_[static_cast<std::size_t>(id)];
}

// -- Tokenize and pad ---------------------------------------------------------

TokenGrid tokenize_and_pad(const Document& doc, const Vocabulary& vocab, Index max_words) {
    if (doc.sentences.empty()) throw DataError("tokenize_and_pad: empty document " + doc.id);
    if (max_words < 1) throw std::invalid_argument("tokenize_and_pad: max_words must be >= 1");

    const Index n_s = static_cast<Index>(doc.sentences.size());
    TokenGrid grid;
    grid.ids.setConstant(n_s, max_words, Vocabulary::kPad);
    grid.lengths.resize(static_cast<std::size_t>(n_s));
    for (Index i = 0; i < n_s; ++i) {
        const TokenList& sentence = doc.sentences[static_cast<std::size_t>(i)];
        const Index n = std::min<Index>(static_cast<Index>(sentence.size()), max_words);
        for (Index j = 0; j < n; ++j) {
            grid.ids(i, j) = vocab.id(sentence[static_cast<std::size_t>(j)]);
        }
        grid.lengths[static_cast<std::size_t>(i)] = n;
    }
    return grid;
}

// -- Embeddings ---------------------------------------------------------------

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                                Index expected_width, RngState& rng) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embedding file: " + path.string());

    Index width = expected_width;
    std::unordered_map<std::string, std::vector<double>> file_rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string token;
        fields >> token;
        std::vector<double> values;
        double v;
        while (fields >> v) values.push_back(v);
        if (values.empty()) {
            throw DataError("embedding file line " + std::to_string(line_no) +
                            ": no vector values");
        }
        if (width == 0) width = static_cast<Index>(values.size());
        if (static_cast<Index>(values.size()) != width) {
            throw DataError("embedding file line " + std::to_string(line_no) + ": dimension " +
                            std::to_string(values.size()) + " does not match " +
                            std::to_string(width));
        }
        file_rows[fold_case(token)] = std::move(values);
    }
    if (width == 0) {
        throw DataError("embedding file " + path.string() +
                        " is empty and no embedding width was given");
    }

    EmbeddingMatrix rows = EmbeddingMatrix::Zero(vocab.size(), width);
    for (Index id = 1; id < vocab.size(); ++id) {  // pad row stays zero
        const auto it = file_rows.find(vocab.token(id));
        if (it != file_rows.end()) {
            for (Index d = 0; d < width; ++d) rows(id, d) = it->second[static_cast<std::size_t>(d)];
        } else {
            for (Index d = 0; d < width; ++d) rows(id, d) = rng.uniform(-0.2, 0.2);
        }
    }
    return rows;
}

EmbeddingMatrix random_embeddings(const Vocabulary& vocab, Index width, RngState& rng) {
    EmbeddingMatrix rows = EmbeddingMatrix::Zero(vocab.size(), width);
    for (Index id = 1; id < vocab.size(); ++id) {
        for (Index d = 0; d < width; ++d) rows(id, d) = rng.uniform(-0.2, 0.2);
    }
    return rows;
}

// -- Corpus IO ----------------------------------------------------------------

namespace {

std::vector<TokenList> parse_sentence_list(const json& j, const char* field,
                                           std::size_t line_no) {
    if (!j.is_array()) {
        throw DataError("corpus line " + std::to_string(line_no) + ": \"" + field +
                        "\" must be a list of sentences");
    }
    std::vector<TokenList> out;
    for (const json& sentence : j) {
        if (!sentence.is_array()) {
            throw DataError("corpus line " + std::to_string(line_no) + ": \"" + field +
                            "\" entries must be token lists");
        }
        TokenList tokens;
        for (const json& token : sentence) {
            if (!token.is_string()) {
                throw DataError("corpus line " + std::to_string(line_no) + ": \"" + field +
                                "\" tokens must be strings");
            }
            tokens.push_back(token.get<std::string>());
        }
        out.push_back(std::move(tokens));
    }
    return out;
}

Document parse_document(const std::string& line, std::size_t line_no) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw DataError("corpus line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object()) {
        throw DataError("corpus line " + std::to_string(line_no) + ": expected an object");
    }
    for (const char* field : {"id", "sentences"}) {
        if (!j.contains(field)) {
            throw DataError("corpus line " + std::to_string(line_no) + ": missing field \"" +
                            field + "\"");
        }
    }

    Document doc;
    if (!j["id"].is_string()) {
        throw DataError("corpus line " + std::to_string(line_no) + ": \"id\" must be a string");
    }
    doc.id = j["id"].get<std::string>();
    doc.sentences = parse_sentence_list(j["sentences"], "sentences", line_no);
    if (doc.sentences.empty()) {
        throw DataError("corpus line " + std::to_string(line_no) + ": document has no sentences");
    }
    for (const TokenList& sentence : doc.sentences) {
        if (sentence.empty()) {
            throw DataError("corpus line " + std::to_string(line_no) + ": empty sentence");
        }
    }
    if (j.contains("highlights")) {
        doc.highlights = parse_sentence_list(j["highlights"], "highlights", line_no);
    }
    if (j.contains("labels")) {
        const json& labels = j["labels"];
        if (!labels.is_array() || labels.size() != doc.sentences.size()) {
            throw DataError("corpus line " + std::to_string(line_no) +
                            ": \"labels\" must list one 0/1 per sentence");
        }
        for (const json& v : labels) {
            if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
                throw DataError("corpus line " + std::to_string(line_no) +
                                ": labels must be 0 or 1");
            }
            doc.labels.push_back(v.get<int>());
        }
    }
    return doc;
}

}  // namespace

void for_each_document(const std::filesystem::path& path,
                       const std::function<void(Document&&)>& fn) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus: " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        fn(parse_document(line, line_no));
    }
}

std::vector<Document> read_corpus(const std::filesystem::path& path) {
    std::vector<Document> docs;
    for_each_document(path, [&](Document&& doc) { docs.push_back(std::move(doc)); });
    return docs;
}

std::string document_to_json(const Document& doc) {
    json j;
    j["id"] = doc.id;
    j["sentences"] = doc.sentences;
    if (doc.has_highlights()) j["highlights"] = doc.highlights;
    if (doc.has_labels()) j["labels"] = doc.labels;
    return j.dump();
}

void write_corpus(const std::filesystem::path& path, const std::vector<Document>& docs) {
    std::string out;
    for (const Document& doc : docs) {
        out += document_to_json(doc);
        out += '\n';
    }
    atomic_write(path, out);
}

// -- Greedy oracle --------------------------------------------------------------

namespace {

double selection_score(const std::vector<TokenList>& folded_sentences,
                       const TokenList& reference, const std::vector<int>& selected,
                       OracleObjective objective) {
    TokenList candidate;
    for (std::size_t i = 0; i < folded_sentences.size(); ++i) {
        if (!selected[i]) continue;
        candidate.insert(candidate.end(), folded_sentences[i].begin(),
                         folded_sentences[i].end());
    }
    const RougeScore r1 = rouge_n(candidate, reference, 1);
    const RougeScore r2 = rouge_n(candidate, reference, 2);
    switch (objective) {
        case OracleObjective::mean_f1: return 0.5 * (r1.f1 + r2.f1);
        case OracleObjective::rouge1_f1: return r1.f1;
        case OracleObjective::rouge2_f1: return r2.f1;
        case OracleObjective::mean_recall: return 0.5 * (r1.recall + r2.recall);
    }
    return 0.0;
}

std::vector<TokenList> folded(const std::vector<TokenList>& sentences) {
    std::vector<TokenList> out;
    out.reserve(sentences.size());
    for (const TokenList& s : sentences) out.push_back(fold_tokens(s));
    return out;
}

}  // namespace

double oracle_score(const Document& doc, const std::vector<int>& selected_indices,
                    OracleObjective objective) {
    if (!doc.has_highlights()) throw DataError("no gold summary for document " + doc.id);
    std::vector<int> mask(doc.sentences.size(), 0);
    for (int idx : selected_indices) mask[static_cast<std::size_t>(idx)] = 1;
    return selection_score(folded(doc.sentences), fold_tokens(join_sentences(doc.highlights)),
                           mask, objective);
}

std::vector<int> greedy_oracle_labels(const Document& doc, int max_select,
                                      OracleObjective objective) {
    if (!doc.has_highlights()) throw DataError("no gold summary for document " + doc.id);
    if (max_select < 1) throw std::invalid_argument("greedy_oracle_labels: max_select >= 1");

    const std::vector<TokenList> sentences = folded(doc.sentences);
    const TokenList reference = fold_tokens(join_sentences(doc.highlights));

    std::vector<int> selected(sentences.size(), 0);
    double best_score = 0.0;
    int picked = 0;
    while (picked < max_select) {
        int best_index = -1;
        double best_candidate = best_score;
        for (std::size_t i = 0; i < sentences.size(); ++i) {
            if (selected[i]) continue;
            selected[i] = 1;
            const double score = selection_score(sentences, reference, selected, objective);
            selected[i] = 0;
            // Strict improvement; scanning in index order keeps the lowest
            // index on ties.
            if (score > best_candidate) {
                best_candidate = score;
                best_index = static_cast<int>(i);
            }
        }
        if (best_index < 0) break;
        selected[static_cast<std::size_t>(best_index)] = 1;
        best_score = best_candidate;
        ++picked;
    }
    return selected;
}

}  // namespace its
